#include "droidcall/io.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace droidcall {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

std::vector<json> parse_jsonl(std::string_view text, std::string_view source_name) {
  std::vector<json> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        out.push_back(json::parse(line));
      } catch (const json::parse_error& e) {
        throw IoError(std::string(source_name) + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  return parse_jsonl(read_text_file(path), path.string());
}

std::vector<GenerationRecord> read_records(const std::filesystem::path& path) {
  std::vector<GenerationRecord> out;
  std::size_t line = 0;
  for (const auto& j : read_jsonl(path)) {
    ++line;
    try {
      out.push_back(record_from_json(j));
    } catch (const Error& e) {
      throw IoError(path.string() + ": record " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

std::string records_to_jsonl(const std::vector<GenerationRecord>& records) {
  std::string out;
  for (const auto& r : records) out += record_to_json(r).dump() + "\n";
  return out;
}

std::string run_command(const std::string& command, std::string_view input) {
  char tmpl[] = "/tmp/droidcall-input-XXXXXX";
  int fd = ::mkstemp(tmpl);
  if (fd < 0) throw IoError("cannot create a temp file for '" + command + "'");
  std::size_t written = 0;
  while (written < input.size()) {
    auto n = ::write(fd, input.data() + written, input.size() - written);
    if (n <= 0) break;
    written += static_cast<std::size_t>(n);
  }
  ::close(fd);
  std::string full = command + " < " + tmpl;
  FILE* pipe = ::popen(full.c_str(), "r");
  if (!pipe) {
    ::unlink(tmpl);
    throw IoError("cannot start '" + command + "'");
  }
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  int status = ::pclose(pipe);
  ::unlink(tmpl);
  if (written != input.size()) throw IoError("cannot feed input to '" + command + "'");
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw IoError("command '" + command + "' failed");
  return out;
}

}  // namespace droidcall
