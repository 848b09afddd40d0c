#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "droidcall/errors.hpp"
#include "droidcall/record.hpp"
#include "droidcall/value.hpp"

namespace droidcall {

class IoError : public Error {
 public:
  using Error::Error;
};

std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// One JSON value per non-blank line. Throws IoError naming the bad line.
std::vector<json> parse_jsonl(std::string_view text, std::string_view source_name = "<input>");
std::vector<json> read_jsonl(const std::filesystem::path& path);

std::vector<GenerationRecord> read_records(const std::filesystem::path& path);
std::string records_to_jsonl(const std::vector<GenerationRecord>& records);

// Runs a shell command with `input` on stdin and returns its stdout. Throws
// IoError when the command cannot start or exits non-zero.
std::string run_command(const std::string& command, std::string_view input);

}  // namespace droidcall
