#include <algorithm>
#include <fstream>
#include <sstream>

#include "droidcall/schema.hpp"

namespace droidcall {

SchemaRegistry load_default_registry() {
  SchemaRegistry registry;
  for (const auto& src : bundled_function_sources()) {
    FunctionSchema schema = parse_function_source(src.text);
    if (schema.name != src.name)
      throw SchemaError(SchemaErrc::InvalidSchema,
                        "bundled file " + std::string(src.name) + ".src defines '" + schema.name + "'");
    registry.add(std::move(schema));
  }
  apply_match_modes(registry, bundled_match_modes());
  return registry;
}

SchemaRegistry load_registry_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".src") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  SchemaRegistry registry;
  for (const auto& f : files) {
    FunctionSchema schema;
    try {
      schema = parse_function_source(read(f));
    } catch (const SchemaError& e) {
      throw SchemaError(e.kind(), f.filename().string() + ": " + e.what());
    }
    registry.add(std::move(schema));
  }
  fs::path modes = dir / "match_modes.json";
  if (fs::exists(modes)) apply_match_modes(registry, read(modes));
  return registry;
}

}  // namespace droidcall
