#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace offlabel {

using Json = nlohmann::ordered_json;

// Calls fn(line_number, record) for every non-blank line. Line numbers are
// 1-based. Parse failures throw LoadError; a missing file throws
// ValidationError.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(std::size_t, const Json&)>& fn);

// Typed field accessors that throw LoadError naming the field.
std::string require_string(const Json& record, const char* field,
                           const std::string& file, std::size_t line);
std::vector<std::string> require_string_list(const Json& record,
                                             const char* field,
                                             const std::string& file,
                                             std::size_t line);

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  void write(const Json& record);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& data);

}  // namespace offlabel
