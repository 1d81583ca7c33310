#include "offlabel/jsonl.h"

#include <sstream>

#include "offlabel/error.h"

namespace offlabel {

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(std::size_t, const Json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw LoadError(path.string(), line_no,
                      std::string("malformed JSON: ") + e.what());
    }
    if (!record.is_object()) {
      throw LoadError(path.string(), line_no, "record is not a JSON object");
    }
    fn(line_no, record);
  }
}

std::string require_string(const Json& record, const char* field,
                           const std::string& file, std::size_t line) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_string()) {
    throw LoadError(file, line,
                    std::string("field '") + field + "' must be a string");
  }
  return it->get<std::string>();
}

std::vector<std::string> require_string_list(const Json& record,
                                             const char* field,
                                             const std::string& file,
                                             std::size_t line) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_array()) {
    throw LoadError(file, line,
                    std::string("field '") + field + "' must be a list");
  }
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw LoadError(file, line,
                      std::string("field '") + field +
                          "' must contain only strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path) : path_(path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error("cannot write " + path.string());
}

void JsonlWriter::write(const Json& record) {
  out_ << record.dump() << '\n';
}

void JsonlWriter::close() {
  out_.close();
  if (out_.fail()) throw Error("failed writing " + path_.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << data;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace offlabel
