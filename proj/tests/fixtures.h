#pragma once

#include <filesystem>
#include <string>

#include "offlabel/labeldb.h"

namespace fixtures {

inline std::filesystem::path source_dir() { return OFFLABEL_SOURCE_DIR; }
inline std::filesystem::path data(const std::string& name) { return source_dir() / "data" / name; }
inline std::filesystem::path sample(const std::string& name) {
  return source_dir() / "tests" / "fixtures" / "sample" / name;
}

inline const offlabel::ProductDatabase& sample_db() {
  static const auto db =
      offlabel::load_product_db(sample("products.jsonl"), sample("concepts.jsonl"));
  return db;
}

inline const offlabel::ProductDatabase& full_db() {
  static const auto db =
      offlabel::load_product_db(data("products.jsonl"), data("concepts.jsonl"));
  return db;
}

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("offlabel-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
