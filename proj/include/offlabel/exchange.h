#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "offlabel/jsonl.h"

namespace offlabel {

// One (query, label context, model response) unit.
struct ModelExchange {
  std::string query_id;
  std::string query_text;
  std::string product_id;
  std::string label_text;
  std::string response_text;
  std::string model_id;
  bool failed = false;

  bool operator==(const ModelExchange&) const = default;
};

Json to_json(const ModelExchange& e);
ModelExchange exchange_from_json(const Json& j, const std::string& file,
                                 std::size_t line);

// Rejects duplicate query ids.
std::vector<ModelExchange> read_exchanges(const std::filesystem::path& path);
void write_exchanges(const std::filesystem::path& path,
                     const std::vector<ModelExchange>& exchanges);

}  // namespace offlabel
