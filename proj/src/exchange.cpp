#include "offlabel/exchange.h"

#include <set>

#include "offlabel/error.h"

namespace offlabel {

Json to_json(const ModelExchange& e) {
  Json j;
  j["query_id"] = e.query_id;
  j["query_text"] = e.query_text;
  j["product_id"] = e.product_id;
  j["label_text"] = e.label_text;
  j["response_text"] = e.response_text;
  j["model_id"] = e.model_id;
  j["failed"] = e.failed;
  return j;
}

ModelExchange exchange_from_json(const Json& j, const std::string& file,
                                 std::size_t line) {
  ModelExchange e;
  e.query_id = require_string(j, "query_id", file, line);
  e.query_text = require_string(j, "query_text", file, line);
  e.product_id = require_string(j, "product_id", file, line);
  e.label_text = require_string(j, "label_text", file, line);
  e.response_text = require_string(j, "response_text", file, line);
  e.model_id = require_string(j, "model_id", file, line);
  auto it = j.find("failed");
  if (it != j.end()) {
    if (!it->is_boolean()) throw LoadError(file, line, "'failed' must be a bool");
    e.failed = it->get<bool>();
  }
  return e;
}

std::vector<ModelExchange> read_exchanges(const std::filesystem::path& path) {
  std::vector<ModelExchange> out;
  std::set<std::string> ids;
  const std::string file = path.string();
  for_each_jsonl(path, [&](std::size_t line, const Json& j) {
    auto e = exchange_from_json(j, file, line);
    if (!ids.insert(e.query_id).second) {
      throw LoadError(file, line, "duplicate query_id '" + e.query_id + "'");
    }
    out.push_back(std::move(e));
  });
  return out;
}

void write_exchanges(const std::filesystem::path& path,
                     const std::vector<ModelExchange>& exchanges) {
  JsonlWriter w(path);
  for (const auto& e : exchanges) w.write(to_json(e));
  w.close();
}

}  // namespace offlabel
