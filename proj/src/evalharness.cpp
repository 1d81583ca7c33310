#include "offlabel/evalharness.h"

#include <algorithm>

#include "offlabel/error.h"

namespace offlabel {

ConfusionCounts compare_triples(const std::set<Triple>& found,
                                const std::set<Triple>& gold) {
  ConfusionCounts c;
  for (const auto& t : found) {
    if (gold.count(t)) ++c.tp;
    else ++c.fp;
  }
  c.fn = gold.size() - c.tp;
  return c;
}

ConfusionCounts compare(const std::vector<OffLabelFinding>& findings,
                        const std::vector<GoldLabel>& gold) {
  std::set<Triple> positives;
  for (const auto& g : gold) {
    if (!g.planted) continue;
    Triple t{g.query_id, g.product_id, g.indication_concept_id.value_or("")};
    if (!positives.insert(t).second) {
      throw ValidationError("duplicate gold triple (" + g.query_id + ", " +
                            g.product_id + ", " + std::get<2>(t) + ")");
    }
  }
  std::set<Triple> found;
  for (const auto& f : findings) {
    found.emplace(f.query_id, f.product_id, f.indication_concept_id);
  }
  return compare_triples(found, positives);
}

double f1_score(double p, double r) {
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

Metrics metrics(const ConfusionCounts& c) {
  Metrics m;
  if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

CorpusStats corpus_stats(const std::vector<OffLabelFinding>& findings,
                         const std::vector<ModelExchange>& exchanges) {
  CorpusStats s;
  std::map<std::string, bool> failed;
  for (const auto& e : exchanges) {
    failed[e.query_id] = e.failed;
    if (e.failed) ++s.n_failed;
  }
  s.n_exchanges = exchanges.size();

  std::set<std::string> flagged;
  std::set<std::string> products;
  for (const auto& f : findings) {
    auto it = failed.find(f.query_id);
    if (it == failed.end()) {
      throw ValidationError("finding for unknown query_id '" + f.query_id + "'");
    }
    if (it->second) continue;
    flagged.insert(f.query_id);
    products.insert(f.product_id);
    ++s.findings_per_product[f.product_id];
  }
  s.n_flagged = flagged.size();
  std::size_t evaluable = s.n_exchanges - s.n_failed;
  s.off_label_response_rate =
      evaluable > 0 ? static_cast<double>(s.n_flagged) / static_cast<double>(evaluable) : 0.0;
  s.flagged_products.assign(products.begin(), products.end());
  return s;
}

bool EvalReport::operator==(const EvalReport& o) const {
  return counts == o.counts && scores.precision == o.scores.precision &&
         scores.recall == o.scores.recall && scores.f1 == o.scores.f1 &&
         off_label_response_rate == o.off_label_response_rate &&
         flagged_products == o.flagged_products && n_exchanges == o.n_exchanges &&
         n_failed == o.n_failed && config_fingerprint == o.config_fingerprint;
}

EvalReport evaluate(const std::vector<OffLabelFinding>& findings,
                    const std::vector<GoldLabel>& gold,
                    const std::vector<ModelExchange>& exchanges,
                    std::string config_fingerprint) {
  EvalReport r;
  r.counts = compare(findings, gold);
  r.scores = metrics(r.counts);
  CorpusStats s = corpus_stats(findings, exchanges);
  r.off_label_response_rate = s.off_label_response_rate;
  r.flagged_products = std::move(s.flagged_products);
  r.n_exchanges = s.n_exchanges;
  r.n_failed = s.n_failed;
  r.config_fingerprint = std::move(config_fingerprint);
  return r;
}

Json to_json(const EvalReport& r) {
  Json j;
  j["tp"] = r.counts.tp;
  j["fp"] = r.counts.fp;
  j["fn"] = r.counts.fn;
  j["precision"] = r.scores.precision;
  j["recall"] = r.scores.recall;
  j["f1"] = r.scores.f1;
  j["off_label_response_rate"] = r.off_label_response_rate;
  j["flagged_products"] = r.flagged_products;
  j["n_exchanges"] = r.n_exchanges;
  j["n_failed"] = r.n_failed;
  j["config_fingerprint"] = r.config_fingerprint;
  return j;
}

namespace {

std::size_t count_field(const Json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_number_unsigned()) {
    throw ValidationError(std::string("report field '") + name +
                          "' must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

double real_field(const Json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_number()) {
    throw ValidationError(std::string("report field '") + name + "' must be a number");
  }
  return it->get<double>();
}

}  // namespace

EvalReport report_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("report must be a JSON object");
  EvalReport r;
  r.counts = {count_field(j, "tp"), count_field(j, "fp"), count_field(j, "fn")};
  r.scores = {real_field(j, "precision"), real_field(j, "recall"), real_field(j, "f1")};
  r.off_label_response_rate = real_field(j, "off_label_response_rate");
  r.flagged_products = require_string_list(j, "flagged_products", "report", 1);
  r.n_exchanges = count_field(j, "n_exchanges");
  r.n_failed = count_field(j, "n_failed");
  r.config_fingerprint = require_string(j, "config_fingerprint", "report", 1);
  return r;
}

std::string render_report(const EvalReport& r) {
  return to_json(r).dump(2) + "\n";
}

void write_report(const std::filesystem::path& path, const EvalReport& r) {
  write_file(path, render_report(r));
}

EvalReport read_report(const std::filesystem::path& path) {
  Json j = Json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ValidationError(path.string() + ": malformed JSON");
  return report_from_json(j);
}

}  // namespace offlabel
