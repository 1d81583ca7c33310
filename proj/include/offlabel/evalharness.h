#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "offlabel/detector.h"
#include "offlabel/exchange.h"
#include "offlabel/jsonl.h"
#include "offlabel/modelclient.h"

// Scoring of findings against gold labels, and corpus statistics.

namespace offlabel {

// (query_id, product_id, indication_concept_id)
using Triple = std::tuple<std::string, std::string, std::string>;

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts compare_triples(const std::set<Triple>& found,
                                const std::set<Triple>& gold);

// Duplicate findings for one triple count once; duplicate positive gold
// triples throw ValidationError.
ConfusionCounts compare(const std::vector<OffLabelFinding>& findings,
                        const std::vector<GoldLabel>& gold);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Each ratio is 0 when its denominator is 0.
Metrics metrics(const ConfusionCounts& counts);
double f1_score(double precision, double recall);

struct CorpusStats {
  std::size_t n_exchanges = 0;
  std::size_t n_failed = 0;
  std::size_t n_flagged = 0;  // distinct query_ids with at least one finding
  double off_label_response_rate = 0.0;
  std::vector<std::string> flagged_products;  // sorted
  std::map<std::string, std::size_t> findings_per_product;
};

// Throws ValidationError on a finding whose query_id is not an exchange.
CorpusStats corpus_stats(const std::vector<OffLabelFinding>& findings,
                         const std::vector<ModelExchange>& exchanges);

struct EvalReport {
  ConfusionCounts counts;
  Metrics scores;
  double off_label_response_rate = 0.0;
  std::vector<std::string> flagged_products;
  std::size_t n_exchanges = 0;
  std::size_t n_failed = 0;
  std::string config_fingerprint = "unknown";

  bool operator==(const EvalReport& o) const;
};

EvalReport evaluate(const std::vector<OffLabelFinding>& findings,
                    const std::vector<GoldLabel>& gold,
                    const std::vector<ModelExchange>& exchanges,
                    std::string config_fingerprint);

Json to_json(const EvalReport& r);
EvalReport report_from_json(const Json& j);
std::string render_report(const EvalReport& r);
void write_report(const std::filesystem::path& path, const EvalReport& r);
EvalReport read_report(const std::filesystem::path& path);

}  // namespace offlabel
