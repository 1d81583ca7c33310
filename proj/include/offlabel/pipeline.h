#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "offlabel/detector.h"
#include "offlabel/evalharness.h"
#include "offlabel/labeldb.h"
#include "offlabel/linker.h"
#include "offlabel/modelclient.h"
#include "offlabel/redteam.h"

// Run configuration, stage helpers shared by the CLI, and the one-shot
// end-to-end run.

namespace offlabel {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitStageFailure = 3,
};

// ValidationError (and subclasses) map to 2, anything else to 3.
int exit_code_for(const std::exception& e);

using Logger = std::function<void(const std::string&)>;

struct DetectorSettings {
  double tau = kDefaultTau;
  int max_edit = 1;
  bool correct_responses = true;
  bool fuzzy = false;
  int fuzzy_max_edit = 1;
  std::string tagger_url;      // empty: built-in dictionary tagger
  std::string classifier_url;  // empty: built-in rule classifier
};

struct ModelSettings {
  std::string kind = "mock";  // "mock" or "http"
  PlantConfig plant;
  ModelEndpointConfig endpoint;
};

struct RunConfig {
  std::filesystem::path products;
  std::filesystem::path concepts;
  std::filesystem::path templates;
  std::filesystem::path uses;
  std::optional<std::filesystem::path> embeddings;
  std::optional<std::filesystem::path> cues;
  std::optional<std::filesystem::path> negations;
  std::optional<std::filesystem::path> gold;  // only consulted for http runs
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool use_aliases = false;
  DetectorSettings detector;
  ModelSettings model;

  // Paths exist, parameters are in range, the credential variable (http) is
  // set. Throws ValidationError.
  void validate() const;
};

// Relative paths are resolved against `base_dir`. Unknown keys are rejected,
// which also keeps credentials from being inlined.
RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

struct KnowledgeBase {
  ProductDatabase db;
  AliasIndex index;
  std::optional<EmbeddingTable> table;
  CueLexicon lexicon;

  const EmbeddingTable* table_ptr() const { return table ? &*table : nullptr; }
};

std::unique_ptr<KnowledgeBase> load_knowledge_base(
    const std::filesystem::path& products, const std::filesystem::path& concepts,
    const std::optional<std::filesystem::path>& embeddings,
    const std::optional<std::filesystem::path>& cues = std::nullopt,
    const std::optional<std::filesystem::path>& negations = std::nullopt);

DetectorConfig make_detector_config(const DetectorSettings& settings,
                                    const CueLexicon& lexicon);

std::vector<SyntheticQuery> generate_queries(const std::filesystem::path& templates,
                                             const std::filesystem::path& uses,
                                             const ProductDatabase& db,
                                             const ExpansionOptions& options,
                                             const Logger& log = {});

struct CollectedResponses {
  std::vector<ModelExchange> exchanges;
  std::optional<std::vector<GoldLabel>> gold;  // mock only
};

CollectedResponses collect_responses(const std::vector<SyntheticQuery>& queries,
                                     const ProductDatabase& db,
                                     const ModelSettings& model,
                                     const Logger& log = {});

// Sidecar next to a findings file carrying the detector fingerprint.
std::filesystem::path findings_meta_path(const std::filesystem::path& findings);
void write_findings_meta(const std::filesystem::path& findings,
                         const std::string& fingerprint);
// "unknown" when the sidecar is absent.
std::string read_findings_fingerprint(const std::filesystem::path& findings);

struct RunResult {
  int exit_code = kExitOk;
  std::string failed_stage;
  std::string error;
  std::optional<EvalReport> report;
};

// gen -> query -> detect -> eval under cfg.out_dir. Always writes
// manifest.json (status "ok" or "failed" plus the artifacts produced so far)
// once the output directory exists. Stage wall times go to timings.json so
// that every other artifact is a pure function of the inputs and seed.
RunResult run_end_to_end(const RunConfig& cfg, const Logger& log = {});

}  // namespace offlabel
