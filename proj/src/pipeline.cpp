#include "offlabel/pipeline.h"

#include <chrono>
#include <fstream>
#include <map>
#include <set>

#include "offlabel/error.h"
#include "offlabel/hashing.h"
#include "offlabel/plugins.h"

namespace offlabel {
namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  return dynamic_cast<const ValidationError*>(&e) ? kExitValidation
                                                  : kExitStageFailure;
}

namespace {

void require_file(const fs::path& p, const char* what) {
  if (p.empty()) throw ValidationError(std::string("config: missing ") + what + " path");
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) {
    throw ValidationError(std::string("config: ") + what + " file not found: " + p.string());
  }
}

class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ValidationError(where_ + " must be a JSON object");
  }

  const Json* get(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  std::optional<std::string> string(const char* key) {
    const Json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) fail(key, "a string");
    return v->get<std::string>();
  }
  std::optional<double> number(const char* key) {
    const Json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) fail(key, "a number");
    return v->get<double>();
  }
  std::optional<std::int64_t> integer(const char* key) {
    const Json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) fail(key, "an integer");
    return v->get<std::int64_t>();
  }
  std::optional<bool> boolean(const char* key) {
    const Json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) fail(key, "a boolean");
    return v->get<bool>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ValidationError(where_ + ": unknown key '" + it.key() + "'");
      }
    }
  }

 private:
  [[noreturn]] void fail(const char* key, const char* type) const {
    throw ValidationError(where_ + ": '" + key + "' must be " + type);
  }

  const Json& j_;
  std::string where_;
  std::set<std::string, std::less<>> seen_;
};

std::vector<std::string> read_list_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return CueLexicon::parse_list(in);
}

using Clock = std::chrono::steady_clock;

}  // namespace

RunConfig run_config_from_json(const Json& j, const fs::path& base_dir) {
  RunConfig c;
  ObjectReader top(j, "config");
  auto path = [&](const char* key) -> std::optional<fs::path> {
    auto s = top.string(key);
    if (!s) return std::nullopt;
    fs::path p(*s);
    return p.is_absolute() ? p : base_dir / p;
  };
  c.products = path("products").value_or(fs::path());
  c.concepts = path("concepts").value_or(fs::path());
  c.templates = path("templates").value_or(fs::path());
  c.uses = path("uses").value_or(fs::path());
  c.embeddings = path("embeddings");
  c.cues = path("cues");
  c.negations = path("negations");
  c.gold = path("gold");
  if (auto out = path("out_dir")) c.out_dir = *out;
  if (auto seed = top.integer("seed")) {
    if (*seed < 0) throw ValidationError("config: 'seed' must be non-negative");
    c.seed = static_cast<std::uint64_t>(*seed);
  }
  if (auto threads = top.integer("threads")) {
    if (*threads < 0) throw ValidationError("config: 'threads' must be non-negative");
    c.threads = static_cast<unsigned>(*threads);
  }

  if (const Json* g = top.get("generation")) {
    ObjectReader r(*g, "config.generation");
    if (auto v = r.boolean("use_aliases")) c.use_aliases = *v;
    r.finish();
  }
  if (const Json* d = top.get("detector")) {
    ObjectReader r(*d, "config.detector");
    auto& s = c.detector;
    if (auto v = r.number("tau")) s.tau = *v;
    if (auto v = r.integer("max_edit")) s.max_edit = static_cast<int>(*v);
    if (auto v = r.boolean("correct_responses")) s.correct_responses = *v;
    if (auto v = r.boolean("fuzzy")) s.fuzzy = *v;
    if (auto v = r.integer("fuzzy_max_edit")) s.fuzzy_max_edit = static_cast<int>(*v);
    if (auto v = r.string("tagger_url")) s.tagger_url = *v;
    if (auto v = r.string("classifier_url")) s.classifier_url = *v;
    r.finish();
  }
  if (const Json* m = top.get("model")) {
    ObjectReader r(*m, "config.model");
    auto& s = c.model;
    if (auto v = r.string("kind")) s.kind = *v;
    if (auto v = r.number("plant_rate")) s.plant.plant_rate = *v;
    if (auto v = r.number("typo_rate")) s.plant.typo_rate = *v;
    if (auto v = r.number("negation_rate")) s.plant.negation_rate = *v;
    if (auto v = r.string("base_url")) s.endpoint.base_url = *v;
    if (auto v = r.string("auth_env_var")) s.endpoint.auth_env_var = *v;
    if (auto v = r.integer("timeout_ms")) s.endpoint.timeout = std::chrono::milliseconds(*v);
    if (auto v = r.integer("max_retries")) s.endpoint.max_retries = static_cast<int>(*v);
    if (auto v = r.integer("max_concurrency")) s.endpoint.max_concurrency = static_cast<int>(*v);
    if (auto v = r.number("requests_per_second")) s.endpoint.requests_per_second = *v;
    if (auto v = r.string("model_id")) s.endpoint.model_id = *v;
    r.finish();
  }
  top.finish();
  c.model.plant.seed = c.seed;
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  Json j = Json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ValidationError(path.string() + ": malformed JSON");
  return run_config_from_json(j, path.parent_path());
}

void RunConfig::validate() const {
  require_file(products, "products");
  require_file(concepts, "concepts");
  require_file(templates, "templates");
  require_file(uses, "uses");
  if (embeddings) require_file(*embeddings, "embeddings");
  if (cues) require_file(*cues, "cues");
  if (negations) require_file(*negations, "negations");
  if (gold) require_file(*gold, "gold");
  if (out_dir.empty()) throw ValidationError("config: out_dir must not be empty");
  if (!(detector.tau > 0.0 && detector.tau <= 1.0)) {
    throw ValidationError("config: tau must be in (0, 1]");
  }
  if (detector.max_edit < 0 || detector.max_edit > kMaxSupportedEdit) {
    throw ValidationError("config: max_edit must be in [0, 2]");
  }
  if (detector.fuzzy_max_edit < 1 || detector.fuzzy_max_edit > kMaxSupportedEdit) {
    throw ValidationError("config: fuzzy_max_edit must be 1 or 2");
  }
  if (!detector.tagger_url.empty()) parse_url(detector.tagger_url);
  if (!detector.classifier_url.empty()) parse_url(detector.classifier_url);
  if (model.kind == "mock") {
    model.plant.validate();
  } else if (model.kind == "http") {
    model.endpoint.validate();
    const char* value = std::getenv(model.endpoint.auth_env_var.c_str());
    if (!value || !*value) {
      throw ValidationError("credential environment variable " +
                            model.endpoint.auth_env_var + " is not set");
    }
  } else {
    throw ValidationError("config: model kind must be 'mock' or 'http'");
  }
}

std::unique_ptr<KnowledgeBase> load_knowledge_base(
    const fs::path& products, const fs::path& concepts,
    const std::optional<fs::path>& embeddings, const std::optional<fs::path>& cues,
    const std::optional<fs::path>& negations) {
  ProductDatabase db = load_product_db(products, concepts);
  AliasIndex index = build_alias_index(db);
  std::optional<EmbeddingTable> table;
  if (embeddings) table = EmbeddingTable::load(*embeddings);
  CueLexicon defaults = CueLexicon::defaults();
  CueLexicon lexicon = CueLexicon::from_lists(
      cues ? read_list_file(*cues) : defaults.cues(),
      negations ? read_list_file(*negations) : defaults.negations());
  if (lexicon.cues().empty()) throw ValidationError("cue lexicon is empty");
  return std::make_unique<KnowledgeBase>(KnowledgeBase{
      std::move(db), std::move(index), std::move(table), std::move(lexicon)});
}

DetectorConfig make_detector_config(const DetectorSettings& s,
                                    const CueLexicon& lexicon) {
  DetectorConfig c;
  c.tau = s.tau;
  c.max_edit = s.max_edit;
  c.correct_responses = s.correct_responses;
  c.fuzzy = s.fuzzy;
  c.fuzzy_max_edit = s.fuzzy_max_edit;
  c.lexicon = lexicon;
  if (!s.tagger_url.empty()) c.external_tagger = std::make_shared<HttpTagger>(s.tagger_url);
  if (!s.classifier_url.empty()) {
    c.external_classifier = std::make_shared<HttpClassifier>(s.classifier_url);
  }
  return c;
}

std::vector<SyntheticQuery> generate_queries(const fs::path& templates,
                                             const fs::path& uses,
                                             const ProductDatabase& db,
                                             const ExpansionOptions& options,
                                             const Logger& log) {
  auto tmpl = load_templates(templates);
  std::vector<std::string> warnings;
  auto use_list = validate_uses(uses, db, &warnings);
  if (log) {
    for (const auto& w : warnings) log("warning: " + w);
  }
  return expand_templates(tmpl, use_list, db, options);
}

CollectedResponses collect_responses(const std::vector<SyntheticQuery>& queries,
                                     const ProductDatabase& db,
                                     const ModelSettings& model,
                                     const Logger& log) {
  CollectedResponses out;
  if (model.kind == "mock") {
    std::vector<GoldLabel> gold;
    out.exchanges.reserve(queries.size());
    gold.reserve(queries.size());
    for (const auto& q : queries) {
      MockResult r = mock_model(q, db, model.plant);
      out.exchanges.push_back(std::move(r.exchange));
      gold.push_back(std::move(r.gold));
    }
    out.gold = std::move(gold);
    return out;
  }
  if (model.kind != "http") {
    throw ValidationError("model kind must be 'mock' or 'http'");
  }
  HttpModelClient client(model.endpoint, log);
  out.exchanges = client.run(queries);
  return out;
}

fs::path findings_meta_path(const fs::path& findings) {
  fs::path p = findings;
  p += ".meta.json";
  return p;
}

void write_findings_meta(const fs::path& findings, const std::string& fingerprint) {
  Json j;
  j["config_fingerprint"] = fingerprint;
  write_file(findings_meta_path(findings), j.dump(2) + "\n");
}

std::string read_findings_fingerprint(const fs::path& findings) {
  fs::path meta = findings_meta_path(findings);
  std::error_code ec;
  if (!fs::exists(meta, ec)) return "unknown";
  Json j = Json::parse(read_file(meta), nullptr, false);
  if (!j.is_object() || !j.contains("config_fingerprint") ||
      !j["config_fingerprint"].is_string()) {
    throw ValidationError(meta.string() + ": malformed findings metadata");
  }
  return j["config_fingerprint"].get<std::string>();
}

RunResult run_end_to_end(const RunConfig& cfg, const Logger& log) {
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  RunResult result;
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    result.exit_code = exit_code_for(e);
    result.failed_stage = "config";
    result.error = e.what();
    return result;
  }

  const fs::path& out = cfg.out_dir;
  Json manifest;
  manifest["tool"] = "offlabel";
  manifest["version"] = std::string(kToolVersion);
  manifest["seed"] = cfg.seed;
  manifest["model"] = cfg.model.kind;
  Json inputs = Json::object();
  Json artifacts = Json::object();
  Json stages = Json::array();
  Json timings = Json::object();
  std::string stage = "setup";

  auto record = [&](const fs::path& file) {
    artifacts[file.filename().string()] = sha256_file(file);
  };
  auto timed = [&](const std::string& name, auto&& fn) {
    stage = name;
    say("stage " + name);
    auto t0 = Clock::now();
    fn();
    timings[name] = std::chrono::duration<double>(Clock::now() - t0).count();
    stages.push_back(name);
  };

  try {
    fs::create_directories(out);
    auto add_input = [&](const char* name, const std::optional<fs::path>& p) {
      if (!p) return;
      inputs[name] = {{"file", p->filename().string()}, {"sha256", sha256_file(*p)}};
    };
    add_input("products", cfg.products);
    add_input("concepts", cfg.concepts);
    add_input("templates", cfg.templates);
    add_input("uses", cfg.uses);
    add_input("embeddings", cfg.embeddings);
    add_input("cues", cfg.cues);
    add_input("negations", cfg.negations);
    add_input("gold", cfg.gold);

    std::unique_ptr<KnowledgeBase> kb;
    timed("load", [&] {
      kb = load_knowledge_base(cfg.products, cfg.concepts, cfg.embeddings,
                               cfg.cues, cfg.negations);
    });

    std::vector<SyntheticQuery> queries;
    timed("gen", [&] {
      queries = generate_queries(cfg.templates, cfg.uses, kb->db,
                                 {cfg.use_aliases, cfg.seed}, log);
      write_queries(out / "queries.jsonl", queries);
      record(out / "queries.jsonl");
    });

    CollectedResponses responses;
    timed("query", [&] {
      responses = collect_responses(queries, kb->db, cfg.model, log);
      write_exchanges(out / "exchanges.jsonl", responses.exchanges);
      record(out / "exchanges.jsonl");
      if (responses.gold) {
        write_gold(out / "gold.jsonl", *responses.gold);
        record(out / "gold.jsonl");
      }
    });

    std::vector<OffLabelFinding> findings;
    std::string fingerprint;
    timed("detect", [&] {
      Detector detector(kb->db, kb->index, kb->table_ptr(),
                        make_detector_config(cfg.detector, kb->lexicon));
      fingerprint = detector.fingerprint();
      findings = detect_corpus(detector, responses.exchanges, cfg.threads);
      fs::path fpath = out / "findings.jsonl";
      write_findings(fpath, findings);
      write_findings_meta(fpath, fingerprint);
      record(fpath);
      record(findings_meta_path(fpath));
    });
    manifest["config_fingerprint"] = fingerprint;

    std::optional<std::vector<GoldLabel>> gold = responses.gold;
    if (!gold && cfg.gold) gold = read_gold(*cfg.gold);
    if (gold) {
      timed("eval", [&] {
        EvalReport report = evaluate(findings, *gold, responses.exchanges, fingerprint);
        write_report(out / "report.json", report);
        record(out / "report.json");
        result.report = std::move(report);
      });
    } else {
      say("no gold labels configured; skipping eval");
    }
    manifest["status"] = "ok";
  } catch (const std::exception& e) {
    result.exit_code = exit_code_for(e);
    result.failed_stage = stage;
    result.error = e.what();
    manifest["status"] = "failed";
    manifest["failed_stage"] = stage;
    manifest["error"] = e.what();
  }

  manifest["inputs"] = inputs;
  manifest["stages"] = stages;
  manifest["artifacts"] = artifacts;
  try {
    write_file(out / "manifest.json", manifest.dump(2) + "\n");
    Json t;
    t["stages_seconds"] = timings;
    write_file(out / "timings.json", t.dump(2) + "\n");
  } catch (const std::exception& e) {
    if (result.exit_code == kExitOk) {
      result.exit_code = kExitStageFailure;
      result.failed_stage = "manifest";
      result.error = e.what();
    }
  }
  return result;
}

}  // namespace offlabel
