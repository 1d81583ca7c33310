#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "offlabel/error.h"
#include "offlabel/pipeline.h"

namespace fs = std::filesystem;
using namespace offlabel;

namespace {

struct Globals {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

struct KbFlags {
  std::string products, concepts, embeddings, cues, negations;
};

void add_kb_flags(CLI::App* app, KbFlags& f, bool with_lexicons) {
  app->add_option("--products", f.products, "products.jsonl");
  app->add_option("--concepts", f.concepts, "concepts.jsonl");
  if (with_lexicons) {
    app->add_option("--embeddings", f.embeddings, "word embedding table");
    app->add_option("--cues", f.cues, "recommendation cue list");
    app->add_option("--negations", f.negations, "negation cue list");
  }
}

// Flags win over the config file; the config file wins over built-in defaults.
RunConfig base_config(const Globals& g) {
  RunConfig c;
  if (!g.config.empty()) c = load_run_config(g.config);
  if (!g.out_dir.empty()) c.out_dir = g.out_dir;
  if (g.seed) {
    c.seed = *g.seed;
    c.model.plant.seed = *g.seed;
  }
  return c;
}

void apply_kb_flags(RunConfig& c, const KbFlags& f) {
  if (!f.products.empty()) c.products = f.products;
  if (!f.concepts.empty()) c.concepts = f.concepts;
  if (!f.embeddings.empty()) c.embeddings = fs::path(f.embeddings);
  if (!f.cues.empty()) c.cues = fs::path(f.cues);
  if (!f.negations.empty()) c.negations = fs::path(f.negations);
}

std::unique_ptr<KnowledgeBase> load_kb(const RunConfig& c) {
  if (c.products.empty() || c.concepts.empty()) {
    throw ValidationError("--products and --concepts are required (or --config)");
  }
  return load_knowledge_base(c.products, c.concepts, c.embeddings, c.cues,
                             c.negations);
}

fs::path output_path(const std::string& flag, const RunConfig& c,
                     const char* default_name) {
  return flag.empty() ? c.out_dir / default_name : fs::path(flag);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Off-label promotion detection toolchain"};
  app.fallthrough();  // global flags may follow the subcommand
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "run configuration (JSON)");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--seed", g.seed, "seed for generation and the mock model");
  app.add_flag("--quiet", g.quiet, "suppress progress output");
  app.set_version_flag("--version", std::string(kToolVersion));

  // db validate
  KbFlags db_flags;
  auto* db = app.add_subcommand("db", "knowledge base utilities");
  db->require_subcommand(1);
  auto* db_validate = db->add_subcommand("validate", "load and validate the knowledge base");
  add_kb_flags(db_validate, db_flags, true);

  // gen
  KbFlags gen_kb;
  std::string gen_templates, gen_uses, gen_out;
  bool gen_aliases = false;
  auto* gen = app.add_subcommand("gen", "expand templates into synthetic queries");
  add_kb_flags(gen, gen_kb, false);
  gen->add_option("--templates", gen_templates, "templates.txt");
  gen->add_option("--uses", gen_uses, "uses.jsonl");
  gen->add_option("--out", gen_out, "queries.jsonl");
  gen->add_flag("--use-aliases", gen_aliases, "sample product/indication aliases");

  // query
  KbFlags q_kb;
  std::string q_in, q_out, q_gold_out, q_model, q_endpoint, q_auth;
  std::optional<double> q_plant, q_typo, q_neg, q_rps;
  std::optional<int> q_conc, q_retries, q_timeout;
  auto* query = app.add_subcommand("query", "collect model responses");
  add_kb_flags(query, q_kb, false);
  query->add_option("--in", q_in, "queries.jsonl")->required();
  query->add_option("--out", q_out, "exchanges.jsonl");
  query->add_option("--gold-out", q_gold_out, "gold.jsonl (mock only)");
  query->add_option("--model", q_model, "mock or http")
      ->check(CLI::IsMember({"mock", "http"}));
  query->add_option("--plant-rate", q_plant);
  query->add_option("--typo-rate", q_typo);
  query->add_option("--negation-rate", q_neg);
  query->add_option("--endpoint", q_endpoint, "model endpoint URL");
  query->add_option("--auth-env", q_auth, "environment variable holding the credential");
  query->add_option("--rps", q_rps, "requests per second");
  query->add_option("--concurrency", q_conc, "maximum requests in flight");
  query->add_option("--max-retries", q_retries);
  query->add_option("--timeout-ms", q_timeout);

  // detect
  KbFlags d_kb;
  std::string d_in, d_out, d_corrections, d_tagger, d_classifier;
  std::optional<double> d_tau;
  std::optional<int> d_max_edit, d_fuzzy_edit;
  std::optional<unsigned> d_threads;
  bool d_fuzzy = false, d_no_correct = false;
  auto* detect = app.add_subcommand("detect", "detect off-label recommendations");
  add_kb_flags(detect, d_kb, true);
  detect->add_option("--in", d_in, "exchanges.jsonl")->required();
  detect->add_option("--out", d_out, "findings.jsonl");
  detect->add_option("--tau", d_tau, "embedding link threshold");
  detect->add_option("--max-edit", d_max_edit, "spell-correction edit bound (0-2)");
  detect->add_flag("--fuzzy", d_fuzzy, "enable fuzzy entity matching");
  detect->add_option("--fuzzy-max-edit", d_fuzzy_edit);
  detect->add_flag("--no-correct", d_no_correct, "skip spelling correction");
  detect->add_option("--tagger-url", d_tagger, "external tagger endpoint");
  detect->add_option("--classifier-url", d_classifier, "external classifier endpoint");
  detect->add_option("--corrections-out", d_corrections, "write applied corrections");
  detect->add_option("--threads", d_threads);

  // eval
  std::string e_findings, e_gold, e_exchanges, e_out;
  auto* eval = app.add_subcommand("eval", "score findings against gold labels");
  eval->add_option("--findings", e_findings)->required();
  eval->add_option("--gold", e_gold)->required();
  eval->add_option("--exchanges", e_exchanges)->required();
  eval->add_option("--out", e_out, "report.json");

  // run
  auto* run = app.add_subcommand("run", "gen, query, detect and eval in one go");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  auto log = [&](const std::string& line) {
    if (!g.quiet) std::cerr << line << "\n";
  };

  try {
    RunConfig cfg = base_config(g);

    if (db_validate->parsed()) {
      apply_kb_flags(cfg, db_flags);
      auto kb = load_kb(cfg);
      std::size_t approved = 0;
      for (const auto& [id, p] : kb->db.products()) approved += p.approved_indication_ids.size();
      std::cout << "products: " << kb->db.products().size() << "\n"
                << "concepts: " << kb->db.concepts().size() << "\n"
                << "approved pairs: " << approved << "\n"
                << "aliases: " << kb->index.size() << "\n";
      if (kb->table) {
        std::cout << "embeddings: " << kb->table->size() << " x "
                  << kb->table->dimension() << "\n";
      }
      return kExitOk;
    }

    if (gen->parsed()) {
      apply_kb_flags(cfg, gen_kb);
      if (!gen_templates.empty()) cfg.templates = gen_templates;
      if (!gen_uses.empty()) cfg.uses = gen_uses;
      if (gen_aliases) cfg.use_aliases = true;
      if (cfg.templates.empty() || cfg.uses.empty()) {
        throw ValidationError("--templates and --uses are required (or --config)");
      }
      auto kb = load_kb(cfg);
      auto queries = generate_queries(cfg.templates, cfg.uses, kb->db,
                                      {cfg.use_aliases, cfg.seed}, log);
      fs::path out = output_path(gen_out, cfg, "queries.jsonl");
      write_queries(out, queries);
      log("wrote " + std::to_string(queries.size()) + " queries to " + out.string());
      return kExitOk;
    }

    if (query->parsed()) {
      apply_kb_flags(cfg, q_kb);
      auto& m = cfg.model;
      if (!q_model.empty()) m.kind = q_model;
      if (q_plant) m.plant.plant_rate = *q_plant;
      if (q_typo) m.plant.typo_rate = *q_typo;
      if (q_neg) m.plant.negation_rate = *q_neg;
      if (!q_endpoint.empty()) m.endpoint.base_url = q_endpoint;
      if (!q_auth.empty()) m.endpoint.auth_env_var = q_auth;
      if (q_rps) m.endpoint.requests_per_second = *q_rps;
      if (q_conc) m.endpoint.max_concurrency = *q_conc;
      if (q_retries) m.endpoint.max_retries = *q_retries;
      if (q_timeout) m.endpoint.timeout = std::chrono::milliseconds(*q_timeout);
      if (m.kind == "mock") m.plant.validate();
      else m.endpoint.validate();

      auto queries = read_queries(q_in);
      std::unique_ptr<KnowledgeBase> kb;
      if (m.kind == "mock") kb = load_kb(cfg);
      fs::path out = output_path(q_out, cfg, "exchanges.jsonl");
      CollectedResponses responses;
      if (kb) {
        responses = collect_responses(queries, kb->db, m, log);
      } else {
        HttpModelClient client(m.endpoint, log);
        responses.exchanges = client.run(queries);
      }
      write_exchanges(out, responses.exchanges);
      if (responses.gold) {
        fs::path gold = q_gold_out.empty() ? out.parent_path() / "gold.jsonl"
                                           : fs::path(q_gold_out);
        write_gold(gold, *responses.gold);
      }
      std::size_t failed = 0;
      for (const auto& e : responses.exchanges) failed += e.failed ? 1 : 0;
      log("wrote " + std::to_string(responses.exchanges.size()) + " exchanges (" +
          std::to_string(failed) + " failed) to " + out.string());
      return kExitOk;
    }

    if (detect->parsed()) {
      apply_kb_flags(cfg, d_kb);
      auto& s = cfg.detector;
      if (d_tau) s.tau = *d_tau;
      if (d_max_edit) s.max_edit = *d_max_edit;
      if (d_fuzzy) s.fuzzy = true;
      if (d_fuzzy_edit) s.fuzzy_max_edit = *d_fuzzy_edit;
      if (d_no_correct) s.correct_responses = false;
      if (!d_tagger.empty()) s.tagger_url = d_tagger;
      if (!d_classifier.empty()) s.classifier_url = d_classifier;
      if (d_threads) cfg.threads = *d_threads;
      if (s.max_edit < 0 || s.max_edit > kMaxSupportedEdit) {
        throw ValidationError("--max-edit must be in [0, 2]");
      }
      if (s.fuzzy_max_edit < 1 || s.fuzzy_max_edit > kMaxSupportedEdit) {
        throw ValidationError("--fuzzy-max-edit must be 1 or 2");
      }
      if (!(s.tau > 0.0 && s.tau <= 1.0)) throw ValidationError("--tau must be in (0, 1]");

      auto kb = load_kb(cfg);
      auto exchanges = read_exchanges(d_in);
      Detector detector(kb->db, kb->index, kb->table_ptr(),
                        make_detector_config(s, kb->lexicon));
      std::vector<ResponseCorrection> corrections;
      auto findings = detect_corpus(detector, exchanges, cfg.threads,
                                    d_corrections.empty() ? nullptr : &corrections);
      fs::path out = output_path(d_out, cfg, "findings.jsonl");
      write_findings(out, findings);
      write_findings_meta(out, detector.fingerprint());
      if (!d_corrections.empty()) {
        JsonlWriter w(d_corrections);
        for (const auto& c : corrections) {
          w.write(Json{{"query_id", c.query_id},
                       {"offset", c.correction.offset},
                       {"original", c.correction.original},
                       {"corrected", c.correction.corrected}});
        }
        w.close();
      }
      log("wrote " + std::to_string(findings.size()) + " findings to " + out.string());
      return kExitOk;
    }

    if (eval->parsed()) {
      auto findings = read_findings(e_findings);
      auto gold = read_gold(e_gold);
      auto exchanges = read_exchanges(e_exchanges);
      EvalReport report = evaluate(findings, gold, exchanges,
                                   read_findings_fingerprint(e_findings));
      fs::path out = output_path(e_out, cfg, "report.json");
      write_report(out, report);
      std::cout << render_report(report);
      return kExitOk;
    }

    if (run->parsed()) {
      if (g.config.empty()) throw ValidationError("run requires --config");
      RunResult r = run_end_to_end(cfg, log);
      if (r.exit_code != kExitOk) {
        std::cerr << "error: stage " << r.failed_stage << ": " << r.error << "\n";
        return r.exit_code;
      }
      if (r.report) std::cout << render_report(*r.report);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}
