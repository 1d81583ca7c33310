#include <cstdlib>
#include <sys/wait.h>

#include "doctest.h"
#include "fixtures.h"
#include "offlabel/error.h"
#include "offlabel/hashing.h"
#include "offlabel/pipeline.h"

using namespace offlabel;
namespace fs = std::filesystem;

namespace {

Json base_config(const fs::path& out) {
  Json j;
  j["products"] = fixtures::data("products.jsonl").string();
  j["concepts"] = fixtures::data("concepts.jsonl").string();
  j["templates"] = fixtures::data("templates.txt").string();
  j["uses"] = fixtures::data("uses.jsonl").string();
  j["embeddings"] = fixtures::data("embeddings.txt").string();
  j["out_dir"] = out.string();
  j["seed"] = 7;
  j["model"] = {{"kind", "mock"}, {"plant_rate", 0.15}};
  return j;
}

int cli(const std::string& args) {
  std::string cmd = std::string(OFFLABEL_CLI) + " --quiet " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename() == "timings.json") continue;
    out[e.path().filename().string()] = read_file(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("config paths resolve against the config file") {
  auto dir = fixtures::scratch("pipeline-config");
  write_file(dir / "c.json", R"({"products": "p.jsonl", "concepts": "/abs/c.jsonl",
    "templates": "t.txt", "uses": "u.jsonl", "out_dir": "out", "seed": 3,
    "detector": {"tau": 0.9, "fuzzy": true}, "model": {"kind": "mock", "typo_rate": 0.5}})");
  auto c = load_run_config(dir / "c.json");
  CHECK(c.products == dir / "p.jsonl");
  CHECK(c.concepts == fs::path("/abs/c.jsonl"));
  CHECK(c.out_dir == dir / "out");
  CHECK(c.seed == 3);
  CHECK(c.model.plant.seed == 3);
  CHECK(c.detector.tau == 0.9);
  CHECK(c.detector.fuzzy);
  CHECK(c.model.plant.typo_rate == 0.5);
  CHECK_THROWS_AS(c.validate(), ValidationError);

  write_file(dir / "bad.json", R"({"products": "p", "api_key": "abc"})");
  CHECK_THROWS_AS(load_run_config(dir / "bad.json"), ValidationError);
  write_file(dir / "bad.json", R"({"model": {"kind": "mock", "token": "abc"}})");
  CHECK_THROWS_AS(load_run_config(dir / "bad.json"), ValidationError);
  write_file(dir / "bad.json", R"({"seed": "seven"})");
  CHECK_THROWS_AS(load_run_config(dir / "bad.json"), ValidationError);
}

TEST_CASE("missing templates path fails validation before any work") {
  auto dir = fixtures::scratch("pipeline-missing");
  Json j = base_config(dir / "out");
  j["templates"] = (dir / "nope.txt").string();
  auto r = run_end_to_end(run_config_from_json(j, dir));
  CHECK(r.exit_code == kExitValidation);
  CHECK(r.failed_stage == "config");
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("http runs need the credential variable up front") {
  auto dir = fixtures::scratch("pipeline-http");
  Json j = base_config(dir / "out");
  j["model"] = {{"kind", "http"}, {"base_url", "http://127.0.0.1:1/v1"},
                {"auth_env_var", "OFFLABEL_UNSET_VARIABLE"}};
  unsetenv("OFFLABEL_UNSET_VARIABLE");
  auto r = run_end_to_end(run_config_from_json(j, dir));
  CHECK(r.exit_code == kExitValidation);
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("end-to-end run is complete and byte-deterministic") {
  auto dir = fixtures::scratch("pipeline-e2e");
  auto a = run_end_to_end(run_config_from_json(base_config(dir / "a"), dir));
  auto b = run_end_to_end(run_config_from_json(base_config(dir / "b"), dir));
  REQUIRE(a.exit_code == kExitOk);
  REQUIRE(b.exit_code == kExitOk);
  REQUIRE(a.report);
  CHECK(a.report->n_exchanges == 14300);
  for (const char* f : {"queries.jsonl", "exchanges.jsonl", "gold.jsonl", "findings.jsonl",
                        "findings.jsonl.meta.json", "report.json", "manifest.json", "timings.json"}) {
    CHECK_MESSAGE(fs::exists(dir / "a" / f), f);
  }
  CHECK(directory_bytes(dir / "a") == directory_bytes(dir / "b"));

  auto manifest = Json::parse(read_file(dir / "a" / "manifest.json"));
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["inputs"]["products"]["sha256"] ==
        sha256_file(fixtures::data("products.jsonl")));
  CHECK(manifest["artifacts"]["report.json"] == sha256_file(dir / "a" / "report.json"));
  CHECK(manifest["stages"].size() == 5);

  Json other = base_config(dir / "c");
  other["seed"] = 8;
  run_end_to_end(run_config_from_json(other, dir));
  CHECK(read_file(dir / "c" / "exchanges.jsonl") != read_file(dir / "a" / "exchanges.jsonl"));
}

TEST_CASE("a stage failure leaves a partial manifest and exit code 3") {
  auto dir = fixtures::scratch("pipeline-stage");
  Json j = base_config(dir / "out");
  j["detector"] = {{"tagger_url", "http://127.0.0.1:1/tag"}};
  auto r = run_end_to_end(run_config_from_json(j, dir));
  CHECK(r.exit_code == kExitStageFailure);
  CHECK(r.failed_stage == "detect");
  auto manifest = Json::parse(read_file(dir / "out" / "manifest.json"));
  CHECK(manifest["status"] == "failed");
  CHECK(manifest["failed_stage"] == "detect");
  CHECK(manifest["artifacts"].contains("exchanges.jsonl"));
  CHECK_FALSE(manifest["artifacts"].contains("findings.jsonl"));
}

TEST_CASE("invalid data inside a stage exits with 2") {
  auto dir = fixtures::scratch("pipeline-invalid");
  write_file(dir / "uses.jsonl",
             R"({"product_id": "prazosin", "indication_concept_id": "hypertension"})" "\n");
  Json j = base_config(dir / "out");
  j["uses"] = (dir / "uses.jsonl").string();
  auto r = run_end_to_end(run_config_from_json(j, dir));
  CHECK(r.exit_code == kExitValidation);
  CHECK(r.failed_stage == "gen");
}

TEST_CASE("CLI subcommands reproduce the one-shot run") {
  auto dir = fixtures::scratch("pipeline-cli");
  write_file(dir / "run.json", base_config(dir / "run").dump());
  REQUIRE(cli("--config " + (dir / "run.json").string() + " run") == 0);

  std::string kb = " --products " + fixtures::data("products.jsonl").string() +
                   " --concepts " + fixtures::data("concepts.jsonl").string();
  fs::path s = dir / "steps";
  REQUIRE(cli("--seed 7 gen" + kb + " --templates " + fixtures::data("templates.txt").string() +
              " --uses " + fixtures::data("uses.jsonl").string() + " --out " +
              (s / "queries.jsonl").string()) == 0);
  REQUIRE(cli("--seed 7 query" + kb + " --in " + (s / "queries.jsonl").string() +
              " --model mock --plant-rate 0.15 --out " + (s / "exchanges.jsonl").string()) == 0);
  REQUIRE(cli("detect" + kb + " --embeddings " + fixtures::data("embeddings.txt").string() +
              " --in " + (s / "exchanges.jsonl").string() + " --out " +
              (s / "findings.jsonl").string()) == 0);
  REQUIRE(cli("eval --findings " + (s / "findings.jsonl").string() + " --gold " +
              (s / "gold.jsonl").string() + " --exchanges " + (s / "exchanges.jsonl").string() +
              " --out " + (s / "report.json").string()) == 0);
  for (const char* f : {"queries.jsonl", "exchanges.jsonl", "gold.jsonl", "findings.jsonl",
                        "findings.jsonl.meta.json", "report.json"}) {
    CHECK_MESSAGE(read_file(dir / "run" / f) == read_file(s / f), f);
  }
}

TEST_CASE("CLI exit codes") {
  std::string kb = " --products " + fixtures::sample("products.jsonl").string() +
                   " --concepts " + fixtures::sample("concepts.jsonl").string();
  CHECK(cli("db validate" + kb) == 0);
  CHECK(cli("db validate --products " + fixtures::sample("products.jsonl").string() +
            " --concepts " + fixtures::sample("uses.jsonl").string()) == 2);
  CHECK(cli("db validate --products /nonexistent --concepts /nonexistent") == 2);
  CHECK(cli("gen --no-such-flag") == 2);
  CHECK(cli("") == 2);
  CHECK(cli("run") == 2);

  auto dir = fixtures::scratch("pipeline-cli-codes");
  Json j = base_config(dir / "out");
  j["detector"] = {{"classifier_url", "http://127.0.0.1:1/classify"}};
  write_file(dir / "run.json", j.dump());
  CHECK(cli("--config " + (dir / "run.json").string() + " run") == 3);
}
