#include <random>

#include "doctest.h"
#include "fixtures.h"
#include "offlabel/error.h"
#include "offlabel/evalharness.h"
#include "oracle.h"

using namespace offlabel;

namespace {

OffLabelFinding finding(const std::string& q, const std::string& p, const std::string& c) {
  OffLabelFinding f;
  f.query_id = q;
  f.product_id = p;
  f.indication_concept_id = c;
  return f;
}

GoldLabel positive(const std::string& q, const std::string& p, const std::string& c) {
  return {q, true, p, c, Perturbation::kNone};
}

ModelExchange exchange(const std::string& q, bool failed = false) {
  return {q, "", "p", "", failed ? "" : "text", "m", failed};
}

}  // namespace

TEST_CASE("compare examples") {
  std::vector<OffLabelFinding> f = {finding("q1", "p", "a"), finding("q2", "p", "b"),
                                    finding("q3", "p", "c")};
  std::vector<GoldLabel> g = {positive("q1", "p", "a"), positive("q2", "p", "b"),
                              positive("q3", "p", "c")};
  CHECK(compare(f, g) == ConfusionCounts{3, 0, 0});

  std::vector<GoldLabel> five;
  for (int i = 0; i < 5; ++i) five.push_back(positive("q" + std::to_string(i), "p", "x"));
  CHECK(compare({}, five) == ConfusionCounts{0, 0, 5});

  // {A,B,C,D} vs {A,B,E}: the set-arithmetic oracle gives 2/2/1.
  std::vector<OffLabelFinding> abcd = {finding("A", "p", "x"), finding("B", "p", "x"),
                                       finding("C", "p", "x"), finding("D", "p", "x")};
  std::vector<GoldLabel> abe = {positive("A", "p", "x"), positive("B", "p", "x"),
                                positive("E", "p", "x")};
  auto o = oracle::set_compare({{"A", "p", "x"}, {"B", "p", "x"}, {"C", "p", "x"}, {"D", "p", "x"}},
                               {{"A", "p", "x"}, {"B", "p", "x"}, {"E", "p", "x"}});
  CHECK(o.tp == 2);
  CHECK(o.fp == 2);
  CHECK(o.fn == 1);
  CHECK(compare(abcd, abe) == ConfusionCounts{2, 2, 1});
}

TEST_CASE("duplicate findings count once; duplicate gold triples are errors") {
  std::vector<OffLabelFinding> f = {finding("q1", "p", "a"), finding("q1", "p", "a")};
  CHECK(compare(f, {positive("q1", "p", "a")}) == ConfusionCounts{1, 0, 0});
  CHECK_THROWS_AS(compare(f, {positive("q1", "p", "a"), positive("q1", "p", "a")}),
                  ValidationError);
  // Negative gold rows do not count as positives.
  GoldLabel neg{"q2", false, "p", std::string("a"), Perturbation::kNegated};
  CHECK(compare({finding("q2", "p", "a")}, {neg}) == ConfusionCounts{0, 1, 0});
}

TEST_CASE("metrics examples") {
  auto m = metrics({3, 1, 2});
  CHECK(m.precision == doctest::Approx(0.75));
  CHECK(m.recall == doctest::Approx(0.6));
  CHECK(std::abs(m.f1 - 0.666667) < 1e-6);
  m = metrics({0, 0, 0});
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.f1 == 0.0);
  CHECK(std::abs(f1_score(0.8575, 0.8047) - 0.8302) <= 0.0005);
  CHECK(std::abs(f1_score(0.8575, 0.8047) - 0.83025) <= 0.0005);
}

TEST_CASE("metric properties over random counts") {
  std::mt19937 rng(4);
  for (int i = 0; i < 5000; ++i) {
    ConfusionCounts c{rng() % 50, rng() % 50, rng() % 50};
    if (i % 10 == 0) c.tp = 0;
    auto m = metrics(c);
    for (double x : {m.precision, m.recall, m.f1}) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
    if (m.precision > 0 && m.recall > 0) {
      CHECK(m.f1 <= std::max(m.precision, m.recall) + 1e-15);
      CHECK(m.f1 >= std::min(m.precision, m.recall) - 1e-15);
    }
    if (c.fp == c.fn && c.tp > 0) {
      CHECK(m.precision == m.recall);
      CHECK(m.f1 == doctest::Approx(m.precision));
    }
  }
}

TEST_CASE("swapping findings and gold swaps fp and fn") {
  std::mt19937 rng(9);
  for (int i = 0; i < 300; ++i) {
    std::set<Triple> a, b;
    for (int k = rng() % 30; k > 0; --k) a.insert({"q" + std::to_string(rng() % 20), "p", "c"});
    for (int k = rng() % 30; k > 0; --k) b.insert({"q" + std::to_string(rng() % 20), "p", "c"});
    auto ab = compare_triples(a, b), ba = compare_triples(b, a);
    CHECK(ab.tp == ba.tp);
    CHECK(ab.fp == ba.fn);
    CHECK(ab.fn == ba.fp);
    auto o = oracle::set_compare(a, b);
    CHECK(ab == ConfusionCounts{o.tp, o.fp, o.fn});
  }
}

TEST_CASE("corpus statistics") {
  std::vector<ModelExchange> ex = {exchange("q1"), exchange("q2"), exchange("q3"),
                                   exchange("q4", true)};
  auto s = corpus_stats({}, ex);
  CHECK(s.off_label_response_rate == 0.0);
  CHECK(s.n_failed == 1);

  s = corpus_stats({finding("q1", "b", "x"), finding("q1", "a", "y"), finding("q2", "b", "x"),
                    finding("q3", "b", "z")},
                   ex);
  CHECK(s.off_label_response_rate == 1.0);
  CHECK(s.flagged_products == std::vector<std::string>{"a", "b"});
  CHECK(s.findings_per_product.at("b") == 3);

  s = corpus_stats({finding("q1", "b", "x")}, ex);
  CHECK(s.off_label_response_rate == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(corpus_stats({finding("q9", "b", "x")}, ex), ValidationError);
}

TEST_CASE("report serialization round-trips bit-exactly") {
  std::mt19937 rng(12);
  auto dir = fixtures::scratch("eval-report");
  for (int i = 0; i < 200; ++i) {
    EvalReport r;
    r.counts = {rng() % 1000, rng() % 1000, rng() % 1000};
    r.scores = metrics(r.counts);
    r.off_label_response_rate = std::ldexp(static_cast<double>(rng()), -32) / 3.0;
    r.flagged_products = {"a", "b"};
    r.n_exchanges = rng();
    r.n_failed = rng() % 10;
    r.config_fingerprint = "f" + std::to_string(i);
    write_report(dir / "r.json", r);
    auto back = read_report(dir / "r.json");
    CHECK(back == r);
    CHECK(render_report(back) == render_report(r));
  }
  auto j = to_json(EvalReport{});
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"tp", "fp", "fn", "precision", "recall", "f1",
                                         "off_label_response_rate", "flagged_products",
                                         "n_exchanges", "n_failed", "config_fingerprint"});
}
