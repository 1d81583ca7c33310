#include "offlabel/detector.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <utility>

#include "offlabel/error.h"
#include "offlabel/hashing.h"
#include "offlabel/text.h"

namespace offlabel {
namespace {

constexpr const char* kDefaultCues[] = {
    "can be used for",    "can be used to treat", "may be used for",
    "is effective for",   "is effective in treating", "effective for",
    "may help with",      "can help with",        "helps with",
    "help with",          "may help",             "can help",
    "treats",             "can treat",            "may treat",
    "is recommended for", "recommended for",      "works for",
    "works well for",     "is a good option for", "is a good choice for",
    "is useful for",      "is beneficial for",    "can relieve",
    "relieves",           "is often prescribed for",
};

constexpr const char* kDefaultNegations[] = {
    "not approved",       "should not",            "is not",
    "no evidence",        "off-label and unproven", "not recommended",
    "not indicated",      "not fda-approved",      "not fda approved",
    "not been approved",  "not been shown",        "not proven",
    "do not",             "does not",              "cannot",
    "can't",              "isn't",                 "unproven",
    "insufficient evidence", "lack of evidence",   "never",
};

constexpr const char* kSentenceGuards[] = {"e.g.", "i.e.", "dr.", "mg."};

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) {
  return c == '"' || c == '\'' || c == ')' || c == ']';
}

// True if the '.' at `dot` closes one of the guard abbreviations.
bool guarded_period(std::string_view text, std::size_t from, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > from && !is_space(static_cast<unsigned char>(text[begin - 1])))
    --begin;
  while (begin < dot && !is_word_char(static_cast<unsigned char>(text[begin])))
    ++begin;
  std::string word = ascii_fold(text.substr(begin, dot + 1 - begin));
  return std::any_of(std::begin(kSentenceGuards), std::end(kSentenceGuards),
                     [&](const char* g) { return word == g; });
}

void emit_sentence(std::string_view text, std::size_t a, std::size_t b,
                   std::vector<Sentence>& out) {
  while (a < b && is_space(static_cast<unsigned char>(text[a]))) ++a;
  while (b > a && is_space(static_cast<unsigned char>(text[b - 1]))) --b;
  if (a < b) out.push_back({std::string(text.substr(a, b - a)), {a, b}});
}

// Word-boundary-aligned occurrences of `phrase` in `folded` within [lo, hi).
std::optional<std::size_t> find_phrase(std::string_view folded,
                                       std::string_view phrase, std::size_t lo,
                                       std::size_t hi) {
  std::size_t pos = folded.find(phrase, lo);
  while (pos != std::string_view::npos && pos + phrase.size() <= hi) {
    if (on_word_boundary(folded, pos, pos + phrase.size())) return pos;
    pos = folded.find(phrase, pos + 1);
  }
  return std::nullopt;
}

std::vector<std::string> fold_all(std::vector<std::string> phrases) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto& p : phrases) {
    std::string f = fold_surface(p);
    if (!f.empty() && seen.insert(f).second) out.push_back(std::move(f));
  }
  return out;
}

std::vector<std::string> read_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return CueLexicon::parse_list(in);
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_terminator(text[j])) ++j;
    while (j < text.size() && is_closer(text[j])) ++j;
    bool at_break =
        j == text.size() || is_space(static_cast<unsigned char>(text[j]));
    if (at_break && !(text[i] == '.' && j == i + 1 &&
                      guarded_period(text, start, i))) {
      emit_sentence(text, start, j, out);
      start = j;
    }
    i = j;
  }
  emit_sentence(text, start, text.size(), out);
  return out;
}

CueLexicon CueLexicon::defaults() {
  return from_lists({std::begin(kDefaultCues), std::end(kDefaultCues)},
                    {std::begin(kDefaultNegations), std::end(kDefaultNegations)});
}

std::vector<std::string> CueLexicon::parse_list(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string trimmed = collapse_whitespace(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    out.push_back(trimmed);
  }
  return out;
}

CueLexicon CueLexicon::load(const std::filesystem::path& cues_path,
                            const std::filesystem::path& negations_path) {
  auto lex = from_lists(read_list(cues_path), read_list(negations_path));
  if (lex.cues_.empty()) {
    throw ValidationError("cue lexicon " + cues_path.string() + " is empty");
  }
  return lex;
}

CueLexicon CueLexicon::from_lists(std::vector<std::string> cues,
                                  std::vector<std::string> negations) {
  CueLexicon lex;
  lex.cues_ = fold_all(std::move(cues));
  lex.negations_ = fold_all(std::move(negations));
  return lex;
}

std::string CueLexicon::fingerprint() const {
  std::string canon = "cues\n";
  for (const auto& c : cues_) canon += c + "\n";
  canon += "negations\n";
  for (const auto& n : negations_) canon += n + "\n";
  return sha256_hex(canon);
}

std::string_view to_string(ClassifierKind k) {
  return k == ClassifierKind::kRule ? "rule" : "external";
}

RecommendationVerdict RuleClassifier::classify(
    std::string_view sentence, const EntityMention& product,
    const EntityMention& disease) const {
  RecommendationVerdict verdict;
  const std::string folded = ascii_fold(sentence);
  const EntityMention& first =
      product.span.start <= disease.span.start ? product : disease;
  const EntityMention& second = &first == &product ? disease : product;

  if (first.span.end <= second.span.start) {
    std::optional<std::size_t> best_pos;
    const std::string* best = nullptr;
    for (const auto& cue : lexicon_.cues()) {
      auto pos = find_phrase(folded, cue, first.span.end, second.span.start);
      if (!pos) continue;
      if (!best || cue.size() > best->size() ||
          (cue.size() == best->size() && *pos < *best_pos)) {
        best = &cue;
        best_pos = pos;
      }
    }
    if (best) verdict.cue = *best;
  }
  for (const auto& neg : lexicon_.negations()) {
    if (find_phrase(folded, neg, 0, folded.size())) {
      verdict.negated = true;
      break;
    }
  }
  verdict.is_recommendation = verdict.cue.has_value() && !verdict.negated;
  return verdict;
}

RecommendationVerdict classify_recommendation(
    std::string_view sentence, const EntityMention& product_mention,
    const EntityMention& disease_mention, const CueLexicon& lexicon) {
  return RuleClassifier(lexicon).classify(sentence, product_mention,
                                          disease_mention);
}

Json to_json(const OffLabelFinding& f) {
  Json j;
  j["query_id"] = f.query_id;
  j["product_id"] = f.product_id;
  j["indication_concept_id"] = f.indication_concept_id;
  j["sentence"] = f.sentence;
  j["sentence_start"] = f.sentence_span.start;
  j["sentence_end"] = f.sentence_span.end;
  j["cue"] = f.verdict.cue ? Json(*f.verdict.cue) : Json(nullptr);
  j["link_score"] = f.link_score;
  j["classifier"] = std::string(to_string(f.verdict.classifier));
  return j;
}

OffLabelFinding finding_from_json(const Json& j, const std::string& file,
                                  std::size_t line) {
  OffLabelFinding f;
  f.query_id = require_string(j, "query_id", file, line);
  f.product_id = require_string(j, "product_id", file, line);
  f.indication_concept_id =
      require_string(j, "indication_concept_id", file, line);
  f.sentence = require_string(j, "sentence", file, line);
  auto get_size = [&](const char* field) -> std::size_t {
    auto it = j.find(field);
    if (it == j.end() || !it->is_number_unsigned()) {
      throw LoadError(file, line,
                      std::string("field '") + field +
                          "' must be a non-negative integer");
    }
    return it->get<std::size_t>();
  };
  f.sentence_span = {get_size("sentence_start"), get_size("sentence_end")};
  if (f.sentence_span.end < f.sentence_span.start) {
    throw LoadError(file, line, "sentence_end precedes sentence_start");
  }
  auto cue = j.find("cue");
  if (cue != j.end() && cue->is_string()) f.verdict.cue = cue->get<std::string>();
  auto score = j.find("link_score");
  if (score == j.end() || !score->is_number()) {
    throw LoadError(file, line, "field 'link_score' must be a number");
  }
  f.link_score = score->get<double>();
  std::string cls = require_string(j, "classifier", file, line);
  if (cls != "rule" && cls != "external") {
    throw LoadError(file, line, "classifier must be 'rule' or 'external'");
  }
  f.verdict.classifier =
      cls == "rule" ? ClassifierKind::kRule : ClassifierKind::kExternal;
  f.verdict.is_recommendation = true;
  return f;
}

std::vector<OffLabelFinding> read_findings(const std::filesystem::path& path) {
  std::vector<OffLabelFinding> out;
  const std::string file = path.string();
  for_each_jsonl(path, [&](std::size_t line, const Json& j) {
    out.push_back(finding_from_json(j, file, line));
  });
  return out;
}

void write_findings(const std::filesystem::path& path,
                    const std::vector<OffLabelFinding>& findings) {
  JsonlWriter w(path);
  for (const auto& f : findings) w.write(to_json(f));
  w.close();
}

Detector::Detector(const ProductDatabase& db, const AliasIndex& index,
                   const EmbeddingTable* table, DetectorConfig config)
    : db_(db),
      table_(table),
      config_(std::move(config)),
      lexicon_(index),
      dictionary_(index),
      fuzzy_(index),
      linker_(db, table, LinkerOptions{config_.tau, kStringFallbackThreshold}),
      rules_(config_.lexicon) {
  if (config_.max_edit < 0 || config_.max_edit > kMaxSupportedEdit) {
    throw ValidationError("max_edit must be 0, 1 or 2");
  }
  if (config_.fuzzy_max_edit < 1 || config_.fuzzy_max_edit > 2) {
    throw ValidationError("fuzzy max_edit must be 1 or 2");
  }
  Json canon;
  canon["tau"] = config_.tau;
  canon["max_edit"] = config_.max_edit;
  canon["correct_responses"] = config_.correct_responses;
  canon["fuzzy"] = config_.fuzzy;
  canon["fuzzy_max_edit"] = config_.fuzzy_max_edit;
  canon["string_threshold"] = kStringFallbackThreshold;
  canon["lexicon"] = config_.lexicon.fingerprint();
  canon["embeddings"] = table_ ? Json(table_->fingerprint()) : Json(nullptr);
  canon["tagger"] = config_.external_tagger ? "external" : "dictionary";
  canon["classifier"] = config_.external_classifier ? "external" : "rule";
  fingerprint_ = sha256_hex(canon.dump());
}

std::vector<OffLabelFinding> Detector::detect(
    const ModelExchange& exchange,
    std::vector<ResponseCorrection>* corrections) const {
  db_.product(exchange.product_id);
  std::vector<OffLabelFinding> findings;
  if (exchange.failed) return findings;

  const RecommendationClassifier& classifier =
      config_.external_classifier ? *config_.external_classifier
                                  : static_cast<const RecommendationClassifier&>(rules_);

  for (const auto& sentence : split_sentences(exchange.response_text)) {
    NormalizedText norm;
    if (config_.correct_responses) {
      norm = correct_spelling(sentence.text, lexicon_, config_.max_edit);
    } else {
      norm.text = normalize_text(sentence.text);
    }
    const std::string& text = norm.text;

    if (corrections && !norm.corrections.empty()) {
      // Whitespace tokens correspond one-to-one between the original and the
      // normalized sentence, so corrections map back token by token.
      auto orig_tokens = whitespace_tokens(sentence.text);
      auto norm_tokens = whitespace_tokens(normalize_text(sentence.text));
      for (const auto& c : norm.corrections) {
        std::size_t offset = sentence.span.start;
        for (std::size_t t = 0; t < norm_tokens.size() && t < orig_tokens.size(); ++t) {
          if (norm_tokens[t].span.start <= c.offset && c.offset < norm_tokens[t].span.end) {
            offset += orig_tokens[t].span.start + (c.offset - norm_tokens[t].span.start);
            break;
          }
        }
        corrections->push_back({exchange.query_id, {c.original, c.corrected, offset}});
      }
    }

    auto mentions = config_.external_tagger
                        ? config_.external_tagger->tag(text, TextSource::kResponse)
                        : dictionary_.tag(text, TextSource::kResponse);
    if (config_.fuzzy) {
      auto extra = fuzzy_.tag(text, mentions, config_.fuzzy_max_edit,
                              TextSource::kResponse);
      mentions.insert(mentions.end(), extra.begin(), extra.end());
      mentions = resolve_overlaps(std::move(mentions));
    }

    std::vector<LinkedEntity> products, diseases;
    for (const auto& m : mentions) {
      auto linked = linker_.link(m);
      if (!linked) continue;
      (m.entity_class == EntityClass::kDrug ? products : diseases)
          .push_back(std::move(*linked));
    }

    std::set<std::pair<std::string, std::string>> emitted;
    for (const auto& p : products) {
      for (const auto& d : diseases) {
        if (db_.is_approved(p.canonical_id, d.canonical_id)) continue;
        if (emitted.count({p.canonical_id, d.canonical_id})) continue;
        auto verdict = classifier.classify(text, p.mention, d.mention);
        if (!verdict.is_recommendation) continue;
        emitted.insert({p.canonical_id, d.canonical_id});
        findings.push_back({exchange.query_id, p.canonical_id, d.canonical_id,
                            sentence.text, sentence.span, std::move(verdict),
                            d.score});
      }
    }
  }
  return findings;
}

std::vector<OffLabelFinding> detect_off_label(const ModelExchange& exchange,
                                              const ProductDatabase& db,
                                              const AliasIndex& index,
                                              const EmbeddingTable* table,
                                              const DetectorConfig& config) {
  return Detector(db, index, table, config).detect(exchange);
}

std::vector<OffLabelFinding> detect_corpus(
    const Detector& detector, const std::vector<ModelExchange>& exchanges,
    unsigned threads, std::vector<ResponseCorrection>* corrections) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(1, exchanges.size()));

  std::vector<std::vector<OffLabelFinding>> per_exchange(exchanges.size());
  std::vector<std::vector<ResponseCorrection>> per_corrections(
      corrections ? exchanges.size() : 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= exchanges.size()) return;
      try {
        per_exchange[i] = detector.detect(
            exchanges[i], corrections ? &per_corrections[i] : nullptr);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = exchanges.size();
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<OffLabelFinding> out;
  for (auto& v : per_exchange) {
    std::move(v.begin(), v.end(), std::back_inserter(out));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const OffLabelFinding& a, const OffLabelFinding& b) {
                     return a.query_id < b.query_id;
                   });
  if (corrections) {
    for (auto& v : per_corrections) {
      std::move(v.begin(), v.end(), std::back_inserter(*corrections));
    }
  }
  return out;
}

}  // namespace offlabel
