#pragma once

#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "offlabel/exchange.h"
#include "offlabel/labeldb.h"
#include "offlabel/linker.h"
#include "offlabel/ner.h"
#include "offlabel/normalizer.h"

// Off-label identification: sentence-level pairing of linked products and
// indications, filtered against the approved set and classified as
// recommendation or not.

namespace offlabel {

struct Sentence {
  std::string text;
  Span span;  // into the source text

  bool operator==(const Sentence&) const = default;
};

// Splits after '.', '!' or '?' (plus trailing closing quotes/brackets) when
// followed by whitespace or end of text. Tokens like "e.g." or "mg." never end
// a sentence. Spans are trimmed and cover all non-whitespace content.
std::vector<Sentence> split_sentences(std::string_view text);

// Recommendation cues and negation/disclaimer cues, stored folded.
class CueLexicon {
 public:
  static CueLexicon defaults();
  // One phrase per line, '#' starts a comment line.
  static std::vector<std::string> parse_list(std::istream& in);
  static CueLexicon load(const std::filesystem::path& cues_path,
                         const std::filesystem::path& negations_path);
  static CueLexicon from_lists(std::vector<std::string> cues,
                               std::vector<std::string> negations);

  const std::vector<std::string>& cues() const { return cues_; }
  const std::vector<std::string>& negations() const { return negations_; }
  std::string fingerprint() const;

 private:
  std::vector<std::string> cues_;
  std::vector<std::string> negations_;
};

enum class ClassifierKind { kRule, kExternal };

std::string_view to_string(ClassifierKind k);

struct RecommendationVerdict {
  bool is_recommendation = false;
  std::optional<std::string> cue;
  bool negated = false;
  ClassifierKind classifier = ClassifierKind::kRule;

  bool operator==(const RecommendationVerdict&) const = default;
};

class RecommendationClassifier {
 public:
  virtual ~RecommendationClassifier() = default;
  virtual RecommendationVerdict classify(std::string_view sentence,
                                         const EntityMention& product,
                                         const EntityMention& disease) const = 0;
};

// A cue must lie between the two mentions; any negation cue anywhere in the
// sentence suppresses the recommendation.
class RuleClassifier : public RecommendationClassifier {
 public:
  explicit RuleClassifier(CueLexicon lexicon = CueLexicon::defaults())
      : lexicon_(std::move(lexicon)) {}

  RecommendationVerdict classify(std::string_view sentence,
                                 const EntityMention& product,
                                 const EntityMention& disease) const override;

 private:
  CueLexicon lexicon_;
};

RecommendationVerdict classify_recommendation(
    std::string_view sentence, const EntityMention& product_mention,
    const EntityMention& disease_mention,
    const CueLexicon& lexicon = CueLexicon::defaults());

struct OffLabelFinding {
  std::string query_id;
  std::string product_id;
  std::string indication_concept_id;
  std::string sentence;
  Span sentence_span;
  RecommendationVerdict verdict;
  double link_score = 0.0;

  bool operator==(const OffLabelFinding&) const = default;
};

Json to_json(const OffLabelFinding& f);
OffLabelFinding finding_from_json(const Json& j, const std::string& file,
                                  std::size_t line);
std::vector<OffLabelFinding> read_findings(const std::filesystem::path& path);
void write_findings(const std::filesystem::path& path,
                    const std::vector<OffLabelFinding>& findings);

struct DetectorConfig {
  double tau = kDefaultTau;
  int max_edit = 1;
  bool correct_responses = true;
  bool fuzzy = false;
  int fuzzy_max_edit = 1;
  CueLexicon lexicon = CueLexicon::defaults();
  // Optional plug-ins replacing the dictionary tagger / rule classifier.
  std::shared_ptr<const Tagger> external_tagger;
  std::shared_ptr<const RecommendationClassifier> external_classifier;
};

// Spelling correction applied to a response, located in the original text.
struct ResponseCorrection {
  std::string query_id;
  Correction correction;  // offset into response_text
};

class Detector {
 public:
  // `db`, `index` and `table` must outlive the detector. `table` may be null.
  Detector(const ProductDatabase& db, const AliasIndex& index,
           const EmbeddingTable* table, DetectorConfig config);

  // Failed exchanges yield no findings. Throws UnknownIdError when the
  // exchange names a product missing from the database.
  std::vector<OffLabelFinding> detect(
      const ModelExchange& exchange,
      std::vector<ResponseCorrection>* corrections = nullptr) const;

  // Hash of every parameter that influences detection output.
  const std::string& fingerprint() const { return fingerprint_; }
  const DetectorConfig& config() const { return config_; }

 private:
  const ProductDatabase& db_;
  const EmbeddingTable* table_;
  DetectorConfig config_;
  SpellLexicon lexicon_;
  DictionaryTagger dictionary_;
  FuzzyMatcher fuzzy_;
  Linker linker_;
  RuleClassifier rules_;
  std::string fingerprint_;
};

std::vector<OffLabelFinding> detect_off_label(const ModelExchange& exchange,
                                              const ProductDatabase& db,
                                              const AliasIndex& index,
                                              const EmbeddingTable* table,
                                              const DetectorConfig& config);

// Runs the detector over a corpus with `threads` workers (0 = hardware
// concurrency). Findings come back sorted by query_id, stable within a query.
std::vector<OffLabelFinding> detect_corpus(
    const Detector& detector, const std::vector<ModelExchange>& exchanges,
    unsigned threads = 0, std::vector<ResponseCorrection>* corrections = nullptr);

}  // namespace offlabel
