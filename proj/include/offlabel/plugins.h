#pragma once

#include <chrono>
#include <string>

#include "offlabel/detector.h"
#include "offlabel/http_util.h"
#include "offlabel/ner.h"

// HTTP adapters for external taggers and recommendation classifiers.
//
// Tagger:     POST {"text"} -> {"mentions": [{"start", "end", "class"}]}
// Classifier: POST {"text", "product", "indication"}
//             -> {"is_recommendation": bool, "cue": string|null}
//
// Transport failures and malformed replies throw Error; a detector run using
// a plug-in therefore fails as a whole rather than silently degrading.

namespace offlabel {

class HttpTagger : public Tagger {
 public:
  explicit HttpTagger(std::string url,
                      std::chrono::milliseconds timeout = std::chrono::milliseconds(10000));

  std::vector<EntityMention> tag(std::string_view text,
                                 TextSource source) const override;

  const std::string& url() const { return raw_url_; }

 private:
  std::string raw_url_;
  Url url_;
  std::chrono::milliseconds timeout_;
};

class HttpClassifier : public RecommendationClassifier {
 public:
  explicit HttpClassifier(std::string url,
                          std::chrono::milliseconds timeout = std::chrono::milliseconds(10000));

  RecommendationVerdict classify(std::string_view sentence,
                                 const EntityMention& product,
                                 const EntityMention& disease) const override;

  const std::string& url() const { return raw_url_; }

 private:
  std::string raw_url_;
  Url url_;
  std::chrono::milliseconds timeout_;
};

}  // namespace offlabel
