#include "offlabel/plugins.h"

#include "offlabel/error.h"
#include "offlabel/jsonl.h"

namespace offlabel {
namespace {

Json call(const Url& url, const Json& payload, std::chrono::milliseconds timeout,
          const std::string& what) {
  HttpResult res = post_json(url, payload.dump(), {}, timeout);
  if (!res.transport_ok) {
    throw Error(what + " unreachable: " + res.error);
  }
  if (res.status < 200 || res.status >= 300) {
    throw Error(what + " returned HTTP " + std::to_string(res.status));
  }
  Json reply = Json::parse(res.body, nullptr, false);
  if (!reply.is_object()) throw Error(what + " returned a non-object reply");
  return reply;
}

}  // namespace

HttpTagger::HttpTagger(std::string url, std::chrono::milliseconds timeout)
    : raw_url_(std::move(url)), url_(parse_url(raw_url_)), timeout_(timeout) {}

std::vector<EntityMention> HttpTagger::tag(std::string_view text,
                                           TextSource source) const {
  Json payload;
  payload["text"] = std::string(text);
  Json reply = call(url_, payload, timeout_, "tagger");
  auto it = reply.find("mentions");
  if (it == reply.end() || !it->is_array()) {
    throw Error("tagger reply lacks a 'mentions' array");
  }
  std::vector<EntityMention> out;
  for (const auto& m : *it) {
    if (!m.is_object() || !m.contains("start") || !m.contains("end") ||
        !m["start"].is_number_unsigned() || !m["end"].is_number_unsigned() ||
        !m.contains("class") || !m["class"].is_string()) {
      throw Error("tagger returned a malformed mention");
    }
    auto start = m["start"].get<std::size_t>();
    auto end = m["end"].get<std::size_t>();
    if (start >= end || end > text.size()) {
      throw Error("tagger returned span [" + std::to_string(start) + ", " +
                  std::to_string(end) + ") outside the text");
    }
    std::string cls = m["class"].get<std::string>();
    EntityMention mention;
    mention.span = {start, end};
    mention.surface = std::string(text.substr(start, end - start));
    if (cls == "drug") mention.entity_class = EntityClass::kDrug;
    else if (cls == "disease") mention.entity_class = EntityClass::kDisease;
    else throw Error("tagger returned unknown class '" + cls + "'");
    mention.source = source;
    mention.kind = MatchKind::kExternal;
    out.push_back(std::move(mention));
  }
  return resolve_overlaps(std::move(out));
}

HttpClassifier::HttpClassifier(std::string url, std::chrono::milliseconds timeout)
    : raw_url_(std::move(url)), url_(parse_url(raw_url_)), timeout_(timeout) {}

RecommendationVerdict HttpClassifier::classify(
    std::string_view sentence, const EntityMention& product,
    const EntityMention& disease) const {
  Json payload;
  payload["text"] = std::string(sentence);
  payload["product"] = product.surface;
  payload["indication"] = disease.surface;
  Json reply = call(url_, payload, timeout_, "classifier");
  auto rec = reply.find("is_recommendation");
  if (rec == reply.end() || !rec->is_boolean()) {
    throw Error("classifier reply lacks a boolean 'is_recommendation'");
  }
  RecommendationVerdict v;
  v.is_recommendation = rec->get<bool>();
  v.classifier = ClassifierKind::kExternal;
  auto cue = reply.find("cue");
  if (cue != reply.end() && cue->is_string()) v.cue = cue->get<std::string>();
  return v;
}

}  // namespace offlabel
