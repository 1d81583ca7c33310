#include "offlabel/redteam.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>

#include "offlabel/error.h"
#include "offlabel/hashing.h"
#include "offlabel/text.h"

namespace offlabel {
namespace {

std::size_t count_occurrences(std::string_view s, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string_view::npos;
       pos = s.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

void replace_once(std::string& s, std::string_view needle,
                  const std::string& value) {
  auto pos = s.find(needle);
  if (pos != std::string::npos) s.replace(pos, needle.size(), value);
}

std::string pick_surface(const std::string& name,
                         const std::vector<std::string>& aliases,
                         bool use_aliases, std::uint64_t seed,
                         const std::string& query_id, std::uint64_t stream) {
  if (!use_aliases || aliases.empty()) return name;
  StableRng rng(seed, query_id, stream);
  std::size_t k = static_cast<std::size_t>(rng.below(aliases.size() + 1));
  return k == 0 ? name : aliases[k - 1];
}

}  // namespace

std::vector<QueryTemplate> parse_templates(std::istream& in,
                                           const std::string& name) {
  std::vector<QueryTemplate> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = collapse_whitespace(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    for (auto ph : {kProductPlaceholder, kIndicationPlaceholder}) {
      std::size_t n = count_occurrences(trimmed, ph);
      if (n == 0) {
        throw LoadError(name, line_no,
                        "missing placeholder " + std::string(ph));
      }
      if (n > 1) {
        throw LoadError(name, line_no,
                        "placeholder " + std::string(ph) +
                            " appears more than once");
      }
    }
    std::string rest = trimmed;
    replace_once(rest, kProductPlaceholder, "");
    replace_once(rest, kIndicationPlaceholder, "");
    auto open = rest.find('{');
    if (open != std::string::npos && rest.find('}', open) != std::string::npos) {
      throw LoadError(name, line_no, "unknown placeholder in template");
    }
    out.push_back({out.size() + 1, trimmed});
  }
  if (out.empty()) throw ValidationError("template file " + name + " is empty");
  return out;
}

std::vector<QueryTemplate> load_templates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return parse_templates(in, path.string());
}

std::vector<OffLabelUse> validate_uses(const std::filesystem::path& path,
                                       const ProductDatabase& db,
                                       std::vector<std::string>* warnings) {
  std::vector<OffLabelUse> out;
  std::set<std::pair<std::string, std::string>> seen;
  const std::string file = path.string();
  for_each_jsonl(path, [&](std::size_t line, const Json& j) {
    OffLabelUse use{require_string(j, "product_id", file, line),
                    require_string(j, "indication_concept_id", file, line)};
    if (!db.find_product(use.product_id)) {
      throw LoadError(file, line, "unknown product '" + use.product_id + "'");
    }
    if (!db.find_concept(use.indication_concept_id)) {
      throw LoadError(file, line,
                      "unknown indication '" + use.indication_concept_id + "'");
    }
    if (db.is_approved(use.product_id, use.indication_concept_id)) {
      throw LoadError(file, line,
                      "(" + use.product_id + ", " + use.indication_concept_id +
                          ") is an approved indication, not off-label");
    }
    if (!seen.insert({use.product_id, use.indication_concept_id}).second) {
      throw LoadError(file, line,
                      "duplicate use (" + use.product_id + ", " +
                          use.indication_concept_id + ")");
    }
    out.push_back(std::move(use));
  });
  if (out.empty() && warnings) {
    warnings->push_back("uses file " + file + " contains no pairs");
  }
  return out;
}

std::string make_query_id(std::size_t template_id, std::size_t use_index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "t%03zu-u%03zu", template_id, use_index);
  return buf;
}

std::optional<std::pair<std::size_t, std::size_t>> parse_query_id(
    std::string_view id) {
  auto dash = id.find("-u");
  if (id.size() < 2 || id[0] != 't' || dash == std::string_view::npos) {
    return std::nullopt;
  }
  std::size_t t = 0, u = 0;
  auto tpart = id.substr(1, dash - 1);
  auto upart = id.substr(dash + 2);
  if (tpart.empty() || upart.empty()) return std::nullopt;
  auto r1 = std::from_chars(tpart.data(), tpart.data() + tpart.size(), t);
  auto r2 = std::from_chars(upart.data(), upart.data() + upart.size(), u);
  if (r1.ec != std::errc{} || r1.ptr != tpart.data() + tpart.size() ||
      r2.ec != std::errc{} || r2.ptr != upart.data() + upart.size()) {
    return std::nullopt;
  }
  // Only the canonical spelling maps back, keeping the mapping one-to-one.
  if (make_query_id(t, u) != id) return std::nullopt;
  return std::make_pair(t, u);
}

std::vector<SyntheticQuery> expand_templates(
    const std::vector<QueryTemplate>& templates,
    const std::vector<OffLabelUse>& uses, const ProductDatabase& db,
    const ExpansionOptions& options) {
  std::vector<SyntheticQuery> out;
  out.reserve(templates.size() * uses.size());
  for (const auto& t : templates) {
    for (std::size_t u = 0; u < uses.size(); ++u) {
      const auto& product = db.product(uses[u].product_id);
      const auto& indication = db.concept_by_id(uses[u].indication_concept_id);
      SyntheticQuery q;
      q.query_id = make_query_id(t.template_id, u + 1);
      q.product_id = product.product_id;
      q.indication_concept_id = indication.concept_id;
      q.label_text = product.label_text;
      q.text = t.pattern;
      replace_once(q.text, kProductPlaceholder,
                   pick_surface(product.name, product.aliases,
                                options.use_aliases, options.seed, q.query_id, 1));
      replace_once(q.text, kIndicationPlaceholder,
                   pick_surface(indication.preferred_name, indication.aliases,
                                options.use_aliases, options.seed, q.query_id, 2));
      out.push_back(std::move(q));
    }
  }
  return out;
}

Json to_json(const SyntheticQuery& q) {
  Json j;
  j["query_id"] = q.query_id;
  j["text"] = q.text;
  j["product_id"] = q.product_id;
  j["indication_concept_id"] = q.indication_concept_id;
  j["label_text"] = q.label_text;
  return j;
}

SyntheticQuery query_from_json(const Json& j, const std::string& file,
                               std::size_t line) {
  return {require_string(j, "query_id", file, line),
          require_string(j, "text", file, line),
          require_string(j, "product_id", file, line),
          require_string(j, "indication_concept_id", file, line),
          require_string(j, "label_text", file, line)};
}

std::vector<SyntheticQuery> read_queries(const std::filesystem::path& path) {
  std::vector<SyntheticQuery> out;
  std::set<std::string> ids;
  const std::string file = path.string();
  for_each_jsonl(path, [&](std::size_t line, const Json& j) {
    auto q = query_from_json(j, file, line);
    if (!ids.insert(q.query_id).second) {
      throw LoadError(file, line, "duplicate query_id '" + q.query_id + "'");
    }
    out.push_back(std::move(q));
  });
  return out;
}

void write_queries(const std::filesystem::path& path,
                   const std::vector<SyntheticQuery>& queries) {
  JsonlWriter w(path);
  for (const auto& q : queries) w.write(to_json(q));
  w.close();
}

}  // namespace offlabel
