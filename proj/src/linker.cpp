#include "offlabel/linker.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "offlabel/error.h"
#include "offlabel/hashing.h"
#include "offlabel/text.h"

namespace offlabel {
namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct Best {
  const std::string* id = nullptr;
  double score = -2.0;

  void offer(const std::string& cand_id, double s) {
    if (!id || s > score || (s == score && cand_id < *id)) {
      id = &cand_id;
      score = s;
    }
  }
};

}  // namespace

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return parse(in, path.string());
}

EmbeddingTable EmbeddingTable::parse(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw LoadError(name, 1, "missing header");
  std::istringstream header(line);
  std::size_t count = 0, dim = 0;
  if (!(header >> count >> dim) || dim == 0) {
    throw LoadError(name, 1, "header must be '<count> <dimension>'");
  }
  std::map<std::string, Vector> vectors;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::string token;
    row >> token;
    Vector v;
    std::string field;
    while (row >> field) {
      char* end = nullptr;
      double x = std::strtod(field.c_str(), &end);
      if (end != field.c_str() + field.size() || !std::isfinite(x)) {
        throw LoadError(name, line_no, "bad component '" + field + "'");
      }
      v.push_back(x);
    }
    if (v.size() != dim) {
      throw LoadError(name, line_no,
                      "expected " + std::to_string(dim) + " components, got " +
                          std::to_string(v.size()));
    }
    if (norm(v) == 0.0) {
      throw LoadError(name, line_no, "zero vector for '" + token + "'");
    }
    if (!vectors.emplace(ascii_fold(token), std::move(v)).second) {
      throw LoadError(name, line_no, "duplicate token '" + token + "'");
    }
  }
  if (vectors.size() != count) {
    throw LoadError(name, line_no,
                    "header declares " + std::to_string(count) +
                        " vectors, found " + std::to_string(vectors.size()));
  }
  return from_vectors(dim, std::move(vectors));
}

EmbeddingTable EmbeddingTable::from_vectors(std::size_t dimension,
                                            std::map<std::string, Vector> vectors) {
  if (dimension == 0) throw ValidationError("embedding dimension must be > 0");
  if (vectors.empty()) throw ValidationError("embedding table is empty");
  EmbeddingTable table;
  table.dimension_ = dimension;
  std::ostringstream canon;
  canon.precision(17);
  for (auto& [token, v] : vectors) {
    if (v.size() != dimension) {
      throw ValidationError("vector for '" + token + "' has wrong dimension");
    }
    for (double x : v) {
      if (!std::isfinite(x)) {
        throw ValidationError("non-finite component for '" + token + "'");
      }
    }
    if (norm(v) == 0.0) {
      throw ValidationError("zero vector for '" + token + "'");
    }
    canon << token;
    for (double x : v) canon << ' ' << x;
    canon << '\n';
    table.vectors_.emplace(token, std::move(v));
  }
  table.fingerprint_ = sha256_hex(canon.str());
  return table;
}

const Vector* EmbeddingTable::find(std::string_view folded_token) const {
  auto it = vectors_.find(folded_token);
  return it == vectors_.end() ? nullptr : &it->second;
}

std::optional<Vector> embed_phrase(std::string_view phrase,
                                   const EmbeddingTable& table) {
  Vector sum(table.dimension(), 0.0);
  std::size_t n = 0;
  for (const auto& tok : alnum_tokens(phrase)) {
    const Vector* v = table.find(tok);
    if (!v) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
    ++n;
  }
  if (n == 0) return std::nullopt;
  for (double& x : sum) x /= static_cast<double>(n);
  return sum;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine of vectors with different dimensions");
  }
  double nu = norm(u), nv = norm(v);
  if (nu == 0.0 || nv == 0.0) {
    throw UndefinedSimilarityError("cosine undefined for a zero-norm vector");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  double c = dot / (nu * nv);
  return std::clamp(c, -1.0, 1.0);
}

double string_similarity(std::string_view a, std::string_view b) {
  std::string fa = fold_surface(a), fb = fold_surface(b);
  std::size_t longest = std::max(fa.size(), fb.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(fa, fb)) /
                   static_cast<double>(longest);
}

std::string_view to_string(LinkMethod m) {
  switch (m) {
    case LinkMethod::kExact: return "exact";
    case LinkMethod::kEmbedding: return "embedding";
    case LinkMethod::kString: return "string";
  }
  return "exact";
}

Linker::Linker(const ProductDatabase& db, const EmbeddingTable* table,
               LinkerOptions options)
    : table_(table), options_(options) {
  if (!(options_.tau > 0.0 && options_.tau <= 1.0)) {
    throw ValidationError("tau must be in (0, 1]");
  }
  auto add = [&](std::vector<Candidate>& out, const std::string& id,
                 std::string_view surface) {
    Candidate c{id, fold_surface(surface), std::nullopt};
    if (table_) c.vector = embed_phrase(c.surface, *table_);
    out.push_back(std::move(c));
  };
  for (const auto& [id, p] : db.products()) {
    add(drugs_, id, p.name);
    for (const auto& a : p.aliases) add(drugs_, id, a);
  }
  for (const auto& [id, c] : db.concepts()) {
    add(diseases_, id, c.preferred_name);
    for (const auto& a : c.aliases) add(diseases_, id, a);
  }
}

std::optional<LinkedEntity> Linker::link(const EntityMention& mention) const {
  const auto& pool = candidates(mention.entity_class);
  const std::string key = fold_surface(mention.surface);

  for (const auto& c : pool) {
    if (c.surface == key) {
      return LinkedEntity{mention, c.canonical_id, 1.0, LinkMethod::kExact};
    }
  }

  // A phrase with a token missing from the table (typically a typo) is
  // matched on spelling first; its embedding would silently drop that token.
  bool covered = false;
  if (table_) {
    covered = true;
    for (const auto& tok : alnum_tokens(key)) covered = covered && table_->find(tok);
  }
  if (!covered) {
    Best best;
    for (const auto& c : pool) {
      best.offer(c.canonical_id, string_similarity(key, c.surface));
    }
    if (best.id && best.score >= options_.string_threshold) {
      return LinkedEntity{mention, *best.id, best.score, LinkMethod::kString};
    }
  }

  std::optional<Vector> query;
  if (table_) query = embed_phrase(key, *table_);
  if (query) {
    Best best;
    for (const auto& c : pool) {
      if (!c.vector) continue;
      best.offer(c.canonical_id, cosine(*query, *c.vector));
    }
    if (best.id && best.score >= options_.tau) {
      return LinkedEntity{mention, *best.id, best.score, LinkMethod::kEmbedding};
    }
  }
  return std::nullopt;
}

std::optional<LinkedEntity> link_entity(const EntityMention& mention,
                                        const ProductDatabase& db,
                                        const EmbeddingTable* table,
                                        double tau) {
  return Linker(db, table, LinkerOptions{tau, kStringFallbackThreshold})
      .link(mention);
}

}  // namespace offlabel
