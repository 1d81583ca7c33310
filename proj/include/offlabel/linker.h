#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offlabel/labeldb.h"
#include "offlabel/ner.h"

// Resolution of tagged mentions to knowledge-base ids.

namespace offlabel {

inline constexpr double kDefaultTau = 0.85;
inline constexpr double kStringFallbackThreshold = 0.90;

using Vector = std::vector<double>;

// Static token embeddings. Every vector has `dimension()` finite components
// and a nonzero norm.
class EmbeddingTable {
 public:
  // Text format: "<count> <dimension>" header, then "<token> <c1> ... <cd>".
  static EmbeddingTable load(const std::filesystem::path& path);
  static EmbeddingTable parse(std::istream& in, const std::string& name);
  static EmbeddingTable from_vectors(std::size_t dimension,
                                     std::map<std::string, Vector> vectors);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }
  const Vector* find(std::string_view folded_token) const;
  // SHA-256 over the canonical text rendering.
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  EmbeddingTable() = default;
  std::size_t dimension_ = 0;
  std::map<std::string, Vector, std::less<>> vectors_;
  std::string fingerprint_;
};

// Component-wise mean of the in-vocabulary token vectors of `phrase`.
std::optional<Vector> embed_phrase(std::string_view phrase,
                                   const EmbeddingTable& table);

// Throws UndefinedSimilarityError for a zero-norm input, ValidationError for
// mismatched dimensions.
double cosine(std::span<const double> u, std::span<const double> v);

// 1 - levenshtein / max length, over folded strings.
double string_similarity(std::string_view a, std::string_view b);

enum class LinkMethod { kExact, kEmbedding, kString };

std::string_view to_string(LinkMethod m);

struct LinkedEntity {
  EntityMention mention;
  std::string canonical_id;
  double score = 0.0;
  LinkMethod method = LinkMethod::kExact;
};

struct LinkerOptions {
  double tau = kDefaultTau;
  double string_threshold = kStringFallbackThreshold;
};

// Precomputes candidate phrase vectors for every product and indication surface.
class Linker {
 public:
  struct Candidate {
    std::string canonical_id;
    std::string surface;  // folded
    std::optional<Vector> vector;
  };

  // `table` may be null, in which case only exact and string matching apply.
  Linker(const ProductDatabase& db, const EmbeddingTable* table,
         LinkerOptions options = {});

  // Exact folded surface first. A phrase whose tokens all have vectors then
  // links to the best cosine >= tau. A phrase with an unknown token (or any
  // phrase when there is no table) tries the best string similarity >=
  // string_threshold before the embedding. Ties go to the smaller id.
  std::optional<LinkedEntity> link(const EntityMention& mention) const;

  const std::vector<Candidate>& candidates(EntityClass cls) const {
    return cls == EntityClass::kDrug ? drugs_ : diseases_;
  }
  const LinkerOptions& options() const { return options_; }

 private:
  const EmbeddingTable* table_;
  LinkerOptions options_;
  std::vector<Candidate> drugs_;
  std::vector<Candidate> diseases_;
};

std::optional<LinkedEntity> link_entity(const EntityMention& mention,
                                        const ProductDatabase& db,
                                        const EmbeddingTable* table,
                                        double tau = kDefaultTau);

}  // namespace offlabel
