#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

// The product/indication knowledge base: concepts (indications) and products
// with their approved-indication sets, plus the alias index the tagger runs on.

namespace offlabel {

enum class EntityClass { kDrug, kDisease };

std::string_view to_string(EntityClass c);

struct IndicationConcept {
  std::string concept_id;
  std::string preferred_name;
  std::vector<std::string> aliases;

  bool operator==(const IndicationConcept&) const = default;
};

struct ProductRecord {
  std::string product_id;
  std::string name;
  std::vector<std::string> aliases;
  std::set<std::string> approved_indication_ids;
  std::string label_text;

  bool operator==(const ProductRecord&) const = default;
};

// Immutable once constructed; every instance satisfies referential integrity.
class ProductDatabase {
 public:
  // Validates and takes ownership. Throws ValidationError on duplicate ids,
  // dangling indication references, or an empty product list.
  static ProductDatabase from_records(std::vector<ProductRecord> products,
                                      std::vector<IndicationConcept> concepts);

  const std::map<std::string, ProductRecord, std::less<>>& products() const {
    return products_;
  }
  const std::map<std::string, IndicationConcept, std::less<>>& concepts()
      const {
    return concepts_;
  }

  const ProductRecord* find_product(std::string_view product_id) const;
  const IndicationConcept* find_concept(std::string_view concept_id) const;
  // Throw UnknownIdError.
  const ProductRecord& product(std::string_view product_id) const;
  const IndicationConcept& concept_by_id(std::string_view concept_id) const;

  bool is_approved(std::string_view product_id,
                   std::string_view concept_id) const;

  bool operator==(const ProductDatabase&) const = default;

 private:
  ProductDatabase() = default;

  std::map<std::string, ProductRecord, std::less<>> products_;
  std::map<std::string, IndicationConcept, std::less<>> concepts_;
};

// Loads products.jsonl and concepts.jsonl. Records may reference concepts in
// any order; integrity is checked after both files are read.
ProductDatabase load_product_db(const std::filesystem::path& products_path,
                                const std::filesystem::path& concepts_path);

std::vector<IndicationConcept> approved_indications(
    const ProductDatabase& db, std::string_view product_id);

void write_products_jsonl(const ProductDatabase& db, std::ostream& out);
void write_concepts_jsonl(const ProductDatabase& db, std::ostream& out);

struct AliasEntry {
  EntityClass entity_class = EntityClass::kDrug;
  std::string canonical_id;

  bool operator==(const AliasEntry&) const = default;
};

// Folded surface form -> (class, canonical id). Each surface maps to exactly
// one entry; iteration order is lexicographic in the surface.
class AliasIndex {
 public:
  const std::map<std::string, AliasEntry, std::less<>>& entries() const {
    return entries_;
  }
  const AliasEntry* find(std::string_view folded_surface) const;
  std::size_t size() const { return entries_.size(); }

  bool operator==(const AliasIndex&) const = default;

 private:
  friend AliasIndex build_alias_index(const ProductDatabase& db);
  std::map<std::string, AliasEntry, std::less<>> entries_;
};

// Throws ValidationError when one surface would map to two different ids.
AliasIndex build_alias_index(const ProductDatabase& db);

}  // namespace offlabel
