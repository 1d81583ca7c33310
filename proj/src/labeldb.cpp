#include "offlabel/labeldb.h"

#include <optional>
#include <ostream>

#include "offlabel/error.h"
#include "offlabel/jsonl.h"
#include "offlabel/text.h"

namespace offlabel {
namespace {

std::optional<std::string> check_aliases(const std::vector<std::string>& aliases,
                                         const std::string& name) {
  // The primary name is already a surface; repeating it is a data error.
  std::set<std::string> seen{fold_surface(name)};
  for (const auto& alias : aliases) {
    std::string folded = fold_surface(alias);
    if (folded.empty()) return "empty alias";
    if (!seen.insert(folded).second) return "duplicate alias '" + alias + "'";
  }
  return std::nullopt;
}

std::optional<std::string> check_concept(const IndicationConcept& c) {
  if (c.concept_id.empty()) return "empty concept_id";
  if (collapse_whitespace(c.preferred_name).empty()) {
    return "concept '" + c.concept_id + "' has an empty preferred_name";
  }
  if (auto err = check_aliases(c.aliases, c.preferred_name)) {
    return "concept '" + c.concept_id + "': " + *err;
  }
  return std::nullopt;
}

std::optional<std::string> check_product(const ProductRecord& p) {
  if (p.product_id.empty()) return "empty product_id";
  if (collapse_whitespace(p.name).empty()) {
    return "product '" + p.product_id + "' has an empty name";
  }
  if (auto err = check_aliases(p.aliases, p.name)) {
    return "product '" + p.product_id + "': " + *err;
  }
  if (p.approved_indication_ids.empty()) {
    return "product '" + p.product_id + "' has no approved indications";
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(EntityClass c) {
  return c == EntityClass::kDrug ? "drug" : "disease";
}

ProductDatabase ProductDatabase::from_records(
    std::vector<ProductRecord> products,
    std::vector<IndicationConcept> concepts) {
  ProductDatabase db;
  for (auto& c : concepts) {
    if (auto err = check_concept(c)) throw ValidationError(*err);
    std::string id = c.concept_id;
    if (!db.concepts_.emplace(id, std::move(c)).second) {
      throw ValidationError("duplicate concept_id '" + id + "'");
    }
  }
  for (auto& p : products) {
    if (auto err = check_product(p)) throw ValidationError(*err);
    std::string id = p.product_id;
    if (!db.products_.emplace(id, std::move(p)).second) {
      throw ValidationError("duplicate product_id '" + id + "'");
    }
  }
  if (db.products_.empty()) throw ValidationError("empty database");
  for (const auto& [pid, p] : db.products_) {
    for (const auto& cid : p.approved_indication_ids) {
      if (!db.concepts_.count(cid)) {
        throw ValidationError("dangling reference: product '" + pid +
                              "' lists unknown concept '" + cid + "'");
      }
    }
  }
  return db;
}

const ProductRecord* ProductDatabase::find_product(
    std::string_view product_id) const {
  auto it = products_.find(product_id);
  return it == products_.end() ? nullptr : &it->second;
}

const IndicationConcept* ProductDatabase::find_concept(
    std::string_view concept_id) const {
  auto it = concepts_.find(concept_id);
  return it == concepts_.end() ? nullptr : &it->second;
}

const ProductRecord& ProductDatabase::product(std::string_view product_id) const {
  if (const auto* p = find_product(product_id)) return *p;
  throw UnknownIdError("unknown product '" + std::string(product_id) + "'");
}

const IndicationConcept& ProductDatabase::concept_by_id(
    std::string_view concept_id) const {
  if (const auto* c = find_concept(concept_id)) return *c;
  throw UnknownIdError("unknown concept '" + std::string(concept_id) + "'");
}

bool ProductDatabase::is_approved(std::string_view product_id,
                                  std::string_view concept_id) const {
  const auto* p = find_product(product_id);
  return p && p->approved_indication_ids.count(std::string(concept_id)) > 0;
}

ProductDatabase load_product_db(const std::filesystem::path& products_path,
                                const std::filesystem::path& concepts_path) {
  std::vector<IndicationConcept> concepts;
  std::set<std::string> concept_ids;
  const std::string cfile = concepts_path.string();
  for_each_jsonl(concepts_path, [&](std::size_t line, const Json& r) {
    IndicationConcept c;
    c.concept_id = require_string(r, "concept_id", cfile, line);
    c.preferred_name = require_string(r, "preferred_name", cfile, line);
    c.aliases = require_string_list(r, "aliases", cfile, line);
    if (auto err = check_concept(c)) throw LoadError(cfile, line, *err);
    if (!concept_ids.insert(c.concept_id).second) {
      throw LoadError(cfile, line,
                      "duplicate concept_id '" + c.concept_id + "'");
    }
    concepts.push_back(std::move(c));
  });

  std::vector<ProductRecord> products;
  std::set<std::string> product_ids;
  const std::string pfile = products_path.string();
  for_each_jsonl(products_path, [&](std::size_t line, const Json& r) {
    ProductRecord p;
    p.product_id = require_string(r, "product_id", pfile, line);
    p.name = require_string(r, "name", pfile, line);
    p.aliases = require_string_list(r, "aliases", pfile, line);
    for (auto& id :
         require_string_list(r, "approved_indication_ids", pfile, line)) {
      if (!p.approved_indication_ids.insert(id).second) {
        throw LoadError(pfile, line, "duplicate approved indication '" + id +
                                         "' in product '" + p.product_id + "'");
      }
    }
    p.label_text = require_string(r, "label_text", pfile, line);
    if (auto err = check_product(p)) throw LoadError(pfile, line, *err);
    if (!product_ids.insert(p.product_id).second) {
      throw LoadError(pfile, line,
                      "duplicate product_id '" + p.product_id + "'");
    }
    products.push_back(std::move(p));
  });

  return ProductDatabase::from_records(std::move(products),
                                       std::move(concepts));
}

std::vector<IndicationConcept> approved_indications(
    const ProductDatabase& db, std::string_view product_id) {
  std::vector<IndicationConcept> out;
  for (const auto& cid : db.product(product_id).approved_indication_ids) {
    out.push_back(db.concept_by_id(cid));
  }
  return out;
}

void write_products_jsonl(const ProductDatabase& db, std::ostream& out) {
  for (const auto& [id, p] : db.products()) {
    Json r;
    r["product_id"] = p.product_id;
    r["name"] = p.name;
    r["aliases"] = p.aliases;
    r["approved_indication_ids"] = Json(p.approved_indication_ids);
    r["label_text"] = p.label_text;
    out << r.dump() << '\n';
  }
}

void write_concepts_jsonl(const ProductDatabase& db, std::ostream& out) {
  for (const auto& [id, c] : db.concepts()) {
    Json r;
    r["concept_id"] = c.concept_id;
    r["preferred_name"] = c.preferred_name;
    r["aliases"] = c.aliases;
    out << r.dump() << '\n';
  }
}

const AliasEntry* AliasIndex::find(std::string_view folded_surface) const {
  auto it = entries_.find(folded_surface);
  return it == entries_.end() ? nullptr : &it->second;
}

AliasIndex build_alias_index(const ProductDatabase& db) {
  AliasIndex index;
  auto add = [&](std::string_view surface, EntityClass cls,
                 const std::string& id) {
    std::string key = fold_surface(surface);
    AliasEntry entry{cls, id};
    auto [it, inserted] = index.entries_.emplace(key, entry);
    if (!inserted && !(it->second == entry)) {
      throw ValidationError(
          "alias collision on '" + key + "': " +
          std::string(to_string(it->second.entity_class)) + " '" +
          it->second.canonical_id + "' vs " + std::string(to_string(cls)) +
          " '" + id + "'");
    }
  };
  for (const auto& [id, p] : db.products()) {
    add(p.name, EntityClass::kDrug, id);
    for (const auto& a : p.aliases) add(a, EntityClass::kDrug, id);
  }
  for (const auto& [id, c] : db.concepts()) {
    add(c.preferred_name, EntityClass::kDisease, id);
    for (const auto& a : c.aliases) add(a, EntityClass::kDisease, id);
  }
  return index;
}

}  // namespace offlabel
