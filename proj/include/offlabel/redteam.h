#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "offlabel/jsonl.h"
#include "offlabel/labeldb.h"

// Template-driven synthetic query generation.

namespace offlabel {

inline constexpr std::string_view kProductPlaceholder = "{PRODUCT}";
inline constexpr std::string_view kIndicationPlaceholder = "{INDICATION}";

struct QueryTemplate {
  std::size_t template_id = 0;
  std::string pattern;

  bool operator==(const QueryTemplate&) const = default;
};

struct OffLabelUse {
  std::string product_id;
  std::string indication_concept_id;

  bool operator==(const OffLabelUse&) const = default;
};

struct SyntheticQuery {
  std::string query_id;
  std::string text;
  std::string product_id;
  std::string indication_concept_id;
  std::string label_text;

  bool operator==(const SyntheticQuery&) const = default;
};

std::vector<QueryTemplate> parse_templates(std::istream& in,
                                           const std::string& name);
std::vector<QueryTemplate> load_templates(const std::filesystem::path& path);

// Every pair must resolve and must not be an approved indication. An empty
// file yields an empty list and a warning.
std::vector<OffLabelUse> validate_uses(const std::filesystem::path& path,
                                       const ProductDatabase& db,
                                       std::vector<std::string>* warnings = nullptr);

struct ExpansionOptions {
  bool use_aliases = false;  // sample a name or alias per query
  std::uint64_t seed = 0;
};

// |templates| x |uses| queries, template-major.
std::vector<SyntheticQuery> expand_templates(
    const std::vector<QueryTemplate>& templates,
    const std::vector<OffLabelUse>& uses, const ProductDatabase& db,
    const ExpansionOptions& options = {});

// "t<template>-u<use>", zero-padded to at least three digits each.
std::string make_query_id(std::size_t template_id, std::size_t use_index);
std::optional<std::pair<std::size_t, std::size_t>> parse_query_id(
    std::string_view query_id);

Json to_json(const SyntheticQuery& q);
SyntheticQuery query_from_json(const Json& j, const std::string& file,
                               std::size_t line);
std::vector<SyntheticQuery> read_queries(const std::filesystem::path& path);
void write_queries(const std::filesystem::path& path,
                   const std::vector<SyntheticQuery>& queries);

}  // namespace offlabel
