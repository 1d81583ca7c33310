#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "offlabel/exchange.h"
#include "offlabel/hashing.h"
#include "offlabel/http_util.h"
#include "offlabel/labeldb.h"
#include "offlabel/redteam.h"

// Response collection: a real HTTP model client and a deterministic mock
// that plants off-label recommendations with known ground truth.

namespace offlabel {

struct PlantConfig {
  double plant_rate = 0.15;
  double typo_rate = 0.0;
  double negation_rate = 0.0;
  std::uint64_t seed = 0;

  // Throws ValidationError unless every rate is in [0, 1].
  void validate() const;
};

enum class Perturbation { kNone, kTypo, kNegated };

std::string_view to_string(Perturbation p);

// Ground truth emitted by the mock. A negation-wrapped plant is not a
// promotion, so it is recorded with planted = false.
struct GoldLabel {
  std::string query_id;
  bool planted = false;
  std::string product_id;
  std::optional<std::string> indication_concept_id;
  Perturbation perturbation = Perturbation::kNone;

  bool operator==(const GoldLabel&) const = default;
};

Json to_json(const GoldLabel& g);
GoldLabel gold_from_json(const Json& j, const std::string& file,
                         std::size_t line);
std::vector<GoldLabel> read_gold(const std::filesystem::path& path);
void write_gold(const std::filesystem::path& path,
                const std::vector<GoldLabel>& gold);

inline constexpr std::string_view kMockModelId = "mock-v1";

struct MockResult {
  ModelExchange exchange;
  GoldLabel gold;
};

// Pure function of (query, db, plant config). Queries whose pair is approved
// are never planted.
MockResult mock_model(const SyntheticQuery& query, const ProductDatabase& db,
                      const PlantConfig& plant);

// Applies one random single-character edit to the longest token (at least six
// bytes) of `surface`. Returns nullopt when no token is long enough.
std::optional<std::string> inject_typo(const std::string& surface,
                                       StableRng& rng);

struct ModelEndpointConfig {
  std::string base_url;
  std::string auth_env_var;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  int max_concurrency = 4;
  double requests_per_second = 2.0;
  std::chrono::milliseconds backoff_initial{500};
  std::chrono::milliseconds backoff_max{8000};
  std::string model_id;  // defaults to base_url

  void validate() const;
};

// Spaces dispatch slots at least 1/rps apart (a token bucket of depth one),
// so no one-second window ever holds more than rps dispatches.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);
  // Blocks until the next slot and returns the dispatch instant. The lock is
  // held across the wait so consecutive dispatches are never closer than the
  // interval, even when a sleeping thread wakes late.
  std::chrono::steady_clock::time_point acquire();

 private:
  std::mutex mutex_;
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_;
};

struct ClientStats {
  std::size_t requests = 0;
  std::size_t retries = 0;
  std::size_t failures = 0;
  std::vector<std::chrono::steady_clock::time_point> dispatch_times;
};

// POSTs {"query", "label_text"} and expects {"response"}. Retries 429, 5xx
// and transport errors with exponential backoff; 401/403 throw AuthError.
// Exhausted retries yield an exchange marked failed.
class HttpModelClient {
 public:
  using Logger = std::function<void(const std::string&)>;

  // Reads the credential from the environment; throws ValidationError if the
  // variable is unset.
  explicit HttpModelClient(ModelEndpointConfig config, Logger log = {});

  ModelExchange send(const SyntheticQuery& query);

  // Up to max_concurrency requests in flight; results in input order.
  std::vector<ModelExchange> run(const std::vector<SyntheticQuery>& queries);

  ClientStats stats() const;

 private:
  void log(const std::string& line) const;

  ModelEndpointConfig config_;
  Url url_;
  std::string credential_;
  Logger log_;
  RateLimiter limiter_;
  mutable std::mutex stats_mutex_;
  ClientStats stats_;
};

ModelExchange send_query(const SyntheticQuery& query,
                         const ModelEndpointConfig& config);

}  // namespace offlabel
