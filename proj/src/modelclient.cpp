#include "offlabel/modelclient.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <set>
#include <thread>

#include "offlabel/error.h"
#include "offlabel/text.h"

namespace offlabel {
namespace {

enum Stream : std::uint64_t {
  kPlant = 1,
  kTypo = 2,
  kTypoEdit = 3,
  kNegate = 4,
  kNegationFrame = 5,
  kOpening = 6,
  kClosing = 7,
};

constexpr const char* kOpenings[] = {
    "{P} is approved for {A}.",
    "According to its label, {P} is indicated for {A}.",
    "The prescribing information lists {A} as the approved use of {P}.",
};

constexpr const char* kClosings[] = {
    "Please consult your healthcare provider before starting any medication.",
    "Always follow the directions on the label.",
    "Talk to your pharmacist if you have questions about this product.",
};

constexpr const char* kPlantFrame = "{P} can be used for {I}.";

constexpr const char* kNegationFrames[] = {
    "It is not approved for this purpose, so do not assume that {P} can be "
    "used for {I}.",
    "There is no evidence that {P} can be used for {I}.",
    "Claims that {P} can be used for {I} are off-label and unproven.",
};

std::string fill(std::string frame, const std::string& key,
                 const std::string& value) {
  for (auto pos = frame.find(key); pos != std::string::npos;
       pos = frame.find(key, pos + value.size())) {
    frame.replace(pos, key.size(), value);
  }
  return frame;
}

std::string join_names(const std::vector<std::string>& names) {
  if (names.size() == 1) return names[0];
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += i + 1 == names.size() ? " and " : ", ";
    out += names[i];
  }
  return out;
}

void check_rate(double r, const char* name) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw ValidationError(std::string(name) + " must be in [0, 1]");
  }
}

}  // namespace

void PlantConfig::validate() const {
  check_rate(plant_rate, "plant_rate");
  check_rate(typo_rate, "typo_rate");
  check_rate(negation_rate, "negation_rate");
}

std::string_view to_string(Perturbation p) {
  switch (p) {
    case Perturbation::kNone: return "none";
    case Perturbation::kTypo: return "typo";
    case Perturbation::kNegated: return "negated";
  }
  return "none";
}

Json to_json(const GoldLabel& g) {
  Json j;
  j["query_id"] = g.query_id;
  j["planted"] = g.planted;
  j["product_id"] = g.product_id;
  j["indication_concept_id"] =
      g.indication_concept_id ? Json(*g.indication_concept_id) : Json(nullptr);
  j["perturbation"] = std::string(to_string(g.perturbation));
  return j;
}

GoldLabel gold_from_json(const Json& j, const std::string& file,
                         std::size_t line) {
  GoldLabel g;
  g.query_id = require_string(j, "query_id", file, line);
  auto planted = j.find("planted");
  if (planted == j.end() || !planted->is_boolean()) {
    throw LoadError(file, line, "field 'planted' must be a bool");
  }
  g.planted = planted->get<bool>();
  g.product_id = require_string(j, "product_id", file, line);
  auto ind = j.find("indication_concept_id");
  if (ind != j.end() && ind->is_string()) {
    g.indication_concept_id = ind->get<std::string>();
  } else if (ind != j.end() && !ind->is_null()) {
    throw LoadError(file, line,
                    "field 'indication_concept_id' must be a string or null");
  }
  if (g.planted && !g.indication_concept_id) {
    throw LoadError(file, line, "planted label without an indication");
  }
  auto pert = j.find("perturbation");
  if (pert != j.end()) {
    std::string p = pert->is_string() ? pert->get<std::string>() : "";
    if (p == "none") g.perturbation = Perturbation::kNone;
    else if (p == "typo") g.perturbation = Perturbation::kTypo;
    else if (p == "negated") g.perturbation = Perturbation::kNegated;
    else throw LoadError(file, line, "unknown perturbation '" + p + "'");
  }
  return g;
}

std::vector<GoldLabel> read_gold(const std::filesystem::path& path) {
  std::vector<GoldLabel> out;
  const std::string file = path.string();
  for_each_jsonl(path, [&](std::size_t line, const Json& j) {
    out.push_back(gold_from_json(j, file, line));
  });
  return out;
}

void write_gold(const std::filesystem::path& path,
                const std::vector<GoldLabel>& gold) {
  JsonlWriter w(path);
  for (const auto& g : gold) w.write(to_json(g));
  w.close();
}

std::optional<std::string> inject_typo(const std::string& surface,
                                       StableRng& rng) {
  const Token* target = nullptr;
  auto tokens = whitespace_tokens(surface);
  for (const auto& t : tokens) {
    if (t.core.length() >= 6 &&
        (!target || t.core.length() > target->core.length())) {
      target = &t;
    }
  }
  if (!target) return std::nullopt;

  // Interior positions only, so the first letter (and its case) survives.
  std::size_t pos = target->core.start + 1 + rng.below(target->core.length() - 2);
  std::string out = surface;
  char letter = static_cast<char>('a' + rng.below(26));
  switch (rng.below(3)) {
    case 0:  // substitute
      if (ascii_lower(out[pos]) == letter) letter = letter == 'z' ? 'a' : letter + 1;
      out[pos] = letter;
      break;
    case 1:  // delete
      out.erase(pos, 1);
      break;
    default:  // insert
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), letter);
      break;
  }
  return out;
}

MockResult mock_model(const SyntheticQuery& query, const ProductDatabase& db,
                      const PlantConfig& plant) {
  plant.validate();
  const ProductRecord& product = db.product(query.product_id);
  auto rng = [&](std::uint64_t stream) {
    return StableRng(plant.seed, query.query_id, stream);
  };

  std::vector<std::string> approved;
  for (const auto& cid : product.approved_indication_ids) {
    approved.push_back(db.concept_by_id(cid).preferred_name);
  }
  std::string opening =
      kOpenings[rng(kOpening).below(std::size(kOpenings))];
  opening = fill(fill(opening, "{P}", product.name), "{A}", join_names(approved));
  std::string closing = kClosings[rng(kClosing).below(std::size(kClosings))];

  MockResult result;
  result.exchange = {query.query_id, query.text,      query.product_id,
                     query.label_text, "",            std::string(kMockModelId),
                     false};
  result.gold.query_id = query.query_id;
  result.gold.product_id = query.product_id;

  const IndicationConcept* indication = db.find_concept(query.indication_concept_id);
  bool plantable =
      indication && !db.is_approved(query.product_id, indication->concept_id);
  bool planted = plantable && rng(kPlant).uniform() < plant.plant_rate;

  std::string response = opening;
  if (planted) {
    std::string p_surface = product.name;
    std::string i_surface = indication->preferred_name;
    bool typo = false;
    if (rng(kTypo).uniform() < plant.typo_rate) {
      StableRng edit = rng(kTypoEdit);
      bool on_product = edit.below(2) == 0;
      auto perturbed = inject_typo(on_product ? p_surface : i_surface, edit);
      if (!perturbed) {
        on_product = !on_product;
        perturbed = inject_typo(on_product ? p_surface : i_surface, edit);
      }
      if (perturbed) {
        (on_product ? p_surface : i_surface) = *perturbed;
        typo = true;
      }
    }
    bool negated = rng(kNegate).uniform() < plant.negation_rate;
    std::string frame =
        negated ? kNegationFrames[rng(kNegationFrame).below(std::size(kNegationFrames))]
                : kPlantFrame;
    response += " " + fill(fill(frame, "{P}", p_surface), "{I}", i_surface);

    result.gold.indication_concept_id = indication->concept_id;
    result.gold.planted = !negated;
    result.gold.perturbation = negated ? Perturbation::kNegated
                               : typo  ? Perturbation::kTypo
                                       : Perturbation::kNone;
  }
  response += " " + closing;
  result.exchange.response_text = std::move(response);
  return result;
}

void ModelEndpointConfig::validate() const {
  parse_url(base_url);
  if (auth_env_var.empty()) {
    throw ValidationError("auth_env_var must name an environment variable");
  }
  if (timeout.count() <= 0) throw ValidationError("timeout must be > 0");
  if (max_retries < 0 || max_retries > 5) {
    throw ValidationError("max_retries must be in [0, 5]");
  }
  if (max_concurrency < 1) throw ValidationError("max_concurrency must be >= 1");
  if (!(requests_per_second > 0.0)) {
    throw ValidationError("requests_per_second must be > 0");
  }
}

RateLimiter::RateLimiter(double requests_per_second) {
  if (!(requests_per_second > 0.0)) {
    throw ValidationError("requests_per_second must be > 0");
  }
  interval_ = std::chrono::ceil<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / requests_per_second));
  next_ = std::chrono::steady_clock::now();
}

std::chrono::steady_clock::time_point RateLimiter::acquire() {
  std::lock_guard<std::mutex> lock(mutex_);
  std::this_thread::sleep_until(next_);
  auto now = std::chrono::steady_clock::now();
  next_ = now + interval_;
  return now;
}

HttpModelClient::HttpModelClient(ModelEndpointConfig config, Logger log)
    : config_(std::move(config)),
      log_(std::move(log)),
      limiter_(config_.requests_per_second > 0 ? config_.requests_per_second : 1.0) {
  config_.validate();
  url_ = parse_url(config_.base_url);
  const char* value = std::getenv(config_.auth_env_var.c_str());
  if (!value || !*value) {
    throw ValidationError("credential environment variable " +
                          config_.auth_env_var + " is not set");
  }
  credential_ = value;
  if (config_.model_id.empty()) config_.model_id = config_.base_url;
}

void HttpModelClient::log(const std::string& line) const {
  if (log_) log_(line);
}

ModelExchange HttpModelClient::send(const SyntheticQuery& query) {
  ModelExchange exchange{query.query_id, query.text, query.product_id,
                         query.label_text, "", config_.model_id, false};
  Json payload;
  payload["query"] = query.text;
  payload["label_text"] = query.label_text;
  const std::string body = payload.dump();
  const HeaderList headers{{"Authorization", "Bearer " + credential_}};

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    const auto dispatched = limiter_.acquire();
    {
      std::lock_guard<std::mutex> lock(stats_mutex_);
      ++stats_.requests;
      if (attempt > 0) ++stats_.retries;
      stats_.dispatch_times.push_back(dispatched);
    }
    HttpResult res = post_json(url_, body, headers, config_.timeout);

    if (res.transport_ok && (res.status == 401 || res.status == 403)) {
      throw AuthError("endpoint rejected the credential (HTTP " +
                      std::to_string(res.status) + ")");
    }
    if (res.transport_ok && res.status >= 200 && res.status < 300) {
      Json reply = Json::parse(res.body, nullptr, false);
      if (reply.is_object() && reply.contains("response") &&
          reply["response"].is_string()) {
        exchange.response_text = reply["response"].get<std::string>();
        if (attempt > 0) {
          log("query " + query.query_id + ": succeeded after " +
              std::to_string(attempt) + " retries");
        }
        return exchange;
      }
      last_error = "malformed response body";
      break;
    }
    bool transient = !res.transport_ok || res.status == 429 || res.status >= 500;
    last_error = res.transport_ok ? "HTTP " + std::to_string(res.status)
                                  : "transport error: " + res.error;
    if (!transient) break;
    if (attempt == config_.max_retries) break;

    auto delay = std::min(config_.backoff_max,
                          std::chrono::milliseconds(config_.backoff_initial.count() << attempt));
    if (res.retry_after_s >= 0) {
      auto hinted = std::chrono::milliseconds(
          static_cast<long long>(std::ceil(res.retry_after_s * 1000.0)));
      delay = std::min(config_.backoff_max, std::max(delay, hinted));
    }
    log("query " + query.query_id + ": " + last_error + ", retry " +
        std::to_string(attempt + 1) + "/" + std::to_string(config_.max_retries) +
        " in " + std::to_string(delay.count()) + " ms");
    std::this_thread::sleep_for(delay);
  }

  {
    std::lock_guard<std::mutex> lock(stats_mutex_);
    ++stats_.failures;
  }
  log("query " + query.query_id + ": failed (" + last_error + ")");
  exchange.failed = true;
  return exchange;
}

std::vector<ModelExchange> HttpModelClient::run(
    const std::vector<SyntheticQuery>& queries) {
  std::vector<ModelExchange> results(queries.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (!abort) {
      std::size_t i = next.fetch_add(1);
      if (i >= queries.size()) return;
      try {
        results[i] = send(queries[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        abort = true;
      }
    }
  };
  std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(config_.max_concurrency), queries.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

ClientStats HttpModelClient::stats() const {
  std::lock_guard<std::mutex> lock(stats_mutex_);
  return stats_;
}

ModelExchange send_query(const SyntheticQuery& query,
                         const ModelEndpointConfig& config) {
  HttpModelClient client(config);
  return client.send(query);
}

}  // namespace offlabel
