#include "wsn/feed_store.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace wsn::cloud {

namespace {

bool parse_finite_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + s.size()) return false;
  if (!std::isfinite(v)) return false;
  if (out != nullptr) *out = v;
  return true;
}

void fnv_mix(uint64_t& h, const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

void fnv_mix(uint64_t& h, const std::string& s) { fnv_mix(h, s.data(), s.size()); }

void fnv_mix(uint64_t& h, uint64_t v) { fnv_mix(h, &v, sizeof v); }

void fnv_mix(uint64_t& h, double v) { fnv_mix(h, &v, sizeof v); }

}  // namespace

const char* to_string(ServiceErrc errc) {
  switch (errc) {
    case ServiceErrc::auth: return "auth";
    case ServiceErrc::not_found: return "not-found";
    case ServiceErrc::bad_request: return "bad-request";
  }
  return "unknown";
}

int http_status(ServiceErrc errc) {
  switch (errc) {
    case ServiceErrc::auth: return 401;
    case ServiceErrc::not_found: return 404;
    case ServiceErrc::bad_request: return 400;
  }
  return 500;
}

ServiceError::ServiceError(ServiceErrc errc, const std::string& detail)
    : std::runtime_error(std::string(to_string(errc)) + ": " + detail),
      errc_(errc),
      detail_(detail) {}

Comparison parse_comparison(const std::string& s) {
  if (s == "<=") return Comparison::less_equal;
  if (s == ">=") return Comparison::greater_equal;
  if (s == "==") return Comparison::equal;
  throw ServiceError(ServiceErrc::bad_request, "unknown comparison '" + s + "'");
}

const char* to_string(Comparison cmp) {
  switch (cmp) {
    case Comparison::less_equal: return "<=";
    case Comparison::greater_equal: return ">=";
    case Comparison::equal: return "==";
  }
  return "?";
}

LatencyDistribution LatencyDistribution::parse(const std::string& spec) {
  auto fail = [&spec]() -> LatencyDistribution {
    throw ServiceError(ServiceErrc::bad_request,
                       "bad latency spec '" + spec +
                           "', expected constant:SECONDS or uniform:LO:HI");
  };
  size_t colon = spec.find(':');
  if (colon == std::string::npos) return fail();
  std::string kind = spec.substr(0, colon);
  std::string rest = spec.substr(colon + 1);
  LatencyDistribution d;
  if (kind == "constant") {
    double v = 0;
    if (!parse_finite_double(rest, &v) || v < 0) return fail();
    d.kind = Kind::constant;
    d.lo = d.hi = v;
    return d;
  }
  if (kind == "uniform") {
    size_t colon2 = rest.find(':');
    if (colon2 == std::string::npos) return fail();
    double lo = 0, hi = 0;
    if (!parse_finite_double(rest.substr(0, colon2), &lo) ||
        !parse_finite_double(rest.substr(colon2 + 1), &hi) || lo < 0 ||
        hi < lo) {
      return fail();
    }
    d.kind = Kind::uniform;
    d.lo = lo;
    d.hi = hi;
    return d;
  }
  return fail();
}

double LatencyDistribution::draw(std::mt19937_64& rng) const {
  if (kind == Kind::constant) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::string LatencyDistribution::spec() const {
  char buf[64];
  if (kind == Kind::constant) {
    std::snprintf(buf, sizeof buf, "constant:%g", lo);
  } else {
    std::snprintf(buf, sizeof buf, "uniform:%g:%g", lo, hi);
  }
  return buf;
}

AggFn parse_agg_fn(const std::string& s) {
  if (s == "mean") return AggFn::mean;
  if (s == "median") return AggFn::median;
  if (s == "sum") return AggFn::sum;
  if (s == "timescale") return AggFn::timescale;
  throw ServiceError(ServiceErrc::bad_request, "unknown aggregation '" + s + "'");
}

double quantize_ms(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

FeedStore::FeedStore(Clock clock, LatencyDistribution latency, uint64_t seed)
    : clock_(std::move(clock)), latency_(latency), rng_(seed) {}

void FeedStore::check_key(const std::string& key) const {
  if (keys_.find(key) == keys_.end()) {
    throw ServiceError(ServiceErrc::auth, "unknown key");
  }
}

double FeedStore::now_locked() {
  double t = quantize_ms(clock_());
  if (t < last_received_at_) t = last_received_at_;
  last_received_at_ = t;
  return t;
}

void FeedStore::register_key(const std::string& key, const std::string& owner) {
  std::lock_guard lock(mu_);
  keys_[key] = owner;
}

void FeedStore::create_feed(const std::string& key, const std::string& feed_id) {
  std::lock_guard lock(mu_);
  check_key(key);
  if (feed_id.empty()) {
    throw ServiceError(ServiceErrc::bad_request, "empty feed id");
  }
  feeds_.try_emplace(feed_id);  // idempotent
}

FeedEntry FeedStore::post_event(const std::string& key,
                                const std::string& feed_id,
                                const std::string& value) {
  std::lock_guard lock(mu_);
  check_key(key);
  auto it = feeds_.find(feed_id);
  if (it == feeds_.end()) {
    throw ServiceError(ServiceErrc::not_found, "no such feed '" + feed_id + "'");
  }
  if (!parse_finite_double(value, nullptr)) {
    throw ServiceError(ServiceErrc::bad_request,
                       "value does not parse as a finite decimal");
  }
  FeedEntry entry{next_entry_id_++, feed_id, value, now_locked()};
  it->second.push_back(entry);
  evaluate_rules_locked(entry);
  return entry;
}

AlertRule FeedStore::add_rule(const std::string& key, const std::string& feed_id,
                              Comparison comparison, double threshold,
                              const std::string& channel) {
  std::lock_guard lock(mu_);
  check_key(key);
  if (feeds_.find(feed_id) == feeds_.end()) {
    throw ServiceError(ServiceErrc::not_found, "no such feed '" + feed_id + "'");
  }
  if (channel != "email_sim" && channel != "tweet_sim" && channel != "log") {
    throw ServiceError(ServiceErrc::bad_request,
                       "unknown channel '" + channel + "'");
  }
  AlertRule rule{next_rule_id_++, feed_id, comparison, threshold, channel, true};
  rules_.push_back(rule);
  return rule;
}

void FeedStore::evaluate_rules_locked(const FeedEntry& entry) {
  double v = 0;
  parse_finite_double(entry.value, &v);
  for (AlertRule& rule : rules_) {
    if (rule.feed_id != entry.feed_id) continue;
    bool holds = false;
    switch (rule.comparison) {
      case Comparison::less_equal: holds = v <= rule.threshold; break;
      case Comparison::greater_equal: holds = v >= rule.threshold; break;
      case Comparison::equal: holds = v == rule.threshold; break;
    }
    if (holds && rule.armed) {
      double created = entry.received_at;
      double delivered = quantize_ms(created + latency_.draw(rng_));
      notifications_.push_back(Notification{rule.rule_id, entry.entry_id,
                                            entry.feed_id, rule.channel,
                                            created, delivered});
      rule.armed = false;
    } else if (!holds) {
      rule.armed = true;  // re-arm once the condition clears
    }
  }
}

std::vector<FeedEntry> FeedStore::entries(const std::string& feed_id,
                                          std::optional<double> from,
                                          std::optional<double> to) const {
  std::lock_guard lock(mu_);
  auto it = feeds_.find(feed_id);
  if (it == feeds_.end()) {
    throw ServiceError(ServiceErrc::not_found, "no such feed '" + feed_id + "'");
  }
  if (from && to && *from > *to) {
    throw ServiceError(ServiceErrc::bad_request, "range start after range end");
  }
  std::vector<FeedEntry> out;
  for (const FeedEntry& e : it->second) {
    if (from && e.received_at < *from) continue;
    if (to && e.received_at > *to) continue;
    out.push_back(e);
  }
  return out;
}

std::vector<AggRow> FeedStore::aggregate(const std::string& feed_id,
                                         double window_s, AggFn fn) const {
  if (window_s <= 0) {
    throw ServiceError(ServiceErrc::bad_request, "window must be positive");
  }
  std::vector<FeedEntry> all = entries(feed_id);
  // Buckets keyed by floor(received_at / window); entries arrive in id order
  // so per-bucket vectors keep arrival order.
  std::map<int64_t, std::vector<double>> buckets;
  for (const FeedEntry& e : all) {
    double v = 0;
    parse_finite_double(e.value, &v);
    buckets[static_cast<int64_t>(std::floor(e.received_at / window_s))].push_back(v);
  }
  std::vector<AggRow> out;
  out.reserve(buckets.size());
  for (auto& [bucket, values] : buckets) {
    double result = 0;
    switch (fn) {
      case AggFn::mean: {
        double sum = 0;
        for (double v : values) sum += v;
        result = sum / static_cast<double>(values.size());
        break;
      }
      case AggFn::median: {
        std::sort(values.begin(), values.end());
        size_t n = values.size();
        result = (n % 2 == 1) ? values[n / 2]
                              : (values[n / 2 - 1] + values[n / 2]) / 2.0;
        break;
      }
      case AggFn::sum: {
        double sum = 0;
        for (double v : values) sum += v;
        result = sum;
        break;
      }
      case AggFn::timescale:
        result = values.back();
        break;
    }
    out.push_back(AggRow{static_cast<double>(bucket) * window_s, result});
  }
  return out;
}

std::vector<Notification> FeedStore::notifications() const {
  std::lock_guard lock(mu_);
  return notifications_;
}

std::vector<AlertRule> FeedStore::rules() const {
  std::lock_guard lock(mu_);
  return rules_;
}

std::vector<std::string> FeedStore::feed_ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  out.reserve(feeds_.size());
  for (const auto& [id, entries] : feeds_) out.push_back(id);
  return out;
}

uint64_t FeedStore::entry_count() const {
  std::lock_guard lock(mu_);
  return next_entry_id_ - 1;
}

uint64_t FeedStore::digest() const {
  std::lock_guard lock(mu_);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [feed_id, entries] : feeds_) {
    fnv_mix(h, feed_id);
    for (const FeedEntry& e : entries) {
      fnv_mix(h, e.entry_id);
      fnv_mix(h, e.value);
      fnv_mix(h, e.received_at);
    }
  }
  for (const AlertRule& r : rules_) {
    fnv_mix(h, r.rule_id);
    fnv_mix(h, r.feed_id);
    fnv_mix(h, std::string(to_string(r.comparison)));
    fnv_mix(h, r.threshold);
    fnv_mix(h, r.channel);
    fnv_mix(h, static_cast<uint64_t>(r.armed));
  }
  for (const Notification& n : notifications_) {
    fnv_mix(h, n.rule_id);
    fnv_mix(h, n.entry_id);
    fnv_mix(h, n.created_at);
    fnv_mix(h, n.delivered_at);
  }
  return h;
}

nlohmann::json FeedStore::snapshot() const {
  std::lock_guard lock(mu_);
  nlohmann::json feeds = nlohmann::json::object();
  for (const auto& [feed_id, entries] : feeds_) {
    nlohmann::json arr = nlohmann::json::array();
    for (const FeedEntry& e : entries) arr.push_back(entry_json(e));
    feeds[feed_id] = std::move(arr);
  }
  nlohmann::json rules = nlohmann::json::array();
  for (const AlertRule& r : rules_) rules.push_back(rule_json(r));
  nlohmann::json notes = nlohmann::json::array();
  for (const Notification& n : notifications_) notes.push_back(notification_json(n));
  return nlohmann::json{{"feeds", std::move(feeds)},
                        {"rules", std::move(rules)},
                        {"notifications", std::move(notes)}};
}

nlohmann::json entry_json(const FeedEntry& entry) {
  return nlohmann::json{{"entry_id", entry.entry_id},
                        {"feed_id", entry.feed_id},
                        {"value", entry.value},
                        {"received_at", entry.received_at}};
}

nlohmann::json notification_json(const Notification& n) {
  return nlohmann::json{{"rule_id", n.rule_id},       {"entry_id", n.entry_id},
                        {"feed_id", n.feed_id},       {"channel", n.channel},
                        {"created_at", n.created_at}, {"delivered_at", n.delivered_at}};
}

nlohmann::json rule_json(const AlertRule& rule) {
  return nlohmann::json{{"rule_id", rule.rule_id},
                        {"feed_id", rule.feed_id},
                        {"comparison", to_string(rule.comparison)},
                        {"threshold", rule.threshold},
                        {"channel", rule.channel},
                        {"armed", rule.armed}};
}

std::string entries_csv(const std::vector<FeedEntry>& entries) {
  std::string out = "entry_id,feed_id,value,received_at\n";
  char line[256];
  for (const FeedEntry& e : entries) {
    std::snprintf(line, sizeof line, "%llu,%s,%s,%.3f\n",
                  static_cast<unsigned long long>(e.entry_id),
                  e.feed_id.c_str(), e.value.c_str(), e.received_at);
    out += line;
  }
  return out;
}

std::string entries_json(const std::vector<FeedEntry>& entries) {
  nlohmann::json arr = nlohmann::json::array();
  for (const FeedEntry& e : entries) arr.push_back(entry_json(e));
  return arr.dump();
}

LocalFeedService::LocalFeedService(FeedStore& store, std::function<bool()> healthy)
    : store_(store), healthy_(std::move(healthy)) {}

void LocalFeedService::create_feed(const std::string& key,
                                   const std::string& feed_id) {
  store_.create_feed(key, feed_id);
}

void LocalFeedService::add_rule(const std::string& key, const std::string& feed_id,
                                Comparison comparison, double threshold,
                                const std::string& channel) {
  store_.add_rule(key, feed_id, comparison, threshold, channel);
}

bool LocalFeedService::post_event(const std::string& key,
                                  const std::string& feed_id,
                                  const std::string& value) {
  if (healthy_ && !healthy_()) return false;
  store_.post_event(key, feed_id, value);
  return true;
}

uint64_t LocalFeedService::entry_count() { return store_.entry_count(); }

std::vector<Notification> LocalFeedService::notifications() {
  return store_.notifications();
}

std::vector<FeedEntry> LocalFeedService::entries(const std::string& feed_id) {
  return store_.entries(feed_id);
}

}  // namespace wsn::cloud
