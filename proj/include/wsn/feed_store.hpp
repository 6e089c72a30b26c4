#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace wsn::cloud {

enum class ServiceErrc { auth, not_found, bad_request };

const char* to_string(ServiceErrc errc);
int http_status(ServiceErrc errc);

class ServiceError : public std::runtime_error {
 public:
  ServiceError(ServiceErrc errc, const std::string& detail);

  ServiceErrc errc() const { return errc_; }
  const std::string& detail() const { return detail_; }

 private:
  ServiceErrc errc_;
  std::string detail_;
};

enum class Comparison { less_equal, greater_equal, equal };

Comparison parse_comparison(const std::string& s);  // "<=", ">=", "=="
const char* to_string(Comparison cmp);

// Alert delivery latency model: "constant:11" or "uniform:8:13" (seconds).
struct LatencyDistribution {
  enum class Kind { constant, uniform };
  Kind kind = Kind::uniform;
  double lo = 8.0;
  double hi = 13.0;

  static LatencyDistribution parse(const std::string& spec);
  double draw(std::mt19937_64& rng) const;
  std::string spec() const;
};

struct FeedEntry {
  uint64_t entry_id = 0;
  std::string feed_id;
  std::string value;  // stored as posted
  double received_at = 0.0;

  bool operator==(const FeedEntry&) const = default;
};

struct AlertRule {
  uint64_t rule_id = 0;
  std::string feed_id;
  Comparison comparison = Comparison::less_equal;
  double threshold = 0.0;
  std::string channel = "log";  // email_sim | tweet_sim | log
  bool armed = true;
};

struct Notification {
  uint64_t rule_id = 0;
  uint64_t entry_id = 0;
  std::string feed_id;
  std::string channel;
  double created_at = 0.0;
  double delivered_at = 0.0;
};

enum class AggFn { mean, median, sum, timescale };

AggFn parse_agg_fn(const std::string& s);  // throws bad-request on unknown fn

struct AggRow {
  double window_start = 0.0;
  double value = 0.0;
};

using Clock = std::function<double()>;

// In-memory feed service: key-authenticated appends with strictly monotone
// entry ids, range reads, windowed aggregation and threshold rules with
// crossing/re-arm semantics. Appends are serialized; reads see a consistent
// snapshot.
class FeedStore {
 public:
  explicit FeedStore(Clock clock, LatencyDistribution latency = {},
                     uint64_t seed = 0);

  void register_key(const std::string& key, const std::string& owner);
  void create_feed(const std::string& key, const std::string& feed_id);
  FeedEntry post_event(const std::string& key, const std::string& feed_id,
                       const std::string& value);
  AlertRule add_rule(const std::string& key, const std::string& feed_id,
                     Comparison comparison, double threshold,
                     const std::string& channel);

  std::vector<FeedEntry> entries(const std::string& feed_id,
                                 std::optional<double> from = {},
                                 std::optional<double> to = {}) const;
  std::vector<AggRow> aggregate(const std::string& feed_id, double window_s,
                                AggFn fn) const;
  std::vector<Notification> notifications() const;
  std::vector<AlertRule> rules() const;
  std::vector<std::string> feed_ids() const;
  uint64_t entry_count() const;

  // FNV-1a over the full store state; changes iff the store mutates.
  uint64_t digest() const;

  nlohmann::json snapshot() const;

 private:
  void check_key(const std::string& key) const;
  void evaluate_rules_locked(const FeedEntry& entry);
  double now_locked();

  mutable std::mutex mu_;
  Clock clock_;
  LatencyDistribution latency_;
  std::mt19937_64 rng_;
  std::map<std::string, std::string> keys_;  // key -> owner
  std::map<std::string, std::vector<FeedEntry>> feeds_;
  std::vector<AlertRule> rules_;
  std::vector<Notification> notifications_;
  uint64_t next_entry_id_ = 1;
  uint64_t next_rule_id_ = 1;
  double last_received_at_ = 0.0;
};

nlohmann::json entry_json(const FeedEntry& entry);
nlohmann::json notification_json(const Notification& n);
nlohmann::json rule_json(const AlertRule& rule);

std::string entries_csv(const std::vector<FeedEntry>& entries);
std::string entries_json(const std::vector<FeedEntry>& entries);

// Round to the millisecond grid used for all stored timestamps.
double quantize_ms(double seconds);

// Surface the simulator drives, satisfied in process or over HTTP.
class FeedService {
 public:
  virtual ~FeedService() = default;
  virtual void create_feed(const std::string& key, const std::string& feed_id) = 0;
  virtual void add_rule(const std::string& key, const std::string& feed_id,
                        Comparison comparison, double threshold,
                        const std::string& channel) = 0;
  // Returns false on delivery failure (outage, transport error).
  virtual bool post_event(const std::string& key, const std::string& feed_id,
                          const std::string& value) = 0;
  virtual uint64_t entry_count() = 0;
  virtual std::vector<Notification> notifications() = 0;
  virtual std::vector<FeedEntry> entries(const std::string& feed_id) = 0;
};

class LocalFeedService : public FeedService {
 public:
  // healthy() gates post_event; the default is always-healthy.
  explicit LocalFeedService(FeedStore& store,
                            std::function<bool()> healthy = {});

  void create_feed(const std::string& key, const std::string& feed_id) override;
  void add_rule(const std::string& key, const std::string& feed_id,
                Comparison comparison, double threshold,
                const std::string& channel) override;
  bool post_event(const std::string& key, const std::string& feed_id,
                  const std::string& value) override;
  uint64_t entry_count() override;
  std::vector<Notification> notifications() override;
  std::vector<FeedEntry> entries(const std::string& feed_id) override;

 private:
  FeedStore& store_;
  std::function<bool()> healthy_;
};

}  // namespace wsn::cloud
