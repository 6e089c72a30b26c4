#pragma once

#include <memory>
#include <string>

#include "wsn/feed_store.hpp"

namespace wsn::cloud {

// REST surface over a FeedStore:
//   POST /feeds                    {"feed_id": "..."}            (key required)
//   POST /events                   {"feed_id": "...", "value": "..."}
//   POST /rules                    {"feed_id", "comparison", "threshold", "channel"}
//   GET  /feeds/{id}/events?from=&to=&format=json|csv
//   GET  /feeds/{id}/aggregate?window=&fn=mean|median|sum|timescale
//   GET  /notifications
//   GET  /stats
// Mutating requests authenticate via the X-Sense-Key header. Errors are
// {"error": code, "detail": ...} with status 401/404/400.
class HttpService {
 public:
  explicit HttpService(FeedStore& store);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Binds and starts serving on a background thread. port 0 picks an
  // ephemeral port. Returns the bound port.
  int listen_on(const std::string& host, int port);
  void stop();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// FeedService backed by a remote HttpService instance.
class RemoteFeedService : public FeedService {
 public:
  explicit RemoteFeedService(const std::string& base_url);
  ~RemoteFeedService() override;

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
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wsn::cloud
