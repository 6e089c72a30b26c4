#include "wsn/http_service.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include "httplib.h"

namespace wsn::cloud {

namespace {

void send_error(httplib::Response& res, ServiceErrc errc, const std::string& detail) {
  res.status = http_status(errc);
  res.set_content(
      nlohmann::json{{"error", to_string(errc)}, {"detail", detail}}.dump(),
      "application/json");
}

void send_error(httplib::Response& res, const ServiceError& err) {
  send_error(res, err.errc(), err.detail());
}

// Wraps a handler so ServiceError maps onto the error body contract.
template <typename Fn>
auto guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const ServiceError& err) {
      send_error(res, err);
    } catch (const nlohmann::json::exception& err) {
      send_error(res, ServiceErrc::bad_request, err.what());
    }
  };
}

nlohmann::json parse_body(const httplib::Request& req) {
  nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw ServiceError(ServiceErrc::bad_request, "body is not a JSON object");
  }
  return body;
}

std::string require_string(const nlohmann::json& body, const char* field) {
  auto it = body.find(field);
  if (it == body.end() || !it->is_string()) {
    throw ServiceError(ServiceErrc::bad_request,
                       std::string("missing string field '") + field + "'");
  }
  return it->get<std::string>();
}

std::optional<double> optional_time_param(const httplib::Request& req,
                                          const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  std::string raw = req.get_param_value(name);
  try {
    size_t pos = 0;
    double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ServiceError(ServiceErrc::bad_request,
                       std::string("bad '") + name + "' parameter: " + raw);
  }
}

}  // namespace

struct HttpService::Impl {
  explicit Impl(FeedStore& store) : store(store) {}

  FeedStore& store;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  std::string key_of(const httplib::Request& req) {
    return req.get_header_value("X-Sense-Key");
  }

  void install_routes() {
    server.Post("/feeds", guarded([this](const httplib::Request& req,
                                         httplib::Response& res) {
                  nlohmann::json body = parse_body(req);
                  std::string feed_id = require_string(body, "feed_id");
                  store.create_feed(key_of(req), feed_id);
                  res.set_content(nlohmann::json{{"feed_id", feed_id}}.dump(),
                                  "application/json");
                }));

    server.Post("/events", guarded([this](const httplib::Request& req,
                                          httplib::Response& res) {
                  nlohmann::json body = parse_body(req);
                  FeedEntry entry =
                      store.post_event(key_of(req), require_string(body, "feed_id"),
                                       require_string(body, "value"));
                  res.set_content(entry_json(entry).dump(), "application/json");
                }));

    server.Post("/rules", guarded([this](const httplib::Request& req,
                                         httplib::Response& res) {
                  nlohmann::json body = parse_body(req);
                  auto threshold = body.find("threshold");
                  if (threshold == body.end() || !threshold->is_number()) {
                    throw ServiceError(ServiceErrc::bad_request,
                                       "missing numeric field 'threshold'");
                  }
                  AlertRule rule = store.add_rule(
                      key_of(req), require_string(body, "feed_id"),
                      parse_comparison(require_string(body, "comparison")),
                      threshold->get<double>(),
                      body.value("channel", std::string("log")));
                  res.set_content(rule_json(rule).dump(), "application/json");
                }));

    server.Get(R"(/feeds/([^/]+)/events)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 std::string feed_id = req.matches[1];
                 auto rows = store.entries(feed_id, optional_time_param(req, "from"),
                                           optional_time_param(req, "to"));
                 std::string format = req.has_param("format")
                                          ? req.get_param_value("format")
                                          : "json";
                 if (format == "json") {
                   res.set_content(entries_json(rows), "application/json");
                 } else if (format == "csv") {
                   res.set_content(entries_csv(rows), "text/csv");
                 } else {
                   throw ServiceError(ServiceErrc::bad_request,
                                      "unknown format '" + format + "'");
                 }
               }));

    server.Get(R"(/feeds/([^/]+)/aggregate)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 std::string feed_id = req.matches[1];
                 auto window = optional_time_param(req, "window");
                 if (!window) {
                   throw ServiceError(ServiceErrc::bad_request,
                                      "missing 'window' parameter");
                 }
                 AggFn fn = parse_agg_fn(req.has_param("fn")
                                             ? req.get_param_value("fn")
                                             : "mean");
                 nlohmann::json arr = nlohmann::json::array();
                 for (const AggRow& row : store.aggregate(feed_id, *window, fn)) {
                   arr.push_back(nlohmann::json{{"window_start", row.window_start},
                                                {"value", row.value}});
                 }
                 res.set_content(arr.dump(), "application/json");
               }));

    server.Get("/notifications",
               guarded([this](const httplib::Request&, httplib::Response& res) {
                 nlohmann::json arr = nlohmann::json::array();
                 for (const Notification& n : store.notifications()) {
                   arr.push_back(notification_json(n));
                 }
                 res.set_content(arr.dump(), "application/json");
               }));

    server.Get("/stats",
               guarded([this](const httplib::Request&, httplib::Response& res) {
                 res.set_content(
                     nlohmann::json{{"entries", store.entry_count()},
                                    {"feeds", store.feed_ids().size()},
                                    {"notifications", store.notifications().size()}}
                         .dump(),
                     "application/json");
               }));
  }
};

HttpService::HttpService(FeedStore& store) : impl_(std::make_unique<Impl>(store)) {
  impl_->install_routes();
}

HttpService::~HttpService() { stop(); }

int HttpService::listen_on(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    if (!impl_->server.bind_to_port(host, port)) {
      throw std::runtime_error("failed to bind " + host + ":" + std::to_string(port));
    }
    impl_->port = port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void HttpService::stop() {
  if (impl_ && impl_->thread.joinable()) {
    impl_->server.stop();
    impl_->thread.join();
  }
}

int HttpService::port() const { return impl_->port; }

struct RemoteFeedService::Impl {
  explicit Impl(const std::string& base_url) : client(base_url) {
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(5, 0);
  }

  httplib::Client client;

  httplib::Headers headers(const std::string& key) {
    return {{"X-Sense-Key", key}};
  }
};

RemoteFeedService::RemoteFeedService(const std::string& base_url)
    : impl_(std::make_unique<Impl>(base_url)) {}

RemoteFeedService::~RemoteFeedService() = default;

void RemoteFeedService::create_feed(const std::string& key,
                                    const std::string& feed_id) {
  auto res = impl_->client.Post("/feeds", impl_->headers(key),
                                nlohmann::json{{"feed_id", feed_id}}.dump(),
                                "application/json");
  if (!res || res->status != 200) {
    throw std::runtime_error("create_feed failed for '" + feed_id + "'");
  }
}

void RemoteFeedService::add_rule(const std::string& key, const std::string& feed_id,
                                 Comparison comparison, double threshold,
                                 const std::string& channel) {
  auto res = impl_->client.Post(
      "/rules", impl_->headers(key),
      nlohmann::json{{"feed_id", feed_id},
                     {"comparison", to_string(comparison)},
                     {"threshold", threshold},
                     {"channel", channel}}
          .dump(),
      "application/json");
  if (!res || res->status != 200) {
    throw std::runtime_error("add_rule failed for '" + feed_id + "'");
  }
}

bool RemoteFeedService::post_event(const std::string& key,
                                   const std::string& feed_id,
                                   const std::string& value) {
  auto res = impl_->client.Post(
      "/events", impl_->headers(key),
      nlohmann::json{{"feed_id", feed_id}, {"value", value}}.dump(),
      "application/json");
  return res && res->status == 200;
}

uint64_t RemoteFeedService::entry_count() {
  auto res = impl_->client.Get("/stats");
  if (!res || res->status != 200) return 0;
  return nlohmann::json::parse(res->body).value("entries", uint64_t{0});
}

std::vector<Notification> RemoteFeedService::notifications() {
  std::vector<Notification> out;
  auto res = impl_->client.Get("/notifications");
  if (!res || res->status != 200) return out;
  for (const nlohmann::json& j : nlohmann::json::parse(res->body)) {
    Notification n;
    n.rule_id = j.value("rule_id", uint64_t{0});
    n.entry_id = j.value("entry_id", uint64_t{0});
    n.feed_id = j.value("feed_id", std::string());
    n.channel = j.value("channel", std::string());
    n.created_at = j.value("created_at", 0.0);
    n.delivered_at = j.value("delivered_at", 0.0);
    out.push_back(std::move(n));
  }
  return out;
}

std::vector<FeedEntry> RemoteFeedService::entries(const std::string& feed_id) {
  std::vector<FeedEntry> out;
  auto res = impl_->client.Get("/feeds/" + feed_id + "/events");
  if (!res || res->status != 200) return out;
  for (const nlohmann::json& j : nlohmann::json::parse(res->body)) {
    FeedEntry e;
    e.entry_id = j.value("entry_id", uint64_t{0});
    e.feed_id = j.value("feed_id", std::string());
    e.value = j.value("value", std::string());
    e.received_at = j.value("received_at", 0.0);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace wsn::cloud
