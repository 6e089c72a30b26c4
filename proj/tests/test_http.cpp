#include "wsn/http_service.hpp"

#include <atomic>
#include <chrono>
#include <set>
#include <thread>

#include "doctest.h"
#include "httplib.h"

using namespace wsn::cloud;

namespace {

double wall_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

struct ServiceFixture {
  FeedStore store;
  HttpService service;
  int port;

  ServiceFixture()
      : store(wall_seconds, LatencyDistribution::parse("constant:11"), 7),
        service(store),
        port(service.listen_on("127.0.0.1", 0)) {
    store.register_key("k1", "tester");
    store.create_feed("k1", "indoor-temperature");
  }

  httplib::Client client() {
    httplib::Client cli("127.0.0.1", port);
    cli.set_connection_timeout(5, 0);
    return cli;
  }
};

httplib::Headers auth() { return {{"X-Sense-Key", "k1"}}; }

}  // namespace

TEST_CASE("post requires a registered key") {
  ServiceFixture f;
  auto cli = f.client();

  uint64_t before = f.store.digest();
  auto res = cli.Post("/events", R"({"feed_id":"indoor-temperature","value":"25.10"})",
                      "application/json");
  REQUIRE(res);
  CHECK(res->status == 401);
  nlohmann::json body = nlohmann::json::parse(res->body);
  CHECK(body["error"] == "auth");
  CHECK(f.store.digest() == before);

  auto ok = cli.Post("/events", auth(),
                     R"({"feed_id":"indoor-temperature","value":"25.10"})",
                     "application/json");
  REQUIRE(ok);
  CHECK(ok->status == 200);
  nlohmann::json entry = nlohmann::json::parse(ok->body);
  CHECK(entry["entry_id"] == 1);
  CHECK(entry["value"] == "25.10");
}

TEST_CASE("error statuses follow the error codes") {
  ServiceFixture f;
  auto cli = f.client();

  auto missing = cli.Post("/events", auth(), R"({"feed_id":"nope","value":"1"})",
                          "application/json");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(nlohmann::json::parse(missing->body)["error"] == "not-found");

  auto bad = cli.Post("/events", auth(),
                      R"({"feed_id":"indoor-temperature","value":"abc"})",
                      "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(nlohmann::json::parse(bad->body)["error"] == "bad-request");

  auto not_json = cli.Post("/events", auth(), "not json", "application/json");
  REQUIRE(not_json);
  CHECK(not_json->status == 400);

  auto bad_range = cli.Get("/feeds/indoor-temperature/events?from=x");
  REQUIRE(bad_range);
  CHECK(bad_range->status == 400);

  auto bad_format = cli.Get("/feeds/indoor-temperature/events?format=xml");
  REQUIRE(bad_format);
  CHECK(bad_format->status == 400);

  auto unknown_feed = cli.Get("/feeds/ghost/events");
  REQUIRE(unknown_feed);
  CHECK(unknown_feed->status == 404);
}

TEST_CASE("json and csv readbacks are information equivalent") {
  ServiceFixture f;
  auto cli = f.client();
  for (int i = 0; i < 10; ++i) {
    char value[16];
    std::snprintf(value, sizeof value, "%.2f", 20.0 + i * 0.5);
    auto res = cli.Post("/events", auth(),
                        nlohmann::json{{"feed_id", "indoor-temperature"},
                                       {"value", value}}
                            .dump(),
                        "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 200);
  }

  auto json_res = cli.Get("/feeds/indoor-temperature/events?format=json");
  auto csv_res = cli.Get("/feeds/indoor-temperature/events?format=csv");
  REQUIRE(json_res);
  REQUIRE(csv_res);
  CHECK(json_res->status == 200);
  CHECK(csv_res->status == 200);

  nlohmann::json rows = nlohmann::json::parse(json_res->body);
  REQUIRE(rows.size() == 10);

  std::string csv = csv_res->body;
  size_t pos = csv.find('\n') + 1;
  size_t i = 0;
  while (pos < csv.size()) {
    size_t end = csv.find('\n', pos);
    std::string line = csv.substr(pos, end - pos);
    pos = end + 1;
    unsigned long long id;
    char feed[64];
    char value[64];
    double at;
    REQUIRE(std::sscanf(line.c_str(), "%llu,%63[^,],%63[^,],%lf", &id, feed,
                        value, &at) == 4);
    CHECK(rows[i]["entry_id"].get<uint64_t>() == id);
    CHECK(rows[i]["feed_id"].get<std::string>() == feed);
    CHECK(rows[i]["value"].get<std::string>() == value);
    CHECK(rows[i]["received_at"].get<double>() == at);
    ++i;
  }
  CHECK(i == rows.size());
}

TEST_CASE("rules and notifications over http") {
  ServiceFixture f;
  auto cli = f.client();
  f.store.create_feed("k1", "node-voltage");

  auto rule = cli.Post("/rules", auth(),
                       R"({"feed_id":"node-voltage","comparison":"<=",)"
                       R"("threshold":2.1,"channel":"email_sim"})",
                       "application/json");
  REQUIRE(rule);
  CHECK(rule->status == 200);
  CHECK(nlohmann::json::parse(rule->body)["armed"] == true);

  cli.Post("/events", auth(), R"({"feed_id":"node-voltage","value":"2.05"})",
           "application/json");
  auto notes = cli.Get("/notifications");
  REQUIRE(notes);
  nlohmann::json arr = nlohmann::json::parse(notes->body);
  REQUIRE(arr.size() == 1);
  CHECK(arr[0]["channel"] == "email_sim");
  CHECK(arr[0]["delivered_at"].get<double>() -
            arr[0]["created_at"].get<double>() ==
        doctest::Approx(11.0).epsilon(1e-9));
}

TEST_CASE("aggregate endpoint") {
  ServiceFixture f;
  auto cli = f.client();
  for (const char* v : {"1", "2", "3"}) {
    cli.Post("/events", auth(),
             nlohmann::json{{"feed_id", "indoor-temperature"}, {"value", v}}.dump(),
             "application/json");
  }
  auto res = cli.Get("/feeds/indoor-temperature/aggregate?window=3600&fn=mean");
  REQUIRE(res);
  CHECK(res->status == 200);
  nlohmann::json rows = nlohmann::json::parse(res->body);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0]["value"].get<double>() == 2.0);

  auto bad = cli.Get("/feeds/indoor-temperature/aggregate?window=60&fn=mode");
  REQUIRE(bad);
  CHECK(bad->status == 400);
}

TEST_CASE("feed creation over http") {
  ServiceFixture f;
  auto cli = f.client();
  auto res = cli.Post("/feeds", auth(), R"({"feed_id":"extra"})",
                      "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  auto post = cli.Post("/events", auth(), R"({"feed_id":"extra","value":"1"})",
                       "application/json");
  REQUIRE(post);
  CHECK(post->status == 200);

  auto stats = cli.Get("/stats");
  REQUIRE(stats);
  nlohmann::json j = nlohmann::json::parse(stats->body);
  CHECK(j["feeds"] == 2);
  CHECK(j["entries"] == 1);
}

TEST_CASE("entry ids stay strictly monotone under concurrent posters") {
  ServiceFixture f;
  constexpr int kClients = 8;
  constexpr int kPosts = 100;
  std::vector<std::vector<uint64_t>> per_client(kClients);
  std::vector<std::thread> threads;
  std::atomic<int> failures{0};

  for (int c = 0; c < kClients; ++c) {
    threads.emplace_back([&, c] {
      httplib::Client cli("127.0.0.1", f.port);
      cli.set_connection_timeout(5, 0);
      for (int i = 0; i < kPosts; ++i) {
        auto res = cli.Post("/events", auth(),
                            R"({"feed_id":"indoor-temperature","value":"1.00"})",
                            "application/json");
        if (!res || res->status != 200) {
          failures.fetch_add(1);
          return;
        }
        per_client[c].push_back(
            nlohmann::json::parse(res->body)["entry_id"].get<uint64_t>());
      }
    });
  }
  for (auto& t : threads) t.join();
  REQUIRE(failures.load() == 0);

  std::set<uint64_t> all;
  for (const auto& ids : per_client) {
    REQUIRE(ids.size() == kPosts);
    for (size_t i = 1; i < ids.size(); ++i) {
      CHECK(ids[i] > ids[i - 1]);  // ids assigned in this client's call order
    }
    all.insert(ids.begin(), ids.end());
  }
  CHECK(all.size() == kClients * kPosts);
  CHECK(*all.begin() == 1);
  CHECK(*all.rbegin() == kClients * kPosts);

  // arrival order view: received_at is non-decreasing in entry id
  auto rows = f.store.entries("indoor-temperature");
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].entry_id == rows[i - 1].entry_id + 1);
    CHECK(rows[i].received_at >= rows[i - 1].received_at);
  }
}

TEST_CASE("remote feed service speaks the same protocol") {
  ServiceFixture f;
  RemoteFeedService remote("http://127.0.0.1:" + std::to_string(f.port));
  remote.create_feed("k1", "remote-feed");
  remote.add_rule("k1", "remote-feed", Comparison::less_equal, 2.1, "log");
  CHECK(remote.post_event("k1", "remote-feed", "2.00"));
  CHECK_FALSE(remote.post_event("wrong-key", "remote-feed", "2.00"));
  CHECK(remote.entry_count() == 1);
  auto notes = remote.notifications();
  REQUIRE(notes.size() == 1);
  CHECK(notes[0].channel == "log");
  auto entries = remote.entries("remote-feed");
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].value == "2.00");
}
