#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(WSNCLOUD_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  std::array<char, 512> buf;
  while (fgets(buf.data(), buf.size(), pipe) != nullptr) result.output += buf.data();
  int status = pclose(pipe);
  result.exit_code = WEXITSTATUS(status);
  return result;
}

std::string scenario_path() {
  return std::string(WSNCLOUD_SCENARIOS) + "/three_node.json";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("frame decode prints the field breakdown") {
  RunResult r = run("frame decode 7E000100FF --unescaped");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("frame_data=00") != std::string::npos);
  CHECK(r.output.find("length=1") != std::string::npos);
  CHECK(r.output.find("checksum=FF ok") != std::string::npos);
}

TEST_CASE("frame decode rejects a corrupt checksum") {
  RunResult r = run("frame decode 7E0001000000 --unescaped");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("checksum-mismatch expected=FF found=00") !=
        std::string::npos);
}

TEST_CASE("frame encode inverts decode") {
  RunResult encoded = run("frame encode 00 --unescaped");
  CHECK(encoded.exit_code == 0);
  CHECK(encoded.output == "7E000100FF\n");

  RunResult escaped = run("frame encode 7E");
  CHECK(escaped.exit_code == 0);
  CHECK(escaped.output == "7E00017D5E81\n");

  RunResult bad_hex = run("frame decode zz");
  CHECK(bad_hex.exit_code == 1);
}

TEST_CASE("frame decode shows io sample contents") {
  // built by the library serializer in test_frame_codec; frozen wire image
  RunResult inner = run("frame encode 920013A200409C2679FFFE0101000003020003A9 "
                        "--unescaped");
  REQUIRE(inner.exit_code == 0);
  std::string wire = inner.output.substr(0, inner.output.size() - 1);
  RunResult r = run("frame decode " + wire + " --unescaped");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("type=io-sample") != std::string::npos);
  CHECK(r.output.find("source_addr64=0013A200409C2679") != std::string::npos);
  CHECK(r.output.find("AD0=512") != std::string::npos);
  CHECK(r.output.find("AD1=937") != std::string::npos);
}

TEST_CASE("convert subcommand") {
  CHECK(run("convert adc-mv 512").output == "600.5865103\n");
  CHECK(run("convert adc-v 1023").output == "3.6\n");
  CHECK(run("convert divider 3.3 200 100").output == "1.1\n");
  CHECK(run("convert v-adc 2.1").output == "597\n");
  CHECK(run("convert c-adc 25").output == "213\n");
  CHECK(run("convert adc-mv 5000").exit_code == 1);
  CHECK(run("convert frobnicate 1").exit_code == 1);
}

TEST_CASE("simulate requires a readable scenario") {
  RunResult r = run("simulate --scenario /does/not/exist.json --until 10");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("config error") != std::string::npos);
}

TEST_CASE("simulate writes an empty report for a zero-length run") {
  RunResult r = run("simulate --scenario " + scenario_path() + " --until 0");
  CHECK(r.exit_code == 0);
  nlohmann::json report = nlohmann::json::parse(r.output);
  CHECK(report["cloud"]["entries_stored"] == 0);
  CHECK(report["readings"].empty());
}

TEST_CASE("simulate runs are reproducible byte for byte") {
  std::string a = "/tmp/wsncloud_report_a.json";
  std::string b = "/tmp/wsncloud_report_b.json";
  std::string t = "/tmp/wsncloud_trace.csv";
  RunResult r1 = run("simulate --scenario " + scenario_path() +
                     " --until 7200 --report " + a + " --trace " + t);
  RunResult r2 = run("simulate --scenario " + scenario_path() +
                     " --until 7200 --report " + b);
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);

  std::string report_a = slurp(a);
  CHECK(report_a == slurp(b));

  nlohmann::json report = nlohmann::json::parse(report_a);
  CHECK(report["cloud"]["entries_stored"] == 24);

  std::string trace = slurp(t);
  CHECK(trace.rfind("time,kind,node\n", 0) == 0);
  CHECK(trace.find("timer_expiry") != std::string::npos);

  SUBCASE("a different seed changes the report") {
    RunResult r3 = run("simulate --scenario " + scenario_path() +
                       " --until 7200 --seed 999 --report " + b);
    REQUIRE(r3.exit_code == 0);
    CHECK(slurp(b) != report_a);  // notification-free run still embeds the seed
  }
}

TEST_CASE("lifetime sweep emits the csv contract") {
  RunResult r = run("lifetime --payloads 2,102 --periods 60,600,1800,3600");
  CHECK(r.exit_code == 0);
  CHECK(r.output.rfind("payload_bytes,update_period_s,avg_current_ma,"
                       "lifetime_hours\n",
                       0) == 0);
  CHECK(r.output.find("# sleep-current bound: capacity/i_sleep = 3333.33 h") !=
        std::string::npos);

  RunResult single = run("lifetime --payloads 2 --periods 1800");
  int lines = 0;
  for (char c : single.output) lines += c == '\n';
  CHECK(lines == 3);  // header, one row, bound comment
}

TEST_CASE("alert drill prints per-trial latencies and the mean") {
  RunResult r = run("alert-drill --trials 3 --latency constant:11");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("1,11.000") != std::string::npos);
  CHECK(r.output.find("3,11.000") != std::string::npos);
  CHECK(r.output.find("# mean_s = 11.000") != std::string::npos);

  RunResult bounds = run("alert-drill --trials 10 --latency uniform:8:13");
  CHECK(bounds.exit_code == 0);

  RunResult bad = run("alert-drill --trials 0");
  CHECK(bad.exit_code != 0);
}
