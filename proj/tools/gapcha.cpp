#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "gapcha/analytics.hpp"
#include "gapcha/bench.hpp"
#include "gapcha/http_server.hpp"

namespace fs = std::filesystem;
using namespace gapcha;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

gapcha::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::int64_t ttl_ms = 120000;
  int rate_limit = 10;
  std::string state_dir = "gapcha-state";
  std::string static_dir;
};

/// Environment overrides (GAPCHA_PORT, GAPCHA_HOST, GAPCHA_TTL_MS,
/// GAPCHA_RATE_LIMIT, GAPCHA_STATE_DIR, GAPCHA_STATIC_DIR) then the JSON
/// config file; explicit flags win over both.
void apply_env(ServeOptions& o) {
  if (const char* v = std::getenv("GAPCHA_HOST")) o.host = v;
  if (const char* v = std::getenv("GAPCHA_PORT")) o.port = std::stoi(v);
  if (const char* v = std::getenv("GAPCHA_TTL_MS")) o.ttl_ms = std::stoll(v);
  if (const char* v = std::getenv("GAPCHA_RATE_LIMIT")) o.rate_limit = std::stoi(v);
  if (const char* v = std::getenv("GAPCHA_STATE_DIR")) o.state_dir = v;
  if (const char* v = std::getenv("GAPCHA_STATIC_DIR")) o.static_dir = v;
}

void apply_config(ServeOptions& o, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read config " + path);
  const auto j = Json::parse(in);
  o.host = j.value("host", o.host);
  o.port = j.value("port", o.port);
  o.ttl_ms = j.value("ttl_ms", o.ttl_ms);
  o.rate_limit = j.value("rate_limit_per_minute", o.rate_limit);
  o.state_dir = j.value("state_dir", o.state_dir);
  o.static_dir = j.value("static_dir", o.static_dir);
}

int run_gen_bench(const std::string& out, const std::string& profile, std::uint64_t seed) {
  const auto manifest = bench::generate_bench(out, bench::profile_from_string(profile), seed);
  std::cout << "wrote " << manifest.instances.size() << " instances (" << manifest.families.size() << " families, "
            << profile << ") to " << out << "\n";
  return kOk;
}

int run_selfcheck(const std::string& dir) {
  const auto report = bench::selfcheck(dir);
  for (const auto& f : report.failures) std::cout << "FAIL " << f.family_id << "/" << f.index << ": " << f.what << "\n";
  std::cout << report.instances << " instances, " << report.failures.size() << " failures\n";
  return report.ok() ? kOk : kCheckFailed;
}

int run_stats(const std::string& log, const std::string& out, const std::string& instance_family) {
  const auto records = analytics::load_attempts(log);
  const auto table = analytics::family_table(records);
  if (table.empty()) throw Error(ErrorCode::EmptyFamily, "log has no attempts: " + log);
  fs::create_directories(out);
  std::ofstream(fs::path(out) / "family_table.csv") << analytics::family_table_csv(table);
  std::cout << analytics::family_table_csv(table);

  int status = kOk;
  try {
    const auto report = analytics::correlation_report(records);
    std::ofstream(fs::path(out) / "correlations.csv") << analytics::correlation_csv(report.cells);
    const auto png = analytics::correlation_heatmap_png(report.cells);
    std::ofstream(fs::path(out) / "heatmap.png", std::ios::binary)
        .write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
    std::cout << analytics::correlation_csv(report.cells);
    for (const auto& c : report.cells) {
      if (!c.result) std::cout << "undefined rho for " << analytics::to_string(c.metric) << ": " << c.note << "\n";
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    status = kCheckFailed;
  }
  if (!instance_family.empty()) {
    const auto cells = analytics::instance_correlations(records, instance_family);
    std::ofstream(fs::path(out) / ("instance_" + instance_family + ".csv")) << analytics::correlation_csv(cells);
  }
  return status;
}

int run_serve(const ServeOptions& o) {
  ServiceConfig config;
  config.ttl_ms = o.ttl_ms;
  config.rate_limit_per_minute = o.rate_limit;
  config.state_dir = o.state_dir;
  ChallengeService service(config);
  HttpConfig http;
  http.host = o.host;
  http.port = o.port;
  http.static_dir = o.static_dir;
  HttpServer server(service, http);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.run();
  g_server = nullptr;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gapcha: procedural CAPTCHA generation, verification and analytics"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 1;
  std::string out;
  std::string config_path;
  std::string log_level = "info";
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out, "output directory");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  auto* gen = app.add_subcommand("gen-bench", "freeze a benchmark set");
  std::string profile = "main";
  gen->add_option("--profile", profile, "main or lite")->check(CLI::IsMember({"main", "lite"}));

  auto* check = app.add_subcommand("selfcheck", "re-verify every instance of a benchmark");
  std::string bench_dir;
  check->add_option("bench_dir", bench_dir, "benchmark directory")->required();

  auto* stats = app.add_subcommand("stats", "Pass@1 table and Spearman correlations");
  std::string log_path;
  std::string instance_family;
  stats->add_option("log", log_path, "attempt log (.jsonl) or result table (.csv)")->required();
  stats->add_option("--instance-family", instance_family, "also correlate within this family");

  auto* serve = app.add_subcommand("serve", "run the challenge service");
  ServeOptions serve_opts;
  std::optional<std::string> host;
  std::optional<int> port;
  std::optional<std::int64_t> ttl;
  std::optional<int> rate;
  std::optional<std::string> state_dir;
  std::optional<std::string> static_dir;
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--ttl-ms", ttl);
  serve->add_option("--rate-limit", rate, "issues per minute per client");
  serve->add_option("--state-dir", state_dir, "write-ahead log, snapshot and attempt log");
  serve->add_option("--static-dir", static_dir, "widget files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  spdlog::set_level(spdlog::level::from_str(log_level));
  try {
    if (*gen) {
      if (out.empty()) {
        std::cerr << "gen-bench needs --out\n";
        return kUsage;
      }
      return run_gen_bench(out, profile, seed);
    }
    if (*check) return run_selfcheck(bench_dir);
    if (*stats) return run_stats(log_path, out.empty() ? "stats" : out, instance_family);
    if (*serve) {
      apply_env(serve_opts);
      if (!config_path.empty()) apply_config(serve_opts, config_path);
      if (host) serve_opts.host = *host;
      if (port) serve_opts.port = *port;
      if (ttl) serve_opts.ttl_ms = *ttl;
      if (rate) serve_opts.rate_limit = *rate;
      if (state_dir) serve_opts.state_dir = *state_dir;
      if (static_dir) serve_opts.static_dir = *static_dir;
      return run_serve(serve_opts);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidParams) {
      std::cerr << e.what() << "\n";
      return kUsage;
    }
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}
