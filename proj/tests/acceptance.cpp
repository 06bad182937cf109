#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "httplib.h"

#include "gapcha/analytics.hpp"
#include "gapcha/bench.hpp"
#include "gapcha/codec.hpp"
#include "gapcha/http_server.hpp"
#include "gapcha/oracle.hpp"
#include "gapcha/random.hpp"
#include "gapcha/registry.hpp"
#include "gapcha/verifier.hpp"

using namespace gapcha;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kSeeds = 200;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("gapcha-accept-" + random_nonce_hex());
  ~TempDir() { fs::remove_all(path); }
};

void agreement_soundness_sensitivity() {
  const auto t0 = Clock::now();
  std::ostringstream agree_detail;
  std::ostringstream verify_detail;
  bool agree_ok = true;
  bool verify_ok = true;
  int perturbations = 0;
  for (const auto& f : registered_families()) {
    int agree = 0;
    int sound = 0;
    int sensitive = 0;
    int perturbed = 0;
    for (int s = 0; s < kSeeds; ++s) {
      const auto inst = generate(f.family_id, Seed{static_cast<std::uint64_t>(s)});
      agree += oracle::agrees(inst.truth, oracle::solve(f.family_id, inst.instruction, inst.scene));
      sound += verify(inst.truth, {"x", truth_as_answer(inst.truth), std::nullopt}).passed();
      const int cells = inst.scene.cells ? inst.scene.cells->rows * inst.scene.cells->cols : 0;
      for (const auto& wrong : minimal_perturbations(inst.truth, cells)) {
        ++perturbed;
        sensitive += verify(inst.truth, {"x", wrong, std::nullopt}).reason == Reason::WrongAnswer;
      }
    }
    agree_ok &= agree == kSeeds;
    verify_ok &= sound == kSeeds && sensitive == perturbed && perturbed > 0;
    perturbations += perturbed;
    agree_detail << ' ' << f.family_id << '=' << agree << '/' << kSeeds;
    verify_detail << ' ' << f.family_id << '=' << sound << '/' << kSeeds << ',' << sensitive << '/' << perturbed;
  }
  const double elapsed = seconds_since(t0);
  agree_ok &= elapsed < 600;
  std::ostringstream timing;
  timing << " in " << static_cast<int>(elapsed) << " s (budget 600 s)";
  report(agree_ok, "generator-oracle agreement", agree_detail.str() + timing.str());
  report(verify_ok, "verifier soundness and sensitivity",
         "truth passes, perturbations fail:" + verify_detail.str() + " (" + std::to_string(perturbations) +
             " perturbations)");
}

void determinism() {
  TempDir a;
  TempDir b;
  bench::generate_bench(a.path, bench::Profile::Lite, 20240601);
  bench::regenerate_from_manifest(a.path / "manifest.json", b.path);
  const auto da = bench::tree_digest(a.path);
  const auto db = bench::tree_digest(b.path);
  report(da == db, "lite benchmark determinism", "original " + da + ", regenerated " + db);
}

void motion_opacity() {
  constexpr int kInstances = 50;
  int frames = 0;
  int rejections = 0;
  double worst = 0;
  double critical = 0;
  for (const char* family : {"spooky_text", "spooky_circle"}) {
    for (int s = 0; s < kInstances; ++s) {
      const auto inst = generate(family, Seed{static_cast<std::uint64_t>(s)});
      const auto r = oracle::frame_uniformity(inst.scene, 0.05);
      frames += r.frames;
      rejections += r.rejections;
      worst = std::max(worst, r.worst_statistic);
      critical = r.critical;
    }
  }
  int counted = 0;
  for (int s = 0; s < kInstances; ++s) {
    const auto inst = generate("spooky_circle", Seed{static_cast<std::uint64_t>(s)});
    counted += oracle::solve_spooky_circles(inst.scene) == std::get<NumericAnswer>(inst.truth.payload).value;
  }
  const bool ok = rejections * 1000 <= 3 * frames && counted == kInstances;
  std::ostringstream d;
  d << rejections << " of " << frames << " frames rejected at alpha 0.05 (allowance 3/1000, worst chi2 " << worst
    << " vs critical " << critical << "); circle counts recovered " << counted << '/' << kInstances;
  report(ok, "motion-contrast opacity", d.str());
}

void protocol_safety() {
  auto now = std::make_shared<std::atomic<std::int64_t>>(1'800'000'000'000);
  ServiceConfig config;
  config.rate_limit_per_minute = 0;
  config.clock = [now] { return now->load(); };

  // Single use under 64-way contention.
  int clean_trials = 0;
  {
    ChallengeService svc(config);
    for (int trial = 0; trial < 100; ++trial) {
      const auto b = svc.issue_challenge(trial % 2 ? "dice_roll_path" : "box_folding", "k");
      const AnswerSubmission sub{b.challenge_id, truth_as_answer(*svc.peek_truth_for_testing(b.challenge_id)),
                                 std::nullopt};
      std::atomic<int> ready{0};
      std::atomic<int> non_replayed{0};
      std::vector<std::thread> threads;
      for (int i = 0; i < 64; ++i) {
        threads.emplace_back([&] {
          ++ready;
          while (ready.load() < 64) std::this_thread::yield();
          non_replayed += svc.submit(sub).reason != Reason::Replayed;
        });
      }
      for (auto& t : threads) t.join();
      clean_trials += non_replayed == 1;
    }
  }

  // TTL boundary.
  bool ttl_ok = false;
  {
    ChallengeService svc(config);
    const auto on_time = svc.issue_challenge("hole_counting", "k");
    const auto late = svc.issue_challenge("hole_counting", "k");
    const AnswerSubmission a{on_time.challenge_id, truth_as_answer(*svc.peek_truth_for_testing(on_time.challenge_id)),
                             std::nullopt};
    const AnswerSubmission b{late.challenge_id, truth_as_answer(*svc.peek_truth_for_testing(late.challenge_id)),
                             std::nullopt};
    *now += config.ttl_ms;
    const bool at_ttl = svc.submit(a).reason == Reason::Correct;
    *now += 1;
    ttl_ok = at_ttl && svc.submit(b).reason == Reason::Expired;
  }

  // Restart durability.
  bool restart_ok = false;
  {
    TempDir state;
    config.state_dir = state.path;
    AnswerSubmission sub;
    {
      ChallengeService svc(config);
      const auto b = svc.issue_challenge("subway_paths", "k");
      sub = {b.challenge_id, truth_as_answer(*svc.peek_truth_for_testing(b.challenge_id)), std::nullopt};
      restart_ok = svc.submit(sub).reason == Reason::Correct;
    }
    ChallengeService svc(config);
    restart_ok &= svc.submit(sub).reason == Reason::Replayed;
    config.state_dir.clear();
  }

  // Response scan over the HTTP API, success and error paths.
  int scanned = 0;
  int leaks = 0;
  {
    TempDir web;
    fs::create_directories(web.path / "answers");
    ChallengeService svc(config);
    HttpServer server(svc, HttpConfig{"127.0.0.1", 0, web.path, 1000});
    const int port = server.start();
    httplib::Client client("127.0.0.1", port);
    std::vector<std::string> secrets;
    auto scan = [&](const httplib::Result& res) {
      if (!res) return;
      ++scanned;
      for (const auto& s : secrets) leaks += res->body.find(s) != std::string::npos;
      leaks += res->body.find("\"truth\"") != std::string::npos;
      leaks += res->body.find("\"seed\"") != std::string::npos;
    };
    for (const auto& f : registered_families()) {
      auto res = client.Post("/v1/challenge", Json{{"family_id", f.family_id}}.dump(), "application/json");
      if (!res || res->status != 200) {
        ++leaks;
        continue;
      }
      const auto bundle = Json::parse(res->body).get<ChallengeBundle>();
      const auto truth = *svc.peek_truth_for_testing(bundle.challenge_id);
      secrets.push_back(Json(truth).dump());
      if (const auto* t = std::get_if<TextAnswer>(&truth.payload)) secrets.push_back(t->text);
      scan(res);
      for (const auto& a : bundle.assets) scan(client.Get(*a.url));
      const auto wrong = minimal_perturbations(truth, bundle.answer_type == AnswerType::Select
                                                          ? std::get<SelectSchema>(bundle.interaction_schema).rows *
                                                                std::get<SelectSchema>(bundle.interaction_schema).cols
                                                          : 0);
      scan(client.Post("/v1/submit", Json(AnswerSubmission{bundle.challenge_id, wrong.front(), std::nullopt}).dump(),
                       "application/json"));
      scan(client.Post("/v1/submit", Json(AnswerSubmission{bundle.challenge_id, wrong.front(), std::nullopt}).dump(),
                       "application/json"));
      scan(client.Get("/v1/assets/" + bundle.challenge_id + "/0"));
    }
    scan(client.Post("/v1/challenge", "{\"family_id\":\"nope\"}", "application/json"));
    scan(client.Post("/v1/submit", "{broken", "application/json"));
    scan(client.Get("/v1/families"));
    scan(client.Get("/answers/"));
    server.stop();
  }

  std::ostringstream d;
  d << clean_trials << "/100 trials with exactly one non-replayed verdict of 64; TTL+1 ms "
    << (ttl_ok ? "expires" : "does not expire") << "; consumed nonce after restart "
    << (restart_ok ? "replayed" : "accepted") << "; " << scanned << " responses scanned, " << leaks << " leaks";
  report(clean_trials == 100 && ttl_ok && restart_ok && leaks == 0 && scanned > 0, "protocol safety", d.str());
}

std::vector<double> count_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0;
    double equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      less += v[j] < v[i];
      equal += j != i && v[j] == v[i];
    }
    r[i] = 1 + less + equal / 2;
  }
  return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0;
  double sxx = 0;
  double syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<bool> pilot(int passes, int total) {
  std::vector<bool> v(static_cast<std::size_t>(total), false);
  std::fill_n(v.begin(), passes, true);
  return v;
}

void analytics_correctness() {
  std::mt19937_64 rng(99);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(3, 50)(rng);
    std::uniform_int_distribution<int> value(0, std::uniform_int_distribution<int>(1, 8)(rng));
    std::vector<double> x(n);
    std::vector<double> y(n);
    do {
      for (auto& v : x) v = value(rng);
    } while (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }));
    do {
      for (auto& v : y) v = value(rng);
    } while (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; }));
    worst = std::max(worst, std::abs(analytics::spearman_rho(x, y).rho - pearson(count_ranks(x), count_ranks(y))));
  }

  using analytics::Retention;
  const bool retention_ok = analytics::retention_filter(pilot(6, 20), pilot(10, 10)) == Retention::Reject &&
                            analytics::retention_filter(pilot(5, 20), pilot(9, 10)) == Retention::Reject &&
                            analytics::retention_filter(pilot(5, 20), pilot(10, 10)) == Retention::Retain;

  const std::map<std::string, std::pair<std::int64_t, std::int64_t>> hand = {
      {"box_folding", {5, 5}}, {"dice_roll_path", {20, 1}}, {"hole_counting", {10, 4}},
      {"red_dot", {8, 0}},     {"spooky_text", {12, 3}}};
  const auto table = analytics::family_table(analytics::load_attempts(fs::path(GAPCHA_FIXTURES) / "attempts.jsonl"));
  bool counts_ok = table.size() == hand.size();
  for (const auto& row : table) {
    const auto it = hand.find(row.family_id);
    counts_ok &= it != hand.end() && row.attempts == it->second.first && row.passes == it->second.second &&
                 row.pass_at_1 == static_cast<double>(it->second.second) / static_cast<double>(it->second.first);
  }

  std::ostringstream d;
  d << "max |rho - oracle| " << worst << " over 1000 tied vectors (tol 1e-12); retention boundaries "
    << (retention_ok ? "match" : "differ") << "; fixture Pass@1 " << (counts_ok ? "matches" : "differs from")
    << " hand counts";
  report(worst <= 1e-12 && retention_ok && counts_ok, "analytics correctness", d.str());
}

void benchmark_shape() {
  TempDir lite;
  TempDir main;
  const auto l = bench::generate_bench(lite.path, bench::Profile::Lite, 1);
  const auto m = bench::generate_bench(main.path, bench::Profile::Main, 1);
  auto per_family_ok = [](const bench::Manifest& manifest, int expected) {
    std::map<std::string, int> n;
    for (const auto& e : manifest.instances) ++n[e.family_id];
    if (n.size() != registered_families().size()) return false;
    return std::all_of(n.begin(), n.end(), [&](const auto& kv) { return kv.second == expected; });
  };
  const auto lite_read = bench::read_manifest(lite.path / "manifest.json");
  const auto main_read = bench::read_manifest(main.path / "manifest.json");
  const auto lite_json = Json::parse(std::ifstream(lite.path / "manifest.json"));
  const bool ok = per_family_ok(lite_read, 5) && per_family_ok(main_read, 20) &&
                  lite_read.instances.size() == l.instances.size() &&
                  main_read.instances.size() == m.instances.size() &&
                  lite_json.at("instances").size() == lite_json.at("instance_count").get<std::size_t>();
  std::ostringstream d;
  d << "lite " << lite_read.instances.size() << " instances (5 per family), main " << main_read.instances.size()
    << " (20 per family), manifest seed entries equal instance count";
  report(ok, "benchmark shape", d.str());
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::vector<std::pair<const char*, void (*)()>> checks = {
      {"generator-oracle agreement / verifier soundness and sensitivity", agreement_soundness_sensitivity},
      {"lite benchmark determinism", determinism},
      {"motion-contrast opacity", motion_opacity},
      {"protocol safety", protocol_safety},
      {"analytics correctness", analytics_correctness},
      {"benchmark shape", benchmark_shape}};
  for (const auto& [name, check] : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      report(false, name, std::string("threw ") + e.what());
    }
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << " in "
            << static_cast<int>(seconds_since(t0)) << " s" << std::endl;
  return failures == 0 ? 0 : 1;
}
