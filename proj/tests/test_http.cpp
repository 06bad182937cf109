#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "httplib.h"

#include "gapcha/codec.hpp"
#include "gapcha/http_server.hpp"
#include "gapcha/random.hpp"

using namespace gapcha;
namespace fs = std::filesystem;

namespace {

class Http : public ::testing::Test {
 protected:
  void SetUp() override {
    static_dir_ = fs::temp_directory_path() / ("gapcha-http-" + random_nonce_hex());
    fs::create_directories(static_dir_ / "answers" / "dice_roll_path" / "0");
    std::ofstream(static_dir_ / "index.html") << "<html>widget</html>";
    std::ofstream(static_dir_ / "answers" / "dice_roll_path" / "0" / "truth.json") << "{\"value\":4}";
  }

  void TearDown() override {
    if (server_) server_->stop();
    server_.reset();
    service_.reset();
    fs::remove_all(static_dir_);
  }

  void start(ServiceConfig config = {}) {
    service_ = std::make_unique<ChallengeService>(std::move(config));
    server_ = std::make_unique<HttpServer>(*service_, HttpConfig{"127.0.0.1", 0, static_dir_, 50});
    port_ = server_->start();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }

  httplib::Result post(const std::string& path, const Json& body) {
    return client_->Post(path, body.dump(), "application/json");
  }

  ChallengeBundle issue(const std::string& family) {
    auto res = post("/v1/challenge", {{"family_id", family}});
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 200) << res->body;
    responses_.push_back(res->body);
    return Json::parse(res->body).get<ChallengeBundle>();
  }

  VerificationResult submit(const AnswerSubmission& sub) {
    auto res = post("/v1/submit", sub);
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 200) << res->body;
    responses_.push_back(res->body);
    return Json::parse(res->body).get<VerificationResult>();
  }

  AnswerSubmission correct(const ChallengeBundle& b) {
    return {b.challenge_id, truth_as_answer(*service_->peek_truth_for_testing(b.challenge_id)), std::nullopt};
  }

  fs::path static_dir_;
  std::unique_ptr<ChallengeService> service_;
  std::unique_ptr<HttpServer> server_;
  std::unique_ptr<httplib::Client> client_;
  int port_ = 0;
  std::vector<std::string> responses_;
};

}  // namespace

TEST(AnswersPath, MatchesAnySegment) {
  EXPECT_TRUE(is_answers_path("/answers/x/truth.json"));
  EXPECT_TRUE(is_answers_path("/bench/ANSWERS/truth.json"));
  EXPECT_TRUE(is_answers_path("/answers"));
  EXPECT_FALSE(is_answers_path("/answersheet.html"));
  EXPECT_FALSE(is_answers_path("/v1/health"));
}

TEST_F(Http, HealthAndFamilies) {
  start();
  auto health = client_->Get("/v1/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(Json::parse(health->body)["status"], "ok");

  auto families = client_->Get("/v1/families");
  ASSERT_TRUE(families);
  const auto list = Json::parse(families->body);
  ASSERT_EQ(list.size(), registered_families().size());
  EXPECT_EQ(list[0]["family_id"], "dice_roll_path");
  EXPECT_TRUE(list[0].contains("gaps"));
}

TEST_F(Http, IssueFetchSubmitReplay) {
  start();
  const auto b = issue("static_jigsaw");
  ASSERT_EQ(b.assets.size(), 9u);
  for (const auto& a : b.assets) {
    ASSERT_TRUE(a.url);
    auto res = client_->Get(*a.url);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->get_header_value("Content-Type"), "image/png");
    EXPECT_EQ(res->get_header_value("Cache-Control"), "no-store");
    EXPECT_EQ(res->body.substr(1, 3), "PNG");
  }
  const auto sub = correct(b);
  EXPECT_EQ(submit(sub).reason, Reason::Correct);
  EXPECT_EQ(submit(sub).reason, Reason::Replayed);
  auto gone = client_->Get(*b.assets[0].url);
  ASSERT_TRUE(gone);
  EXPECT_EQ(gone->status, 404);
}

TEST_F(Http, DiceEndToEnd) {
  start();
  const auto b = issue("dice_roll_path");
  EXPECT_EQ(b.answer_type, AnswerType::Numeric);
  EXPECT_EQ(submit(correct(b)).outcome(), Outcome::Pass);
}

TEST_F(Http, RedDotClicksInWindowPass) {
  start();
  const auto b = issue("red_dot");
  auto res = client_->Get(*b.assets[0].url);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->get_header_value("Content-Type"), "image/apng");
  const auto truth = service_->peek_truth_for_testing(b.challenge_id);
  const auto& schedule = std::get<ClickSchedule>(truth->payload);
  ClickAnswer clicks;
  for (int i = 0; i < schedule.quota; ++i) {
    const auto& d = schedule.dots[static_cast<std::size_t>(i)];
    clicks.clicks.push_back({d.x + d.radius / 2, d.y, d.disappear_ms + 100});
  }
  EXPECT_EQ(submit({b.challenge_id, clicks, std::nullopt}).reason, Reason::Correct);
}

TEST_F(Http, ErrorsAreJsonWithStatus) {
  start();
  auto unknown_family = post("/v1/challenge", {{"family_id", "recaptcha"}});
  ASSERT_TRUE(unknown_family);
  EXPECT_EQ(unknown_family->status, 404);
  EXPECT_EQ(Json::parse(unknown_family->body)["error"], "UnknownFamily");

  auto malformed = client_->Post("/v1/submit", "{not json", "application/json");
  ASSERT_TRUE(malformed);
  EXPECT_EQ(malformed->status, 400);
  EXPECT_TRUE(Json::parse(malformed->body).contains("error"));

  auto missing_asset = client_->Get("/v1/assets/00ff/0");
  ASSERT_TRUE(missing_asset);
  EXPECT_EQ(missing_asset->status, 404);

  const auto unknown = submit({"0123456789abcdef0123456789abcdef", NumericAnswer{1}, std::nullopt});
  EXPECT_EQ(unknown.reason, Reason::UnknownChallenge);

  const auto b = issue("hole_counting");
  EXPECT_EQ(submit({b.challenge_id, TextAnswer{"2"}, std::nullopt}).reason, Reason::SchemaMismatch);
}

TEST_F(Http, RateLimitReturns429WithRetryAfter) {
  ServiceConfig config;
  config.rate_limit_per_minute = 3;
  start(config);
  for (int i = 0; i < 3; ++i) issue("dice_roll_path");
  auto res = post("/v1/challenge", {{"family_id", "dice_roll_path"}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 429);
  EXPECT_FALSE(res->get_header_value("Retry-After").empty());
  const auto body = Json::parse(res->body);
  EXPECT_EQ(body["error"], "RateLimited");
  EXPECT_GT(body["retry_after_ms"].get<std::int64_t>(), 0);
}

TEST_F(Http, ShortTtlExpires) {
  ServiceConfig config;
  config.ttl_ms = 1;
  start(config);
  const auto b = issue("dice_roll_path");
  const auto sub = correct(b);
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  EXPECT_EQ(submit(sub).reason, Reason::Expired);
}

TEST_F(Http, SweeperExpiresInBackground) {
  ServiceConfig config;
  config.ttl_ms = 1;
  start(config);
  const auto b = issue("dice_roll_path");
  for (int i = 0; i < 100 && service_->state_of(b.challenge_id) == SessionState::Pending; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  EXPECT_EQ(service_->state_of(b.challenge_id), SessionState::Expired);
}

TEST_F(Http, TrajectoryAckAndOverwrite) {
  const auto state = fs::temp_directory_path() / ("gapcha-http-state-" + random_nonce_hex());
  ServiceConfig config;
  config.state_dir = state;
  start(config);
  const auto b = issue("box_folding");
  submit(correct(b));
  TrajectoryRecord t;
  t.steps = 3;
  t.duration_ms = 2000;
  t.actions.click = 3;
  const Json body{{"challenge_id", b.challenge_id}, {"trajectory", t}};
  auto first = post("/v1/trajectory", body);
  ASSERT_TRUE(first);
  EXPECT_EQ(first->status, 200);
  EXPECT_EQ(Json::parse(first->body), (Json{{"ack", true}, {"challenge_id", b.challenge_id}, {"overwrite", false}}));
  auto second = post("/v1/trajectory", body);
  EXPECT_EQ(Json::parse(second->body)["overwrite"], true);

  auto unknown = post("/v1/trajectory", {{"challenge_id", "ffff"}, {"trajectory", t}});
  EXPECT_EQ(unknown->status, 404);
  t.steps = -2;
  auto invalid = post("/v1/trajectory", {{"challenge_id", b.challenge_id}, {"trajectory", t}});
  EXPECT_EQ(invalid->status, 400);
  server_->stop();
  fs::remove_all(state);
}

TEST_F(Http, StaticFilesServedButAnswersHidden) {
  start();
  auto index = client_->Get("/index.html");
  ASSERT_TRUE(index);
  EXPECT_EQ(index->status, 200);
  EXPECT_EQ(index->body, "<html>widget</html>");
  for (const char* path : {"/answers/dice_roll_path/0/truth.json", "/Answers/dice_roll_path/0/truth.json",
                           "/answers/", "/x/../answers/dice_roll_path/0/truth.json"}) {
    auto res = client_->Get(path);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 404) << path;
    EXPECT_EQ(res->body.find("\"value\":4"), std::string::npos) << path;
  }
}

TEST_F(Http, NoResponseCarriesTruthOrSeed) {
  start();
  for (const auto& f : registered_families()) {
    const auto b = issue(f.family_id);
    const auto truth = service_->peek_truth_for_testing(b.challenge_id);
    const auto truth_json = Json(*truth).dump();
    auto wrong = correct(b);
    if (auto* n = std::get_if<NumericAnswer>(&wrong.payload)) n->value += 1;
    submit(wrong);
    for (const auto& body : responses_) {
      EXPECT_EQ(body.find(truth_json), std::string::npos) << f.family_id;
      EXPECT_EQ(body.find("\"seed\""), std::string::npos);
      EXPECT_EQ(body.find("\"truth\""), std::string::npos);
    }
  }
}
