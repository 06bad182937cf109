#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "gapcha/codec.hpp"
#include "gapcha/random.hpp"
#include "gapcha/service.hpp"

using namespace gapcha;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gapcha-svc-" + random_nonce_hex());
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct FakeClock {
  std::shared_ptr<std::atomic<std::int64_t>> now = std::make_shared<std::atomic<std::int64_t>>(1'700'000'000'000);
  std::function<std::int64_t()> fn() const {
    return [n = now] { return n->load(); };
  }
};

ServiceConfig config(const FakeClock& clock, fs::path dir = {}, int rate = 0) {
  ServiceConfig c;
  c.clock = clock.fn();
  c.state_dir = std::move(dir);
  c.rate_limit_per_minute = rate;
  return c;
}

AnswerSubmission correct(ChallengeService& svc, const ChallengeBundle& b) {
  const auto truth = svc.peek_truth_for_testing(b.challenge_id);
  EXPECT_TRUE(truth.has_value());
  return AnswerSubmission{b.challenge_id, truth_as_answer(*truth), std::nullopt};
}

TrajectoryRecord sample_trajectory(std::int64_t steps) {
  TrajectoryRecord t;
  t.steps = steps;
  t.duration_ms = 4000;
  t.actions.click = steps;
  t.reasoning_tokens = 120;
  t.events = {{"click", 10, 20, "cell:0", 100}, {"click", 30, 40, "cell:1", 900}};
  return t;
}

}  // namespace

TEST(RateLimit, EleventhIssueInWindowIsLimited) {
  TokenBucketLimiter limiter(10);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(limiter.try_acquire("a", 1000), 0);
  const auto retry = limiter.try_acquire("a", 1000);
  EXPECT_GT(retry, 0);
  EXPECT_LE(retry, 6000);
  EXPECT_EQ(limiter.try_acquire("b", 1000), 0);
  EXPECT_EQ(limiter.try_acquire("a", 1000 + retry), 0);
}

TEST(Service, HappyPath) {
  FakeClock clock;
  ChallengeService svc(config(clock));
  const auto b = svc.issue_challenge("dice_roll_path", "k");
  EXPECT_EQ(b.ttl_ms, 120000);
  EXPECT_EQ(b.answer_type, AnswerType::Numeric);
  EXPECT_EQ(svc.submit(correct(svc, b)).reason, Reason::Correct);
  EXPECT_EQ(svc.state_of(b.challenge_id), SessionState::Consumed);
}

TEST(Service, RateLimitedWithRetryAfter) {
  FakeClock clock;
  ChallengeService svc(config(clock, {}, 10));
  for (int i = 0; i < 10; ++i) svc.issue_challenge("dice_roll_path", "k");
  try {
    svc.issue_challenge("dice_roll_path", "k");
    FAIL() << "expected rate limit";
  } catch (const RateLimitedError& e) {
    EXPECT_EQ(e.code(), ErrorCode::RateLimited);
    EXPECT_GT(e.retry_after_ms(), 0);
  }
  EXPECT_NO_THROW(svc.issue_challenge("dice_roll_path", "other"));
}

TEST(Service, UnknownFamily) {
  FakeClock clock;
  ChallengeService svc(config(clock));
  try {
    svc.issue_challenge("captcha_v2", "k");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownFamily);
  }
}

TEST(Service, DistinctIds) {
  FakeClock clock;
  ChallengeService svc(config(clock));
  std::set<std::string> ids;
  for (int i = 0; i < 50; ++i) ids.insert(svc.issue_challenge("box_folding", "k").challenge_id);
  EXPECT_EQ(ids.size(), 50u);
}

TEST(Service, ReplayIsRejected) {
  FakeClock clock;
  ChallengeService svc(config(clock));
  const auto b = svc.issue_challenge("hole_counting", "k");
  const auto sub = correct(svc, b);
  EXPECT_EQ(svc.submit(sub).reason, Reason::Correct);
  EXPECT_EQ(svc.submit(sub).reason, Reason::Replayed);
}

TEST(Service, WrongAnswerConsumesNonce) {
  FakeClock clock;
  ChallengeService svc(config(clock));
  const auto b = svc.issue_challenge("hole_counting", "k");
  auto sub = correct(svc, b);
  std::get<NumericAnswer>(sub.payload).value += 1;
  EXPECT_EQ(svc.submit(sub).reason, Reason::WrongAnswer);
  EXPECT_EQ(svc.submit(correct(svc, svc.issue_challenge("hole_counting", "k"))).reason, Reason::Correct);
  std::get<NumericAnswer>(sub.payload).value -= 1;
  EXPECT_EQ(svc.submit(sub).reason, Reason::Replayed);
}

TEST(Service, SchemaMismatchLeavesNoncePending) {
  FakeClock clock;
  ChallengeService svc(config(clock));
  const auto b = svc.issue_challenge("hole_counting", "k");
  EXPECT_EQ(svc.submit({b.challenge_id, TextAnswer{"3"}, std::nullopt}).reason, Reason::SchemaMismatch);
  EXPECT_EQ(svc.state_of(b.challenge_id), SessionState::Pending);
}

TEST(Service, UnknownChallenge) {
  FakeClock clock;
  ChallengeService svc(config(clock));
  EXPECT_EQ(svc.submit({"00000000000000000000000000000000", NumericAnswer{1}, std::nullopt}).reason,
            Reason::UnknownChallenge);
}

TEST(Service, TtlBoundary) {
  FakeClock clock;
  ChallengeService svc(config(clock));
  const auto on_time = svc.issue_challenge("dice_roll_path", "k");
  const auto late = svc.issue_challenge("dice_roll_path", "k");
  const auto on_time_sub = correct(svc, on_time);
  const auto late_sub = correct(svc, late);
  *clock.now += 120000;
  EXPECT_EQ(svc.submit(on_time_sub).reason, Reason::Correct);
  *clock.now += 1;
  EXPECT_EQ(svc.submit(late_sub).reason, Reason::Expired);
  EXPECT_EQ(svc.state_of(late.challenge_id), SessionState::Expired);
  // Once expired, never verifies.
  EXPECT_NE(svc.submit(late_sub).reason, Reason::Correct);
}

TEST(Service, SweeperExpiresOverdue) {
  FakeClock clock;
  ChallengeService svc(config(clock));
  const auto a = svc.issue_challenge("dice_roll_path", "k");
  *clock.now += 60000;
  const auto b = svc.issue_challenge("dice_roll_path", "k");
  *clock.now += 60001;
  EXPECT_EQ(svc.expire_due(), 1);
  EXPECT_EQ(svc.state_of(a.challenge_id), SessionState::Expired);
  EXPECT_EQ(svc.state_of(b.challenge_id), SessionState::Pending);
  EXPECT_THROW(svc.asset(a.challenge_id, 0), Error);
}

TEST(Service, ConcurrentDuplicateSubmissionsConsumeOnce) {
  FakeClock clock;
  ChallengeService svc(config(clock));
  for (int trial = 0; trial < 10; ++trial) {
    const auto b = svc.issue_challenge("box_folding", "k");
    const auto sub = correct(svc, b);
    std::atomic<int> ready{0};
    std::vector<Reason> reasons(64);
    std::vector<std::thread> threads;
    for (int i = 0; i < 64; ++i) {
      threads.emplace_back([&, i] {
        ++ready;
        while (ready.load() < 64) std::this_thread::yield();
        reasons[static_cast<std::size_t>(i)] = svc.submit(sub).reason;
      });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(std::count(reasons.begin(), reasons.end(), Reason::Correct), 1);
    EXPECT_EQ(std::count(reasons.begin(), reasons.end(), Reason::Replayed), 63);
  }
}

TEST(Service, AssetsServedWhilePending) {
  FakeClock clock;
  ChallengeService svc(config(clock));
  const auto b = svc.issue_challenge("static_jigsaw", "k");
  ASSERT_EQ(b.assets.size(), 9u);
  for (const auto& a : b.assets) {
    ASSERT_TRUE(a.url.has_value());
    EXPECT_FALSE(a.data_base64.has_value());
    const auto [bytes, media] = svc.asset(b.challenge_id, a.asset_id);
    EXPECT_EQ(media, "image/png");
    EXPECT_GT(bytes.size(), 8u);
  }
  EXPECT_THROW(svc.asset(b.challenge_id, 9), Error);
  svc.submit(correct(svc, b));
  EXPECT_THROW(svc.asset(b.challenge_id, 0), Error);
}

TEST(Service, RestartKeepsConsumedAndPending) {
  TempDir dir;
  FakeClock clock;
  std::string consumed;
  std::string pending;
  AnswerSubmission pending_sub;
  std::vector<std::uint8_t> asset_before;
  {
    ChallengeService svc(config(clock, dir.path));
    const auto a = svc.issue_challenge("subway_paths", "k");
    const auto b = svc.issue_challenge("spooky_circle", "k");
    consumed = a.challenge_id;
    pending = b.challenge_id;
    EXPECT_EQ(svc.submit(correct(svc, a)).reason, Reason::Correct);
    pending_sub = correct(svc, b);
    asset_before = svc.asset(pending, 0).first;
  }
  {
    ChallengeService svc(config(clock, dir.path));
    EXPECT_EQ(svc.state_of(consumed), SessionState::Consumed);
    EXPECT_EQ(svc.submit(correct(svc, svc.issue_challenge("subway_paths", "k"))).reason, Reason::Correct);
    EXPECT_EQ(svc.asset(pending, 0).first, asset_before);
  }
  {
    ChallengeService svc(config(clock, dir.path));
    EXPECT_EQ(svc.submit({consumed, SelectionAnswer{}, std::nullopt}).reason, Reason::Replayed);
    EXPECT_EQ(svc.submit(pending_sub).reason, Reason::Correct);
  }
  ChallengeService svc(config(clock, dir.path));
  EXPECT_EQ(svc.submit(pending_sub).reason, Reason::Replayed);
  const auto records = AttemptLog::read(svc.attempt_log_path());
  EXPECT_EQ(records.size(), 3u);
}

TEST(Service, AttemptLogRecordsOutcomesAndTrajectories) {
  TempDir dir;
  FakeClock clock;
  ChallengeService svc(config(clock, dir.path));
  const auto a = svc.issue_challenge("dice_roll_path", "k");
  auto sub = correct(svc, a);
  sub.trajectory = sample_trajectory(2);
  *clock.now += 2500;
  svc.submit(sub);

  const auto b = svc.issue_challenge("dice_roll_path", "k");
  *clock.now += 120001;
  svc.expire_due();

  const auto first = svc.ingest_trajectory(b.challenge_id, sample_trajectory(3));
  EXPECT_FALSE(first.overwrite);
  const auto second = svc.ingest_trajectory(b.challenge_id, sample_trajectory(5));
  EXPECT_TRUE(second.overwrite);
  EXPECT_EQ(second.challenge_id, b.challenge_id);

  const auto records = AttemptLog::read(svc.attempt_log_path());
  ASSERT_EQ(records.size(), 2u);
  std::map<std::string, AttemptRecord> by_id;
  for (const auto& r : records) by_id[r.challenge_id] = r;
  EXPECT_EQ(by_id[a.challenge_id].outcome, Outcome::Pass);
  EXPECT_EQ(by_id[a.challenge_id].duration_ms, 2500);
  EXPECT_EQ(by_id[a.challenge_id].policy_version, 1);
  ASSERT_TRUE(by_id[a.challenge_id].trajectory);
  EXPECT_EQ(by_id[a.challenge_id].trajectory->steps, 2);
  EXPECT_EQ(by_id[b.challenge_id].reason, Reason::Expired);
  ASSERT_TRUE(by_id[b.challenge_id].trajectory);
  EXPECT_EQ(by_id[b.challenge_id].trajectory->steps, 5);
}

TEST(Service, TrajectoryErrors) {
  FakeClock clock;
  ChallengeService svc(config(clock));
  try {
    svc.ingest_trajectory("ffffffffffffffffffffffffffffffff", sample_trajectory(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownChallenge);
  }
  const auto b = svc.issue_challenge("dice_roll_path", "k");
  auto bad = sample_trajectory(1);
  bad.steps = -1;
  try {
    svc.ingest_trajectory(b.challenge_id, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidTrajectory);
  }
}

TEST(Service, BundlesNeverCarryTruthOrSeed) {
  TempDir dir;
  FakeClock clock;
  ChallengeService svc(config(clock, dir.path));
  for (const auto& f : registered_families()) {
    const auto b = svc.issue_challenge(f.family_id, "k");
    const auto truth = svc.peek_truth_for_testing(b.challenge_id);
    ASSERT_TRUE(truth);
    const auto text = Json(b).dump();
    EXPECT_EQ(text.find("\"truth\""), std::string::npos);
    EXPECT_EQ(text.find("\"seed\""), std::string::npos);
    EXPECT_EQ(text.find("\"scene\""), std::string::npos);
    EXPECT_EQ(text.find(Json(*truth).dump()), std::string::npos) << f.family_id;
    if (const auto* t = std::get_if<TextAnswer>(&truth->payload)) EXPECT_EQ(text.find(t->text), std::string::npos);
  }
}
