#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gapcha/codec.hpp"
#include "gapcha/generators.hpp"
#include "gapcha/types.hpp"
#include "gapcha/verifier.hpp"

namespace gapcha {

/// Per-key token bucket: `capacity` tokens, refilled continuously at
/// `capacity` per `window_ms`.
class TokenBucketLimiter {
 public:
  TokenBucketLimiter(int capacity, std::int64_t window_ms = 60000);

  /// Takes one token. Returns 0 on success, otherwise the ms until a token is available.
  std::int64_t try_acquire(const std::string& key, std::int64_t now_ms);

 private:
  struct Bucket {
    double tokens = 0;
    std::int64_t updated_ms = 0;
  };
  int capacity_;
  std::int64_t window_ms_;
  std::mutex mutex_;
  std::map<std::string, Bucket> buckets_;
};

enum class SessionState { Pending, Consumed, Expired };

std::string_view to_string(SessionState state);
SessionState session_state_from_string(std::string_view text);

/// Server-side record of an issued challenge. Never leaves the server.
struct SessionEntry {
  std::string challenge_id;
  std::string family_id;
  std::optional<GroundTruth> truth;  // dropped once the entry leaves Pending
  std::int64_t issued_at_ms = 0;
  std::int64_t ttl_ms = 0;
  SessionState state = SessionState::Pending;
  std::string client_key;
  Seed seed;  // kept so assets can be re-rendered after a restart
  DifficultyParams params;
};

void to_json(Json& j, const SessionEntry& v);
void from_json(const Json& j, SessionEntry& v);

struct TrajectorySummary {
  std::int64_t steps = 0;
  ActionCounts actions;
  std::optional<std::int64_t> reasoning_tokens;
  std::int64_t duration_ms = 0;
};

/// One line of the attempt log; one per consumed or expired challenge.
struct AttemptRecord {
  std::string challenge_id;
  std::string family_id;
  Outcome outcome = Outcome::Fail;
  Reason reason = Reason::WrongAnswer;
  std::int64_t issued_at_ms = 0;
  std::int64_t submitted_at_ms = 0;
  std::int64_t duration_ms = 0;
  int policy_version = 0;
  std::optional<TrajectoryRecord> trajectory;
};

void to_json(Json& j, const AttemptRecord& v);
void from_json(const Json& j, AttemptRecord& v);

/// Append-only JSONL log of attempts and late trajectories.
class AttemptLog {
 public:
  explicit AttemptLog(std::filesystem::path path);

  void append_attempt(const AttemptRecord& record);
  /// Returns true when a trajectory for this challenge was already logged.
  bool append_trajectory(const std::string& challenge_id, const TrajectoryRecord& trajectory);

  /// Attempts with any later trajectory lines merged in (last write wins).
  static std::vector<AttemptRecord> read(const std::filesystem::path& path);

 private:
  void write_line(const Json& line);

  std::filesystem::path path_;
  std::mutex mutex_;
  std::ofstream out_;
  std::set<std::string> seen_trajectories_;
};

struct ServiceConfig {
  std::int64_t ttl_ms = 120000;
  int rate_limit_per_minute = 10;  // <= 0 disables
  std::filesystem::path state_dir;  // empty keeps everything in memory
  VerifyPolicy policy;
  std::function<std::int64_t()> clock;  // ms since epoch; system clock when unset
};

struct TrajectoryAck {
  std::string challenge_id;
  bool overwrite = false;
};

/// Challenge-response protocol: issue, submit, trajectory ingestion. All
/// state transitions go through one lock; generation, rasterisation and
/// verification run outside it.
class ChallengeService {
 public:
  explicit ChallengeService(ServiceConfig config);
  ~ChallengeService();
  ChallengeService(const ChallengeService&) = delete;
  ChallengeService& operator=(const ChallengeService&) = delete;

  /// Throws RateLimitedError or UnknownFamily.
  ChallengeBundle issue_challenge(const std::string& family_id, const std::string& client_key);
  VerificationResult submit(const AnswerSubmission& submission);
  /// Throws UnknownChallenge or InvalidTrajectory.
  TrajectoryAck ingest_trajectory(const std::string& challenge_id, const TrajectoryRecord& trajectory);

  /// Encoded PNG/APNG bytes plus media type. Throws UnknownChallenge when the
  /// challenge is unknown or no longer pending, or the asset id is out of range.
  std::pair<std::vector<std::uint8_t>, std::string> asset(const std::string& challenge_id, int asset_id);

  /// Moves overdue Pending entries to Expired and logs them. Returns how many.
  int expire_due();

  std::int64_t now_ms() const;
  const ServiceConfig& config() const { return config_; }
  std::optional<SessionState> state_of(const std::string& challenge_id) const;

  /// Test hook: the truth of a pending challenge.
  std::optional<GroundTruth> peek_truth_for_testing(const std::string& challenge_id) const;

  std::filesystem::path attempt_log_path() const;

 private:
  void load_state();
  void write_snapshot();
  void wal_append(const Json& line);
  void log_attempt(const SessionEntry& entry, Reason reason, std::int64_t submitted_at,
                   const std::optional<TrajectoryRecord>& trajectory);

  ServiceConfig config_;
  TokenBucketLimiter limiter_;
  mutable std::mutex mutex_;
  std::map<std::string, SessionEntry> entries_;
  std::map<std::string, std::vector<std::pair<std::vector<std::uint8_t>, std::string>>> assets_;
  std::ofstream wal_;
  std::optional<AttemptLog> attempts_;
};

}  // namespace gapcha
