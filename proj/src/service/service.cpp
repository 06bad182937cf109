#include "gapcha/service.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "gapcha/bundle.hpp"
#include "gapcha/raster.hpp"
#include "gapcha/random.hpp"
#include "gapcha/registry.hpp"

namespace gapcha {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// rate limiting
// ---------------------------------------------------------------------------

TokenBucketLimiter::TokenBucketLimiter(int capacity, std::int64_t window_ms)
    : capacity_(capacity), window_ms_(window_ms) {}

std::int64_t TokenBucketLimiter::try_acquire(const std::string& key, std::int64_t now_ms) {
  if (capacity_ <= 0) return 0;
  std::lock_guard lock(mutex_);
  const double rate = static_cast<double>(capacity_) / static_cast<double>(window_ms_);  // tokens per ms
  auto [it, inserted] = buckets_.try_emplace(key, Bucket{static_cast<double>(capacity_), now_ms});
  auto& b = it->second;
  if (!inserted && now_ms > b.updated_ms) {
    b.tokens = std::min(static_cast<double>(capacity_), b.tokens + rate * static_cast<double>(now_ms - b.updated_ms));
    b.updated_ms = now_ms;
  }
  if (b.tokens >= 1.0) {
    b.tokens -= 1.0;
    return 0;
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil((1.0 - b.tokens) / rate)));
}

// ---------------------------------------------------------------------------
// records
// ---------------------------------------------------------------------------

std::string_view to_string(SessionState state) {
  switch (state) {
    case SessionState::Pending:
      return "pending";
    case SessionState::Consumed:
      return "consumed";
    case SessionState::Expired:
      return "expired";
  }
  return "pending";
}

SessionState session_state_from_string(std::string_view text) {
  if (text == "pending") return SessionState::Pending;
  if (text == "consumed") return SessionState::Consumed;
  if (text == "expired") return SessionState::Expired;
  throw Error(ErrorCode::Malformed, "unknown session state " + std::string(text));
}

void to_json(Json& j, const AttemptRecord& v) {
  j = {{"challenge_id", v.challenge_id},
       {"family_id", v.family_id},
       {"outcome", std::string(to_string(v.outcome))},
       {"reason", std::string(to_string(v.reason))},
       {"issued_at", v.issued_at_ms},
       {"submitted_at", v.submitted_at_ms},
       {"duration_ms", v.duration_ms},
       {"policy_version", v.policy_version}};
  if (v.trajectory) j["trajectory"] = *v.trajectory;
}

void from_json(const Json& j, AttemptRecord& v) {
  v = AttemptRecord{};
  j.at("challenge_id").get_to(v.challenge_id);
  j.at("family_id").get_to(v.family_id);
  v.reason = reason_from_string(j.at("reason").get<std::string>());
  v.outcome = v.reason == Reason::Correct ? Outcome::Pass : Outcome::Fail;
  if (j.contains("outcome") && j.at("outcome").get<std::string>() != to_string(v.outcome)) {
    throw Error(ErrorCode::Malformed, "outcome disagrees with reason for " + v.challenge_id);
  }
  v.issued_at_ms = j.value("issued_at", std::int64_t{0});
  v.submitted_at_ms = j.value("submitted_at", std::int64_t{0});
  v.duration_ms = j.value("duration_ms", std::int64_t{0});
  v.policy_version = j.value("policy_version", 0);
  if (j.contains("trajectory") && !j.at("trajectory").is_null()) v.trajectory = j.at("trajectory").get<TrajectoryRecord>();
}

void to_json(Json& j, const SessionEntry& v) {
  j = {{"challenge_id", v.challenge_id}, {"family_id", v.family_id},   {"issued_at", v.issued_at_ms},
       {"ttl_ms", v.ttl_ms},             {"state", to_string(v.state)}, {"client_key", v.client_key},
       {"seed", v.seed.value},           {"params", v.params}};
  if (v.truth) j["truth"] = *v.truth;
}

void from_json(const Json& j, SessionEntry& v) {
  v = SessionEntry{};
  j.at("challenge_id").get_to(v.challenge_id);
  j.at("family_id").get_to(v.family_id);
  j.at("issued_at").get_to(v.issued_at_ms);
  j.at("ttl_ms").get_to(v.ttl_ms);
  v.state = session_state_from_string(j.at("state").get<std::string>());
  v.client_key = j.value("client_key", std::string());
  v.seed.value = j.value("seed", std::uint64_t{0});
  if (j.contains("params")) j.at("params").get_to(v.params);
  if (j.contains("truth")) v.truth = j.at("truth").get<GroundTruth>();
}

namespace {

std::int64_t system_now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

// ---------------------------------------------------------------------------
// attempt log
// ---------------------------------------------------------------------------

AttemptLog::AttemptLog(fs::path path) : path_(std::move(path)) {
  if (fs::exists(path_)) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = Json::parse(line, nullptr, false);
      if (!j.is_discarded() && j.value("kind", std::string()) == "trajectory") {
        seen_trajectories_.insert(j.value("challenge_id", std::string()));
      }
    }
  }
  out_.open(path_, std::ios::app);
  if (!out_) throw Error(ErrorCode::Io, "cannot open attempt log " + path_.string());
}

void AttemptLog::write_line(const Json& line) {
  out_ << line.dump() << '\n';
  out_.flush();
}

void AttemptLog::append_attempt(const AttemptRecord& record) {
  Json j = record;
  j["kind"] = "attempt";
  std::lock_guard lock(mutex_);
  write_line(j);
}

bool AttemptLog::append_trajectory(const std::string& challenge_id, const TrajectoryRecord& trajectory) {
  std::lock_guard lock(mutex_);
  const bool overwrite = !seen_trajectories_.insert(challenge_id).second;
  write_line({{"kind", "trajectory"}, {"challenge_id", challenge_id}, {"trajectory", trajectory}, {"overwrite", overwrite}});
  return overwrite;
}

std::vector<AttemptRecord> AttemptLog::read(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::vector<AttemptRecord> records;
  std::map<std::string, std::size_t> index;
  std::map<std::string, TrajectoryRecord> late;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::Malformed, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (j.value("kind", std::string("attempt")) == "trajectory") {
      late[j.at("challenge_id").get<std::string>()] = j.at("trajectory").get<TrajectoryRecord>();
      continue;
    }
    auto record = j.get<AttemptRecord>();
    if (index.contains(record.challenge_id)) {
      throw Error(ErrorCode::Malformed, "second attempt for " + record.challenge_id);
    }
    index[record.challenge_id] = records.size();
    records.push_back(std::move(record));
  }
  for (auto& [id, trajectory] : late) {
    if (auto it = index.find(id); it != index.end()) records[it->second].trajectory = std::move(trajectory);
  }
  return records;
}

// ---------------------------------------------------------------------------
// service
// ---------------------------------------------------------------------------

ChallengeService::ChallengeService(ServiceConfig config)
    : config_(std::move(config)), limiter_(config_.rate_limit_per_minute) {
  if (!config_.clock) config_.clock = system_now_ms;
  if (!config_.state_dir.empty()) {
    fs::create_directories(config_.state_dir);
    load_state();
    attempts_.emplace(config_.state_dir / "attempts.jsonl");
  }
}

ChallengeService::~ChallengeService() = default;

std::int64_t ChallengeService::now_ms() const { return config_.clock(); }

fs::path ChallengeService::attempt_log_path() const {
  return config_.state_dir.empty() ? fs::path() : config_.state_dir / "attempts.jsonl";
}

void ChallengeService::load_state() {
  const auto snapshot = config_.state_dir / "sessions.snapshot.json";
  const auto wal = config_.state_dir / "sessions.wal";
  if (fs::exists(snapshot)) {
    std::ifstream in(snapshot);
    const auto doc = Json::parse(in);
    for (const auto& j : doc.at("entries")) {
      auto e = j.get<SessionEntry>();
      entries_[e.challenge_id] = std::move(e);
    }
  }
  if (fs::exists(wal)) {
    std::ifstream in(wal);
    std::string line;
    while (std::getline(in, line)) {
      // A torn final line from a crash mid-write is skipped.
      const auto j = Json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) continue;
      const auto op = j.value("op", std::string());
      if (op == "issue") {
        auto e = j.at("entry").get<SessionEntry>();
        entries_[e.challenge_id] = std::move(e);
      } else if (auto it = entries_.find(j.value("challenge_id", std::string())); it != entries_.end()) {
        if (op == "consume") it->second.state = SessionState::Consumed;
        if (op == "expire") it->second.state = SessionState::Expired;
        if (it->second.state != SessionState::Pending) it->second.truth.reset();
      }
    }
  }
  write_snapshot();
  wal_.open(wal, std::ios::trunc);
  if (!wal_) throw Error(ErrorCode::Io, "cannot open " + wal.string());
}

void ChallengeService::write_snapshot() {
  Json entries = Json::array();
  for (const auto& [id, e] : entries_) entries.push_back(e);
  const auto path = config_.state_dir / "sessions.snapshot.json";
  const auto tmp = config_.state_dir / "sessions.snapshot.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << Json{{"entries", entries}}.dump() << '\n';
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void ChallengeService::wal_append(const Json& line) {
  if (!wal_.is_open()) return;
  wal_ << line.dump() << '\n';
  wal_.flush();
  if (!wal_) throw Error(ErrorCode::Io, "write-ahead log write failed");
}

void ChallengeService::log_attempt(const SessionEntry& entry, Reason reason, std::int64_t submitted_at,
                                   const std::optional<TrajectoryRecord>& trajectory) {
  if (!attempts_) return;
  AttemptRecord record;
  record.challenge_id = entry.challenge_id;
  record.family_id = entry.family_id;
  record.reason = reason;
  record.outcome = reason == Reason::Correct ? Outcome::Pass : Outcome::Fail;
  record.issued_at_ms = entry.issued_at_ms;
  record.submitted_at_ms = submitted_at;
  record.duration_ms = submitted_at - entry.issued_at_ms;
  record.policy_version = config_.policy.version;
  record.trajectory = trajectory;
  attempts_->append_attempt(record);
}

ChallengeBundle ChallengeService::issue_challenge(const std::string& family_id, const std::string& client_key) {
  registry_lookup(family_id);
  const auto now = now_ms();
  if (const auto wait = limiter_.try_acquire(client_key, now); wait > 0) {
    throw RateLimitedError("issue limit reached for client", wait);
  }
  expire_due();

  SessionEntry entry;
  entry.family_id = family_id;
  entry.seed = random_seed();
  auto instance = generate(family_id, entry.seed, {});
  entry.params = instance.params;
  entry.truth = instance.truth;
  entry.issued_at_ms = now;
  entry.ttl_ms = config_.ttl_ms;
  entry.client_key = client_key;
  entry.challenge_id = random_nonce_hex();

  const auto assets = raster::rasterize(instance.scene);
  std::vector<std::pair<std::vector<std::uint8_t>, std::string>> encoded;
  for (const auto& a : assets) {
    encoded.emplace_back(raster::encode(a), a.kind == AssetKind::Animation ? "image/apng" : "image/png");
  }

  std::lock_guard lock(mutex_);
  while (entries_.contains(entry.challenge_id)) entry.challenge_id = random_nonce_hex();
  auto bundle = build_bundle(instance, assets, entry.challenge_id, now, entry.ttl_ms, AssetDelivery::Url);
  wal_append({{"op", "issue"}, {"entry", entry}});
  assets_[entry.challenge_id] = std::move(encoded);
  entries_[entry.challenge_id] = std::move(entry);
  return bundle;
}

VerificationResult ChallengeService::submit(const AnswerSubmission& submission) {
  const auto now = now_ms();
  std::optional<TrajectoryRecord> trajectory;
  if (submission.trajectory) trajectory = summarize_events(*submission.trajectory);

  SessionEntry snapshot;
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(submission.challenge_id);
    if (it == entries_.end()) return VerificationResult::fail(Reason::UnknownChallenge, "no such challenge");
    auto& entry = it->second;
    if (entry.state != SessionState::Pending) {
      return VerificationResult::fail(Reason::Replayed, "challenge already used");
    }
    if (now > entry.issued_at_ms + entry.ttl_ms) {
      entry.state = SessionState::Expired;
      entry.truth.reset();
      assets_.erase(entry.challenge_id);
      wal_append({{"op", "expire"}, {"challenge_id", entry.challenge_id}});
      log_attempt(entry, Reason::Expired, now, trajectory);
      return VerificationResult::fail(Reason::Expired, "challenge expired");
    }
    if (entry.truth->answer_type() != submission.answer_type()) {
      return VerificationResult::fail(Reason::SchemaMismatch,
                                      "expected " + std::string(to_string(entry.truth->answer_type())) + " answer");
    }
    snapshot = entry;
    entry.state = SessionState::Consumed;
    entry.truth.reset();
    assets_.erase(entry.challenge_id);
    wal_append({{"op", "consume"}, {"challenge_id", entry.challenge_id}});
  }

  auto result = verify(*snapshot.truth, submission, config_.policy);
  log_attempt(snapshot, result.reason, now, trajectory);
  return result;
}

TrajectoryAck ChallengeService::ingest_trajectory(const std::string& challenge_id, const TrajectoryRecord& trajectory) {
  {
    std::lock_guard lock(mutex_);
    if (!entries_.contains(challenge_id)) throw Error(ErrorCode::UnknownChallenge, "no such challenge");
  }
  const auto summarized = summarize_events(trajectory);
  summarized.validate();
  TrajectoryAck ack{challenge_id, false};
  if (attempts_) ack.overwrite = attempts_->append_trajectory(challenge_id, summarized);
  return ack;
}

std::pair<std::vector<std::uint8_t>, std::string> ChallengeService::asset(const std::string& challenge_id,
                                                                          int asset_id) {
  SessionEntry entry;
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(challenge_id);
    if (it == entries_.end() || it->second.state != SessionState::Pending) {
      throw Error(ErrorCode::UnknownChallenge, "no pending challenge");
    }
    if (auto cached = assets_.find(challenge_id); cached != assets_.end()) {
      if (asset_id < 0 || asset_id >= static_cast<int>(cached->second.size())) {
        throw Error(ErrorCode::UnknownChallenge, "no such asset");
      }
      return cached->second[static_cast<std::size_t>(asset_id)];
    }
    entry = it->second;
  }
  // Restarted process: re-render from the stored seed.
  const auto instance = generate(entry.family_id, entry.seed, entry.params);
  std::vector<std::pair<std::vector<std::uint8_t>, std::string>> encoded;
  for (const auto& a : raster::rasterize(instance.scene)) {
    encoded.emplace_back(raster::encode(a), a.kind == AssetKind::Animation ? "image/apng" : "image/png");
  }
  if (asset_id < 0 || asset_id >= static_cast<int>(encoded.size())) {
    throw Error(ErrorCode::UnknownChallenge, "no such asset");
  }
  auto out = encoded[static_cast<std::size_t>(asset_id)];
  std::lock_guard lock(mutex_);
  assets_[challenge_id] = std::move(encoded);
  return out;
}

int ChallengeService::expire_due() {
  const auto now = now_ms();
  std::lock_guard lock(mutex_);
  int count = 0;
  for (auto& [id, entry] : entries_) {
    if (entry.state != SessionState::Pending || now <= entry.issued_at_ms + entry.ttl_ms) continue;
    entry.state = SessionState::Expired;
    entry.truth.reset();
    assets_.erase(id);
    wal_append({{"op", "expire"}, {"challenge_id", id}});
    log_attempt(entry, Reason::Expired, now, std::nullopt);
    ++count;
  }
  return count;
}

std::optional<SessionState> ChallengeService::state_of(const std::string& challenge_id) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(challenge_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second.state;
}

std::optional<GroundTruth> ChallengeService::peek_truth_for_testing(const std::string& challenge_id) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(challenge_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second.truth;
}

}  // namespace gapcha
