#include "gapcha/types.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace gapcha {

namespace {

constexpr std::array<std::string_view, kGapCategoryCount> kGapNames = {"G1", "G2", "G3", "G4", "G5"};
constexpr std::array<std::string_view, kAnswerTypeCount> kAnswerTypeNames = {
    "select", "numeric", "click_sequence", "placement", "text_entry"};
constexpr std::array<std::string_view, 6> kReasonNames = {
    "correct", "wrong_answer", "expired", "replayed", "schema_mismatch", "unknown_challenge"};

}  // namespace

std::string_view to_string(GapCategory gap) { return kGapNames[static_cast<std::size_t>(gap)]; }

std::string_view to_string(AnswerType type) {
  return kAnswerTypeNames[static_cast<std::size_t>(type)];
}

GapCategory gap_from_string(std::string_view text) {
  for (std::size_t i = 0; i < kGapNames.size(); ++i) {
    if (kGapNames[i] == text) return static_cast<GapCategory>(i);
  }
  throw Error(ErrorCode::Malformed, "unknown gap category '" + std::string(text) + "'");
}

AnswerType answer_type_from_string(std::string_view text) {
  for (std::size_t i = 0; i < kAnswerTypeNames.size(); ++i) {
    if (kAnswerTypeNames[i] == text) return static_cast<AnswerType>(i);
  }
  throw Error(ErrorCode::Malformed, "unknown answer type '" + std::string(text) + "'");
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::GenerationRetryExceeded: return "GenerationRetryExceeded";
    case ErrorCode::CanvasOverflow: return "CanvasOverflow";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::UnknownChallenge: return "UnknownChallenge";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::EmptyFamily: return "EmptyFamily";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::WrongPilotSize: return "WrongPilotSize";
    case ErrorCode::InvalidTrajectory: return "InvalidTrajectory";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(Outcome outcome) { return outcome == Outcome::Pass ? "pass" : "fail"; }

std::string_view to_string(Reason reason) { return kReasonNames[static_cast<std::size_t>(reason)]; }

Reason reason_from_string(std::string_view text) {
  for (std::size_t i = 0; i < kReasonNames.size(); ++i) {
    if (kReasonNames[i] == text) return static_cast<Reason>(i);
  }
  throw Error(ErrorCode::Malformed, "unknown reason '" + std::string(text) + "'");
}

std::optional<double> TrajectoryRecord::tokens_per_step() const {
  if (!reasoning_tokens) return std::nullopt;
  return static_cast<double>(*reasoning_tokens) / static_cast<double>(std::max<std::int64_t>(steps, 1));
}

void TrajectoryRecord::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidTrajectory, what);
  };
  require(steps >= 0, "negative step count");
  require(duration_ms >= 0, "negative duration");
  require(actions.click >= 0 && actions.drag >= 0 && actions.scroll >= 0 && actions.keyboard >= 0,
          "negative action count");
  require(!reasoning_tokens || *reasoning_tokens >= 0, "negative reasoning token count");
  std::int64_t last = 0;
  int open_drags = 0;
  for (const auto& e : events) {
    require(e.t_ms >= last, "event timestamps must be non-decreasing");
    last = e.t_ms;
    if (e.primitive == "drag_start") {
      ++open_drags;
    } else if (e.primitive == "drag_end") {
      require(open_drags > 0, "drag_end without a prior drag_start");
      --open_drags;
    } else {
      require(e.primitive == "click" || e.primitive == "keypress" || e.primitive == "scroll",
              "unknown event primitive");
    }
  }
}

TrajectoryRecord summarize_events(TrajectoryRecord record) {
  if (record.events.empty()) return record;
  ActionCounts counted;
  for (const auto& e : record.events) {
    if (e.primitive == "click") ++counted.click;
    else if (e.primitive == "drag_end") ++counted.drag;
    else if (e.primitive == "scroll") ++counted.scroll;
    else if (e.primitive == "keypress") ++counted.keyboard;
  }
  if (record.actions == ActionCounts{}) record.actions = counted;
  if (record.steps == 0) {
    record.steps = counted.click + counted.drag + counted.scroll + counted.keyboard;
  }
  if (record.duration_ms == 0) record.duration_ms = record.events.back().t_ms;
  return record;
}

AnswerSubmission AnswerSubmission::for_challenge(AnswerType expected, std::string challenge_id,
                                                 Payload payload,
                                                 std::optional<TrajectoryRecord> trajectory) {
  const auto got = static_cast<AnswerType>(payload.index());
  if (got != expected) {
    throw Error(ErrorCode::SchemaMismatch, "challenge expects " + std::string(to_string(expected)) +
                                               " but the submission carries " +
                                               std::string(to_string(got)));
  }
  return AnswerSubmission{std::move(challenge_id), std::move(payload), std::move(trajectory)};
}

}  // namespace gapcha
