#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gapcha {

/// Human/agent capability gap a family is designed to exploit.
enum class GapCategory {
  SceneStructure,       // G1
  TemporalIntegration,  // G2
  Numerosity,           // G3
  LatentState,          // G4
  PerceptionToAction,   // G5
};

inline constexpr std::size_t kGapCategoryCount = 5;

/// Interaction/verification class of a family. The enumerator order matches the
/// alternative order of GroundTruth::Payload and AnswerSubmission::Payload.
enum class AnswerType { Select, Numeric, ClickSequence, Placement, TextEntry };

inline constexpr std::size_t kAnswerTypeCount = 5;

std::string_view to_string(GapCategory gap);
std::string_view to_string(AnswerType type);
GapCategory gap_from_string(std::string_view text);
AnswerType answer_type_from_string(std::string_view text);

enum class ErrorCode {
  UnknownFamily,
  InvalidParams,
  GenerationRetryExceeded,
  CanvasOverflow,
  SchemaMismatch,
  UnknownChallenge,
  RateLimited,
  EmptyFamily,
  LengthMismatch,
  DegenerateInput,
  WrongPilotSize,
  InvalidTrajectory,
  Malformed,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class RateLimitedError : public Error {
 public:
  RateLimitedError(const std::string& message, std::int64_t retry_after_ms)
      : Error(ErrorCode::RateLimited, message), retry_after_ms_(retry_after_ms) {}

  std::int64_t retry_after_ms() const noexcept { return retry_after_ms_; }

 private:
  std::int64_t retry_after_ms_;
};

struct Seed {
  std::uint64_t value = 0;
  friend bool operator==(Seed, Seed) = default;
};

// ---------------------------------------------------------------------------
// answer payloads
// ---------------------------------------------------------------------------

struct SelectionAnswer {
  std::set<int> cells;
  friend bool operator==(const SelectionAnswer&, const SelectionAnswer&) = default;
};

struct NumericAnswer {
  std::int64_t value = 0;
  friend bool operator==(const NumericAnswer&, const NumericAnswer&) = default;
};

/// One scheduled red dot: visible on [appear_ms, disappear_ms] relative to bundle receipt.
struct DotEvent {
  double x = 0;
  double y = 0;
  double radius = 0;
  std::int64_t appear_ms = 0;
  std::int64_t disappear_ms = 0;
  friend bool operator==(const DotEvent&, const DotEvent&) = default;
};

struct ClickSchedule {
  std::vector<DotEvent> dots;
  int quota = 0;
  friend bool operator==(const ClickSchedule&, const ClickSchedule&) = default;
};

struct Click {
  double x = 0;
  double y = 0;
  std::int64_t t_ms = 0;
  friend bool operator==(const Click&, const Click&) = default;
};

struct ClickAnswer {
  std::vector<Click> clicks;
  friend bool operator==(const ClickAnswer&, const ClickAnswer&) = default;
};

/// Tray piece index -> board cell index.
struct PlacementAnswer {
  std::map<int, int> piece_to_cell;
  friend bool operator==(const PlacementAnswer&, const PlacementAnswer&) = default;
};

struct TextAnswer {
  std::string text;
  friend bool operator==(const TextAnswer&, const TextAnswer&) = default;
};

/// Rule-derived correct answer. Lives server-side only.
struct GroundTruth {
  using Payload =
      std::variant<SelectionAnswer, NumericAnswer, ClickSchedule, PlacementAnswer, TextAnswer>;
  Payload payload;

  AnswerType answer_type() const { return static_cast<AnswerType>(payload.index()); }
  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

// ---------------------------------------------------------------------------
// trajectories
// ---------------------------------------------------------------------------

struct InteractionEvent {
  std::string primitive;  // click | drag_start | drag_end | keypress | scroll
  double x = 0;
  double y = 0;
  std::string target;
  std::int64_t t_ms = 0;
  friend bool operator==(const InteractionEvent&, const InteractionEvent&) = default;
};

struct ActionCounts {
  std::int64_t click = 0;
  std::int64_t drag = 0;
  std::int64_t scroll = 0;
  std::int64_t keyboard = 0;
  friend bool operator==(const ActionCounts&, const ActionCounts&) = default;
};

/// Per-attempt interaction log plus deliberation-cost counters.
struct TrajectoryRecord {
  std::int64_t steps = 0;
  std::int64_t duration_ms = 0;
  ActionCounts actions;
  std::optional<std::int64_t> reasoning_tokens;
  std::vector<InteractionEvent> events;

  /// reasoning_tokens / max(steps, 1); always recomputed, never read from input.
  std::optional<double> tokens_per_step() const;
  /// Throws InvalidTrajectory on negative counters or non-monotonic event times.
  void validate() const;

  friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

/// Fills steps/actions/duration from `events` where the caller left them at zero.
TrajectoryRecord summarize_events(TrajectoryRecord record);

// ---------------------------------------------------------------------------
// submissions and verdicts
// ---------------------------------------------------------------------------

struct AnswerSubmission {
  using Payload =
      std::variant<SelectionAnswer, NumericAnswer, ClickAnswer, PlacementAnswer, TextAnswer>;

  std::string challenge_id;
  Payload payload;
  std::optional<TrajectoryRecord> trajectory;

  AnswerType answer_type() const { return static_cast<AnswerType>(payload.index()); }

  /// Builds a submission bound to a challenge of type `expected`; a payload of
  /// any other variant is rejected with SchemaMismatch.
  static AnswerSubmission for_challenge(AnswerType expected, std::string challenge_id,
                                        Payload payload,
                                        std::optional<TrajectoryRecord> trajectory = {});
};

enum class Outcome { Pass, Fail };
enum class Reason { Correct, WrongAnswer, Expired, Replayed, SchemaMismatch, UnknownChallenge };

std::string_view to_string(Outcome outcome);
std::string_view to_string(Reason reason);
Reason reason_from_string(std::string_view text);

struct VerificationResult {
  Reason reason = Reason::WrongAnswer;
  std::string detail;

  Outcome outcome() const { return reason == Reason::Correct ? Outcome::Pass : Outcome::Fail; }
  bool passed() const { return reason == Reason::Correct; }

  static VerificationResult correct() { return {Reason::Correct, ""}; }
  static VerificationResult fail(Reason reason, std::string detail = {}) {
    return {reason, std::move(detail)};
  }
};

// ---------------------------------------------------------------------------
// client-visible bundle
// ---------------------------------------------------------------------------

struct PixelRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  bool contains(double px, double py) const {
    return px >= x && px < x + width && py >= y && py < y + height;
  }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct SelectSchema {
  int asset_id = 0;
  int rows = 0;
  int cols = 0;
  std::vector<PixelRect> cells;
  friend bool operator==(const SelectSchema&, const SelectSchema&) = default;
};

struct NumericSchema {
  int asset_id = 0;
  int min_value = 0;
  int max_value = 0;
  friend bool operator==(const NumericSchema&, const NumericSchema&) = default;
};

struct ClickSchema {
  int asset_id = 0;
  int width = 0;
  int height = 0;
  std::int64_t session_ms = 0;
  int quota = 0;
  int max_misses = 0;
  friend bool operator==(const ClickSchema&, const ClickSchema&) = default;
};

struct PlacementSchema {
  int rows = 0;
  int cols = 0;
  int piece_width = 0;
  int piece_height = 0;
  std::vector<int> tray_asset_ids;
  friend bool operator==(const PlacementSchema&, const PlacementSchema&) = default;
};

struct TextSchema {
  int asset_id = 0;
  int min_length = 0;
  int max_length = 0;
  friend bool operator==(const TextSchema&, const TextSchema&) = default;
};

/// Same alternative order as AnswerType.
using InteractionSchema =
    std::variant<SelectSchema, NumericSchema, ClickSchema, PlacementSchema, TextSchema>;

inline AnswerType answer_type_of(const InteractionSchema& schema) {
  return static_cast<AnswerType>(schema.index());
}

enum class AssetKind { StaticImage, Animation };

struct AssetRef {
  int asset_id = 0;
  AssetKind kind = AssetKind::StaticImage;
  int width = 0;
  int height = 0;
  int frame_count = 1;
  int frame_ms = 0;
  std::string media_type;  // image/png or image/apng
  std::optional<std::string> url;
  std::optional<std::string> data_base64;
  friend bool operator==(const AssetRef&, const AssetRef&) = default;
};

struct ChallengeBundle {
  std::string challenge_id;
  std::string family_id;
  AnswerType answer_type = AnswerType::Select;
  std::string instruction;
  std::vector<AssetRef> assets;
  InteractionSchema interaction_schema;
  std::int64_t issued_at_ms = 0;
  std::int64_t ttl_ms = 0;
  friend bool operator==(const ChallengeBundle&, const ChallengeBundle&) = default;
};

}  // namespace gapcha
