#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gapcha/types.hpp"

namespace gapcha {

/// Global verification policy. Logged with every verdict.
struct VerifyPolicy {
  int version = 1;
  std::int64_t click_time_slack_ms = 150;
  int max_missed_clicks = 3;
  bool numeric_exact = true;
  bool placement_exact = true;
};

/// Uppercase, all whitespace removed.
std::string normalize_text(std::string_view text);

VerificationResult verify(const GroundTruth& truth, const AnswerSubmission& submission,
                          const VerifyPolicy& policy = {});

bool verify_select(const std::set<int>& truth, const std::set<int>& submitted);
bool verify_numeric(std::int64_t truth, std::int64_t submitted);
/// True iff at least `quota` distinct dots are hit and no more than
/// policy.max_missed_clicks clicks hit no dot at all.
bool verify_clicks(const ClickSchedule& schedule, std::vector<Click> clicks, const VerifyPolicy& policy = {});
bool verify_placement(const std::map<int, int>& truth, const std::map<int, int>& submitted);
bool verify_text(std::string_view truth, std::string_view submitted);

/// Click (x, y, t) hits dot d iff within its radius and inside its window widened by the slack.
bool click_hits(const DotEvent& dot, const Click& click, std::int64_t slack_ms);

/// The answer a perfect solver would submit: clicks land on the first `quota`
/// dots at their centres, mid-window.
AnswerSubmission::Payload truth_as_answer(const GroundTruth& truth);

/// Single-step wrong answers: one selection flipped (over `cell_count` cells),
/// numeric +-1, one click dropped, one placement pair swapped, one character changed.
std::vector<AnswerSubmission::Payload> minimal_perturbations(const GroundTruth& truth, int cell_count = 0);

}  // namespace gapcha
