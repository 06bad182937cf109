#include "gapcha/verifier.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "gapcha/generators.hpp"

namespace gapcha {

std::string normalize_text(std::string_view text) {
  std::string out;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isspace(u)) continue;
    out.push_back(static_cast<char>(std::toupper(u)));
  }
  return out;
}

bool verify_select(const std::set<int>& truth, const std::set<int>& submitted) { return truth == submitted; }

bool verify_numeric(std::int64_t truth, std::int64_t submitted) { return truth == submitted; }

bool click_hits(const DotEvent& dot, const Click& click, std::int64_t slack_ms) {
  if (click.t_ms < dot.appear_ms - slack_ms || click.t_ms > dot.disappear_ms + slack_ms) return false;
  return std::hypot(click.x - dot.x, click.y - dot.y) <= dot.radius;
}

bool verify_clicks(const ClickSchedule& schedule, std::vector<Click> clicks, const VerifyPolicy& policy) {
  std::stable_sort(clicks.begin(), clicks.end(), [](const Click& a, const Click& b) { return a.t_ms < b.t_ms; });
  std::vector<bool> credited(schedule.dots.size(), false);
  int hits = 0;
  int misses = 0;
  for (const auto& click : clicks) {
    bool touched = false;
    for (std::size_t d = 0; d < schedule.dots.size(); ++d) {
      if (!click_hits(schedule.dots[d], click, policy.click_time_slack_ms)) continue;
      touched = true;
      if (!credited[d]) {
        credited[d] = true;
        ++hits;
        break;
      }
    }
    if (!touched) ++misses;
  }
  return hits >= schedule.quota && misses <= policy.max_missed_clicks;
}

bool verify_placement(const std::map<int, int>& truth, const std::map<int, int>& submitted) {
  return truth == submitted;
}

bool verify_text(std::string_view truth, std::string_view submitted) {
  return normalize_text(truth) == normalize_text(submitted);
}

VerificationResult verify(const GroundTruth& truth, const AnswerSubmission& submission, const VerifyPolicy& policy) {
  if (truth.payload.index() != submission.payload.index()) {
    return VerificationResult::fail(Reason::SchemaMismatch,
                                    "expected " + std::string(to_string(truth.answer_type())) + " answer, got " +
                                        std::string(to_string(submission.answer_type())));
  }
  bool ok = false;
  switch (truth.answer_type()) {
    case AnswerType::Select:
      ok = verify_select(std::get<SelectionAnswer>(truth.payload).cells,
                         std::get<SelectionAnswer>(submission.payload).cells);
      break;
    case AnswerType::Numeric:
      ok = verify_numeric(std::get<NumericAnswer>(truth.payload).value,
                          std::get<NumericAnswer>(submission.payload).value);
      break;
    case AnswerType::ClickSequence:
      ok = verify_clicks(std::get<ClickSchedule>(truth.payload), std::get<ClickAnswer>(submission.payload).clicks,
                         policy);
      break;
    case AnswerType::Placement:
      ok = verify_placement(std::get<PlacementAnswer>(truth.payload).piece_to_cell,
                            std::get<PlacementAnswer>(submission.payload).piece_to_cell);
      break;
    case AnswerType::TextEntry:
      ok = verify_text(std::get<TextAnswer>(truth.payload).text, std::get<TextAnswer>(submission.payload).text);
      break;
  }
  if (ok) return VerificationResult::correct();
  return VerificationResult::fail(Reason::WrongAnswer, "policy v" + std::to_string(policy.version));
}

namespace {

std::vector<Click> quota_clicks(const ClickSchedule& schedule) {
  std::vector<Click> clicks;
  for (const auto& d : schedule.dots) {
    if (static_cast<int>(clicks.size()) >= schedule.quota) break;
    clicks.push_back(Click{d.x, d.y, (d.appear_ms + d.disappear_ms) / 2});
  }
  return clicks;
}

}  // namespace

AnswerSubmission::Payload truth_as_answer(const GroundTruth& truth) {
  return std::visit(
      [](const auto& t) -> AnswerSubmission::Payload {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ClickSchedule>) {
          return ClickAnswer{quota_clicks(t)};
        } else {
          return t;
        }
      },
      truth.payload);
}

std::vector<AnswerSubmission::Payload> minimal_perturbations(const GroundTruth& truth, int cell_count) {
  std::vector<AnswerSubmission::Payload> out;
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, SelectionAnswer>) {
          int cells = cell_count;
          if (!t.cells.empty()) cells = std::max(cells, *t.cells.rbegin() + 1);
          for (int c = 0; c < cells; ++c) {
            auto flipped = t;
            if (!flipped.cells.erase(c)) flipped.cells.insert(c);
            out.push_back(flipped);
          }
        } else if constexpr (std::is_same_v<T, NumericAnswer>) {
          out.push_back(NumericAnswer{t.value - 1});
          out.push_back(NumericAnswer{t.value + 1});
        } else if constexpr (std::is_same_v<T, ClickSchedule>) {
          const auto clicks = quota_clicks(t);
          for (std::size_t i = 0; i < clicks.size(); ++i) {
            auto dropped = clicks;
            dropped.erase(dropped.begin() + static_cast<std::ptrdiff_t>(i));
            out.push_back(ClickAnswer{dropped});
          }
        } else if constexpr (std::is_same_v<T, PlacementAnswer>) {
          for (auto a = t.piece_to_cell.begin(); a != t.piece_to_cell.end(); ++a) {
            for (auto b = std::next(a); b != t.piece_to_cell.end(); ++b) {
              auto swapped = t;
              std::swap(swapped.piece_to_cell[a->first], swapped.piece_to_cell[b->first]);
              out.push_back(swapped);
            }
          }
        } else {
          for (std::size_t i = 0; i < t.text.size(); ++i) {
            auto changed = t;
            const auto pos = kSpookyAlphabet.find(static_cast<char>(std::toupper(static_cast<unsigned char>(t.text[i]))));
            changed.text[i] = pos == std::string_view::npos ? 'A' : kSpookyAlphabet[(pos + 1) % kSpookyAlphabet.size()];
            out.push_back(changed);
          }
        }
      },
      truth.payload);
  return out;
}

}  // namespace gapcha
