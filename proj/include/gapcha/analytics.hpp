#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gapcha/service.hpp"

namespace gapcha::analytics {

/// Fractional ranks (1-based); ties share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values);

struct SpearmanResult {
  double rho = 0;
  double t = 0;        // t-approximation statistic; infinite when |rho| = 1
  double p_value = 0;  // two-sided, Student t with n - 2 degrees of freedom
  bool significant = false;
  std::size_t n = 0;
};

/// Throws LengthMismatch for |x| != |y|, DegenerateInput for n < 3 or a
/// constant vector (rho undefined).
SpearmanResult spearman_rho(const std::vector<double>& x, const std::vector<double>& y, double alpha = 0.05);

/// passes / attempts over the family's records. Throws EmptyFamily.
double pass_at_1(const std::vector<AttemptRecord>& log, std::string_view family_id);

enum class Metric { Steps, DurationMs, ReasoningTokens, TokensPerStep };
inline constexpr std::array<Metric, 4> kMetrics = {Metric::Steps, Metric::DurationMs, Metric::ReasoningTokens,
                                                   Metric::TokensPerStep};
std::string_view to_string(Metric metric);

/// Value of a metric for one attempt, if recorded. Duration falls back to the
/// server-measured attempt duration when no trajectory was reported.
std::optional<double> metric_value(const AttemptRecord& record, Metric metric);

struct FamilyRow {
  std::string family_id;
  std::int64_t attempts = 0;
  std::int64_t passes = 0;
  double pass_at_1 = 0;
  std::array<std::optional<double>, kMetrics.size()> metric_means;  // indexed like kMetrics
};

/// One row per family present in the log, sorted by family id.
std::vector<FamilyRow> family_table(const std::vector<AttemptRecord>& log);

struct CorrelationCell {
  Metric metric = Metric::Steps;
  std::size_t families = 0;
  std::optional<SpearmanResult> result;  // nullopt: rho undefined
  std::string note;
};

struct CorrelationReport {
  std::vector<FamilyRow> table;
  std::vector<CorrelationCell> cells;  // one per metric
};

/// Spearman rho across families between Pass@1 and each metric mean, over the
/// families that report that metric. Throws DegenerateInput for fewer than 3
/// families; a metric with too few families or a constant column is undefined.
CorrelationReport correlation_report(const std::vector<AttemptRecord>& log, double alpha = 0.05);

/// Secondary mode: within one family, rho between per-attempt success (0/1)
/// and each metric across instances.
std::vector<CorrelationCell> instance_correlations(const std::vector<AttemptRecord>& log, std::string_view family_id,
                                                   double alpha = 0.05);

std::string family_table_csv(const std::vector<FamilyRow>& table);
std::string correlation_csv(const std::vector<CorrelationCell>& cells);
/// PNG heatmap of rho per metric: blue for negative, red for positive, grey
/// hatching where undefined, a black marker for significance.
std::vector<std::uint8_t> correlation_heatmap_png(const std::vector<CorrelationCell>& cells);

enum class Retention { Retain, Reject };
std::string_view to_string(Retention retention);

/// Retain iff agent Pass@1 < 0.30 and human success > 0.90. Exactly 20 agent
/// and 10 human results are required (WrongPilotSize otherwise).
Retention retention_filter(const std::vector<bool>& agent_pilot, const std::vector<bool>& human_pilot);

/// JSONL attempt logs (service format) or CSV result tables with header
/// family_id,outcome[,steps,duration_ms,reasoning_tokens,click,drag,scroll,keyboard].
std::vector<AttemptRecord> load_attempts(const std::filesystem::path& path);
std::vector<AttemptRecord> parse_attempts_csv(std::string_view text);

}  // namespace gapcha::analytics
