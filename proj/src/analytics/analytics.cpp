#include "gapcha/analytics.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "gapcha/raster.hpp"

namespace gapcha::analytics {

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman_rho(const std::vector<double>& x, const std::vector<double>& y, double alpha) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " values");
  }
  if (x.size() < 3) throw Error(ErrorCode::DegenerateInput, "need at least 3 pairs");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0;
  double sxx = 0;
  double syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) throw Error(ErrorCode::DegenerateInput, "constant vector, rho undefined");

  SpearmanResult r;
  r.n = x.size();
  r.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (std::abs(r.rho) >= 1.0) {
    r.t = std::copysign(std::numeric_limits<double>::infinity(), r.rho);
    r.p_value = 0;
  } else {
    r.t = r.rho * std::sqrt((n - 2) / (1 - r.rho * r.rho));
    const boost::math::students_t dist(n - 2);
    r.p_value = 2 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  }
  r.significant = r.p_value < alpha;
  return r;
}

double pass_at_1(const std::vector<AttemptRecord>& log, std::string_view family_id) {
  std::int64_t attempts = 0;
  std::int64_t passes = 0;
  for (const auto& r : log) {
    if (r.family_id != family_id) continue;
    ++attempts;
    if (r.outcome == Outcome::Pass) ++passes;
  }
  if (attempts == 0) throw Error(ErrorCode::EmptyFamily, "no attempts for " + std::string(family_id));
  return static_cast<double>(passes) / static_cast<double>(attempts);
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::Steps:
      return "steps";
    case Metric::DurationMs:
      return "duration_ms";
    case Metric::ReasoningTokens:
      return "reasoning_tokens";
    case Metric::TokensPerStep:
      return "tokens_per_step";
  }
  return "";
}

std::optional<double> metric_value(const AttemptRecord& record, Metric metric) {
  const auto& t = record.trajectory;
  switch (metric) {
    case Metric::Steps:
      if (t) return static_cast<double>(t->steps);
      return std::nullopt;
    case Metric::DurationMs:
      if (t && t->duration_ms > 0) return static_cast<double>(t->duration_ms);
      return static_cast<double>(record.duration_ms);
    case Metric::ReasoningTokens:
      if (t && t->reasoning_tokens) return static_cast<double>(*t->reasoning_tokens);
      return std::nullopt;
    case Metric::TokensPerStep:
      if (t) return t->tokens_per_step();
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<FamilyRow> family_table(const std::vector<AttemptRecord>& log) {
  struct Acc {
    FamilyRow row;
    std::array<double, kMetrics.size()> sum{};
    std::array<std::int64_t, kMetrics.size()> count{};
  };
  std::map<std::string, Acc> by_family;
  for (const auto& r : log) {
    auto& acc = by_family[r.family_id];
    acc.row.family_id = r.family_id;
    ++acc.row.attempts;
    if (r.outcome == Outcome::Pass) ++acc.row.passes;
    for (std::size_t m = 0; m < kMetrics.size(); ++m) {
      if (auto v = metric_value(r, kMetrics[m])) {
        acc.sum[m] += *v;
        ++acc.count[m];
      }
    }
  }
  std::vector<FamilyRow> table;
  for (auto& [id, acc] : by_family) {
    acc.row.pass_at_1 = static_cast<double>(acc.row.passes) / static_cast<double>(acc.row.attempts);
    for (std::size_t m = 0; m < kMetrics.size(); ++m) {
      if (acc.count[m] > 0) acc.row.metric_means[m] = acc.sum[m] / static_cast<double>(acc.count[m]);
    }
    table.push_back(std::move(acc.row));
  }
  return table;
}

namespace {

CorrelationCell correlate(Metric metric, const std::vector<double>& x, const std::vector<double>& y, double alpha) {
  CorrelationCell cell;
  cell.metric = metric;
  cell.families = x.size();
  try {
    cell.result = spearman_rho(x, y, alpha);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateInput) throw;
    cell.note = e.what();
  }
  return cell;
}

}  // namespace

CorrelationReport correlation_report(const std::vector<AttemptRecord>& log, double alpha) {
  CorrelationReport report;
  report.table = family_table(log);
  if (report.table.size() < 3) {
    throw Error(ErrorCode::DegenerateInput, "need at least 3 families, have " + std::to_string(report.table.size()));
  }
  for (std::size_t m = 0; m < kMetrics.size(); ++m) {
    std::vector<double> pass;
    std::vector<double> metric;
    for (const auto& row : report.table) {
      if (!row.metric_means[m]) continue;
      pass.push_back(row.pass_at_1);
      metric.push_back(*row.metric_means[m]);
    }
    report.cells.push_back(correlate(kMetrics[m], pass, metric, alpha));
  }
  return report;
}

std::vector<CorrelationCell> instance_correlations(const std::vector<AttemptRecord>& log, std::string_view family_id,
                                                   double alpha) {
  pass_at_1(log, family_id);  // EmptyFamily check
  std::vector<CorrelationCell> cells;
  for (auto metric : kMetrics) {
    std::vector<double> pass;
    std::vector<double> values;
    for (const auto& r : log) {
      if (r.family_id != family_id) continue;
      auto v = metric_value(r, metric);
      if (!v) continue;
      pass.push_back(r.outcome == Outcome::Pass ? 1.0 : 0.0);
      values.push_back(*v);
    }
    cells.push_back(correlate(metric, pass, values, alpha));
  }
  return cells;
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

}  // namespace

std::string family_table_csv(const std::vector<FamilyRow>& table) {
  std::ostringstream out;
  out << "family_id,attempts,passes,pass_at_1";
  for (auto m : kMetrics) out << ",mean_" << to_string(m);
  out << '\n';
  for (const auto& row : table) {
    out << row.family_id << ',' << row.attempts << ',' << row.passes << ',' << fmt_double(row.pass_at_1);
    for (const auto& v : row.metric_means) {
      out << ',';
      if (v) out << fmt_double(*v);
    }
    out << '\n';
  }
  return out.str();
}

std::string correlation_csv(const std::vector<CorrelationCell>& cells) {
  std::ostringstream out;
  out << "metric,n,rho,t,p_value,significant,defined\n";
  for (const auto& c : cells) {
    out << to_string(c.metric) << ',' << c.families << ',';
    if (c.result) {
      out << fmt_double(c.result->rho) << ',' << fmt_double(c.result->t) << ',' << fmt_double(c.result->p_value) << ','
          << (c.result->significant ? "true" : "false") << ",true\n";
    } else {
      out << ",,,false,false\n";
    }
  }
  return out.str();
}

std::vector<std::uint8_t> correlation_heatmap_png(const std::vector<CorrelationCell>& cells) {
  constexpr int kLabelWidth = 200;
  constexpr int kCell = 48;
  constexpr int kPad = 8;
  const int width = kLabelWidth + kCell + 2 * kPad;
  const int height = static_cast<int>(cells.size()) * kCell + 2 * kPad;
  SceneBuilder builder(width, std::max(height, 2 * kPad + 1), Color{255, 255, 255, 255});
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const int y = kPad + static_cast<int>(i) * kCell;
    const int x = kPad + kLabelWidth;
    int gx = kPad;
    for (char ch : to_string(cells[i].metric)) {
      const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      if (up != '_') builder.add(GlyphShape{gx, y + (kCell - 14) / 2, 2, up}, Color{30, 30, 30, 255});
      gx += 12;
    }
    const auto& res = cells[i].result;
    if (!res) {
      builder.add(RectShape{double(x), double(y), double(kCell), double(kCell)}, Color{200, 200, 200, 255});
      for (int k = 0; k < 4; ++k) {
        builder.add(RectShape{x + k * 12.0, double(y), 4, double(kCell)}, Color{150, 150, 150, 255});
      }
      continue;
    }
    const double a = std::abs(res->rho);
    const auto fade = [&](int full) { return static_cast<std::uint8_t>(std::lround(255 - a * (255 - full))); };
    const Color c = res->rho >= 0 ? Color{255, fade(40), fade(40), 255} : Color{fade(40), fade(80), 255, 255};
    builder.add(RectShape{double(x), double(y), double(kCell), double(kCell)}, c);
    if (res->significant) {
      builder.add(CircleShape{x + kCell / 2.0, y + kCell / 2.0, 5}, Color{0, 0, 0, 255});
    }
  }
  const auto image = raster::render_static(builder.release());
  return raster::encode_png(image.width(), image.height(), image.rgba());
}

std::string_view to_string(Retention retention) { return retention == Retention::Retain ? "retain" : "reject"; }

Retention retention_filter(const std::vector<bool>& agent_pilot, const std::vector<bool>& human_pilot) {
  if (agent_pilot.size() != 20 || human_pilot.size() != 10) {
    throw Error(ErrorCode::WrongPilotSize, "need 20 agent and 10 human pilot results, got " +
                                               std::to_string(agent_pilot.size()) + " and " +
                                               std::to_string(human_pilot.size()));
  }
  const auto agent_passes = std::count(agent_pilot.begin(), agent_pilot.end(), true);
  const auto human_passes = std::count(human_pilot.begin(), human_pilot.end(), true);
  // Integer form of agent/20 < 0.30 and human/10 > 0.90.
  const bool agent_low = agent_passes * 10 < 3 * 20;
  const bool human_high = human_passes * 10 > 9 * 10;
  return agent_low && human_high ? Retention::Retain : Retention::Reject;
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back().push_back(c);
    }
  }
  return fields;
}

std::int64_t parse_count(const std::string& text, int line_no) {
  try {
    std::size_t used = 0;
    const auto v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Malformed, "line " + std::to_string(line_no) + ": not an integer: " + text);
  }
}

}  // namespace

std::vector<AttemptRecord> parse_attempts_csv(std::string_view text) {
  std::vector<AttemptRecord> out;
  std::map<std::string, std::size_t> column;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (column.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) column[fields[i]] = i;
      if (!column.contains("family_id") || !column.contains("outcome")) {
        throw Error(ErrorCode::Malformed, "CSV header needs family_id and outcome columns");
      }
      continue;
    }
    const auto get = [&](const std::string& name) -> std::optional<std::string> {
      auto it = column.find(name);
      if (it == column.end() || it->second >= fields.size() || fields[it->second].empty()) return std::nullopt;
      return fields[it->second];
    };
    AttemptRecord r;
    r.challenge_id = get("challenge_id").value_or("row" + std::to_string(line_no));
    r.family_id = get("family_id").value_or("");
    if (r.family_id.empty()) throw Error(ErrorCode::Malformed, "line " + std::to_string(line_no) + ": empty family_id");
    std::string outcome = get("outcome").value_or("");
    std::transform(outcome.begin(), outcome.end(), outcome.begin(), [](unsigned char c) { return std::tolower(c); });
    if (outcome == "pass" || outcome == "1" || outcome == "true") {
      r.outcome = Outcome::Pass;
      r.reason = Reason::Correct;
    } else if (outcome == "fail" || outcome == "0" || outcome == "false") {
      r.outcome = Outcome::Fail;
      r.reason = Reason::WrongAnswer;
    } else {
      throw Error(ErrorCode::Malformed, "line " + std::to_string(line_no) + ": bad outcome " + outcome);
    }
    bool has_trajectory = false;
    TrajectoryRecord t;
    if (auto v = get("steps")) { t.steps = parse_count(*v, line_no); has_trajectory = true; }
    if (auto v = get("duration_ms")) { t.duration_ms = parse_count(*v, line_no); r.duration_ms = t.duration_ms; has_trajectory = true; }
    if (auto v = get("reasoning_tokens")) { t.reasoning_tokens = parse_count(*v, line_no); has_trajectory = true; }
    if (auto v = get("click")) t.actions.click = parse_count(*v, line_no);
    if (auto v = get("drag")) t.actions.drag = parse_count(*v, line_no);
    if (auto v = get("scroll")) t.actions.scroll = parse_count(*v, line_no);
    if (auto v = get("keyboard")) t.actions.keyboard = parse_count(*v, line_no);
    if (has_trajectory) {
      t.validate();
      r.trajectory = t;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<AttemptRecord> load_attempts(const std::filesystem::path& path) {
  if (path.extension() == ".csv") {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_attempts_csv(buffer.str());
  }
  return AttemptLog::read(path);
}

}  // namespace gapcha::analytics
