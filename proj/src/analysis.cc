// Copyright 2026 The Shapbandit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shapbandit/analysis.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "shapbandit/error.h"

namespace shapbandit {

std::optional<double> effort(const StudyLog& log, std::size_t player,
                             const AnalysisOptions& options) {
  double sum = 0.0;
  std::size_t attended = 0;
  std::size_t window = 0;
  for (const SessionRow* r : log.rows_for(player)) {
    if (r->day < options.intervention_start_day) continue;
    ++window;
    if (r->missed || !r->steps) continue;
    sum += *r->steps;
    ++attended;
  }
  if (window == 0) {
    throw std::invalid_argument("player " + std::to_string(player) +
                                " has no sessions in the intervention window");
  }
  if (attended == 0) return std::nullopt;
  return sum / static_cast<double>(attended);
}

std::int64_t net_top_treatment(const StudyLog& log, std::size_t player,
                               const AnalysisOptions& options) {
  std::int64_t net = 0;
  for (const SessionRow* r : log.rows_for(player)) {
    if (r->day < options.intervention_start_day) continue;
    if (r->arm == r->best_arm) ++net;
    if (r->arm == r->worst_arm) --net;
  }
  return net;
}

double miss_likelihood(const StudyLog& log, std::size_t player) {
  const auto rows = log.rows_for(player);
  if (rows.empty()) {
    throw std::invalid_argument("player " + std::to_string(player) +
                                " has no scheduled sessions");
  }
  const auto missed = std::count_if(rows.begin(), rows.end(),
                                    [](const SessionRow* r) { return r->missed; });
  return static_cast<double>(missed) / static_cast<double>(rows.size());
}

std::vector<double> percentile_rank(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("percentile_rank: empty");
  const std::size_t n = values.size();
  if (n == 1) return {0.5};
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end + 1 < n && values[order[end + 1]] == values[order[start]]) ++end;
    const double mean_pos = 0.5 * static_cast<double>(start + end);
    for (std::size_t k = start; k <= end; ++k) ranks[order[k]] = mean_pos / denom;
    start = end + 1;
  }
  return ranks;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("pearson_r: length mismatch");
  }
  if (x.size() < 3) throw std::invalid_argument("pearson_r: need >= 3 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateInput("pearson_r: zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

double TwoSidedP(double z) { return std::erfc(std::abs(z) / std::numbers::sqrt2); }

}  // namespace

ZTest correlation_diff_test(double r1, std::size_t n1, double r2,
                            std::size_t n2) {
  if (n1 < 4 || n2 < 4) {
    throw DegenerateInput("correlation_diff_test: each sample needs n >= 4");
  }
  if (!(std::abs(r1) < 1.0) || !(std::abs(r2) < 1.0)) {
    throw DegenerateInput("correlation_diff_test: |r| must be below 1");
  }
  const double se = std::sqrt(1.0 / static_cast<double>(n1 - 3) +
                              1.0 / static_cast<double>(n2 - 3));
  ZTest t;
  t.z = (std::atanh(r1) - std::atanh(r2)) / se;
  t.p = TwoSidedP(t.z);
  return t;
}

ZTest slope_diff_test(double b1, double se1, double b2, double se2) {
  const double se = std::sqrt(se1 * se1 + se2 * se2);
  if (!(se > 0.0)) throw DegenerateInput("slope_diff_test: zero standard error");
  ZTest t;
  t.z = (b1 - b2) / se;
  t.p = TwoSidedP(t.z);
  return t;
}

DisparityReport disparity_report(std::span<const StudyLog> logs,
                                 const AnalysisOptions& options) {
  DisparityReport report;
  for (std::size_t s = 0; s < logs.size(); ++s) {
    for (std::size_t p : logs[s].players()) {
      const auto e = effort(logs[s], p, options);
      if (!e) {
        report.excluded.emplace_back(s, p);
        continue;
      }
      PlayerMetrics m;
      m.source = s;
      m.player = p;
      m.team = logs[s].rows_for(p).front()->team;
      m.effort = *e;
      m.net_top_treatment = net_top_treatment(logs[s], p, options);
      m.miss_likelihood = miss_likelihood(logs[s], p);
      report.players.push_back(m);
    }
  }
  const std::size_t n = report.players.size();
  if (n < 3) {
    throw DegenerateInput("disparity_report: need at least 3 analyzable "
                          "players, have " + std::to_string(n));
  }
  std::vector<double> efforts(n), treatments(n);
  for (std::size_t k = 0; k < n; ++k) {
    efforts[k] = report.players[k].effort;
    treatments[k] = static_cast<double>(report.players[k].net_top_treatment);
  }
  const auto er = percentile_rank(efforts);
  const auto tr = percentile_rank(treatments);
  for (std::size_t k = 0; k < n; ++k) {
    auto& m = report.players[k];
    m.effort_rank = er[k];
    m.treatment_rank = tr[k];
    m.disparity = er[k] - tr[k];
    report.mean_signed_disparity += m.disparity;
    report.mean_abs_disparity += std::abs(m.disparity);
  }
  report.mean_signed_disparity /= static_cast<double>(n);
  report.mean_abs_disparity /= static_cast<double>(n);

  std::stable_sort(report.players.begin(), report.players.end(),
                   [](const PlayerMetrics& a, const PlayerMetrics& b) {
                     return a.disparity < b.disparity;
                   });

  std::vector<double> d(n), miss(n);
  for (std::size_t k = 0; k < n; ++k) {
    d[k] = report.players[k].disparity;
    miss[k] = report.players[k].miss_likelihood;
  }
  try {
    CorrelationReport c;
    c.r = pearson_r(d, miss);
    c.n = n;
    c.fisher_z = std::abs(c.r) < 1.0 ? std::atanh(c.r)
                                     : std::copysign(INFINITY, c.r);
    report.correlation = c;
  } catch (const DegenerateInput& e) {
    report.correlation_note = e.what();
  }
  return report;
}

DisparityReport disparity_report(const StudyLog& log,
                                 const AnalysisOptions& options) {
  return disparity_report(std::span<const StudyLog>(&log, 1), options);
}

std::string DisparityReportCsv(const DisparityReport& report,
                               bool with_source) {
  std::ostringstream out;
  if (with_source) out << "source,team,";
  out << "player,disparity,miss_likelihood,effort,treatment\n";
  for (const PlayerMetrics& m : report.players) {
    if (with_source) out << m.source << ',' << m.team << ',';
    out << m.player << ',' << FormatNumber(m.disparity) << ','
        << FormatNumber(m.miss_likelihood) << ',' << FormatNumber(m.effort)
        << ',' << m.net_top_treatment << '\n';
  }
  return out.str();
}

nlohmann::ordered_json DisparityReportJson(const DisparityReport& report) {
  nlohmann::ordered_json j;
  j["players"] = report.players.size();
  j["excluded_players"] = report.excluded.size();
  if (report.correlation) {
    j["r"] = report.correlation->r;
    j["n"] = report.correlation->n;
    j["fisher_z"] = std::isfinite(report.correlation->fisher_z)
                        ? nlohmann::ordered_json(report.correlation->fisher_z)
                        : nlohmann::ordered_json(nullptr);
    if (report.correlation->comparison) {
      j["z"] = report.correlation->comparison->z;
      j["p"] = report.correlation->comparison->p;
    }
  } else {
    j["r"] = nullptr;
    j["n"] = report.players.size();
    j["note"] = report.correlation_note;
  }
  j["mean_signed_disparity"] = report.mean_signed_disparity;
  j["mean_abs_disparity"] = report.mean_abs_disparity;
  return j;
}

}  // namespace shapbandit
