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

#include "shapbandit/study_log.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "shapbandit/error.h"

namespace shapbandit {

const std::vector<std::string_view> kStudyLogColumns = {
    "condition",      "team",           "player",          "day",
    "missed",         "steps",          "baseline_steps",  "pre_motivation",
    "post_motivation", "arm",           "mode",            "catered_player",
    "artificial_steps", "best_arm",     "worst_arm",       "csv",
    "tc",             "running_disparity"};

std::vector<std::size_t> StudyLog::players() const {
  std::set<std::size_t> ids;
  for (const auto& r : rows) ids.insert(r.player);
  return {ids.begin(), ids.end()};
}

std::vector<const SessionRow*> StudyLog::rows_for(std::size_t player) const {
  std::vector<const SessionRow*> out;
  for (const auto& r : rows) {
    if (r.player == player) out.push_back(&r);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SessionRow* a, const SessionRow* b) {
                     return a->day < b->day;
                   });
  return out;
}

std::string FormatNumber(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

namespace {

template <typename T>
std::string Optional(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return FormatNumber(*v);
  } else {
    return std::to_string(*v);
  }
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

class CellParser {
 public:
  CellParser(const std::vector<std::string>& cells, std::size_t line)
      : cells_(cells), line_(line) {}

  const std::string& raw(std::size_t col) const { return cells_[col]; }

  [[noreturn]] void fail(std::size_t col, const std::string& why) const {
    throw SchemaError("column '" + std::string(kStudyLogColumns[col]) +
                          "': " + why,
                      line_, col + 1);
  }

  double number(std::size_t col) const {
    const std::string& s = cells_[col];
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() ||
        !std::isfinite(v)) {
      fail(col, "expected a number, got \"" + s + "\"");
    }
    return v;
  }

  std::optional<double> optional_number(std::size_t col) const {
    if (cells_[col].empty()) return std::nullopt;
    return number(col);
  }

  template <typename Int>
  Int integer(std::size_t col) const {
    const std::string& s = cells_[col];
    Int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      fail(col, "expected an integer, got \"" + s + "\"");
    }
    return v;
  }

  template <typename Int>
  std::optional<Int> optional_integer(std::size_t col) const {
    if (cells_[col].empty()) return std::nullopt;
    return integer<Int>(col);
  }

  Arm arm(std::size_t col) const {
    try {
      return ArmFromLabel(cells_[col]);
    } catch (const std::invalid_argument&) {
      fail(col, "expected A, B or C, got \"" + cells_[col] + "\"");
    }
  }

 private:
  const std::vector<std::string>& cells_;
  std::size_t line_;
};

}  // namespace

void WriteStudyLogCsv(const StudyLog& log, std::ostream& out) {
  for (std::size_t c = 0; c < kStudyLogColumns.size(); ++c) {
    if (c) out << ',';
    out << kStudyLogColumns[c];
  }
  out << '\n';
  for (const SessionRow& r : log.rows) {
    out << r.condition << ',' << r.team << ',' << r.player << ',' << r.day
        << ',' << (r.missed ? 1 : 0) << ',' << Optional(r.steps) << ','
        << FormatNumber(r.baseline_steps) << ',' << Optional(r.pre_motivation)
        << ',' << Optional(r.post_motivation) << ',' << ArmLabel(r.arm)
        << ',' << ModeLabel(r.mode) << ',' << Optional(r.catered_player)
        << ',' << FormatNumber(r.artificial_steps) << ','
        << ArmLabel(r.best_arm) << ',' << ArmLabel(r.worst_arm) << ','
        << FormatNumber(r.csv) << ',' << r.tc << ','
        << FormatNumber(r.running_disparity) << '\n';
  }
}

std::string StudyLogCsv(const StudyLog& log) {
  std::ostringstream out;
  WriteStudyLogCsv(log, out);
  return out.str();
}

StudyLog ReadStudyLogCsv(std::istream& in) {
  StudyLog log;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty study log", 1, 0);
  const auto header = SplitCsvLine(line);
  for (std::size_t c = 0; c < std::max(header.size(), kStudyLogColumns.size());
       ++c) {
    if (c >= header.size()) {
      throw SchemaError("missing column '" +
                            std::string(kStudyLogColumns[c]) + "'",
                        1, c + 1);
    }
    if (c >= kStudyLogColumns.size()) {
      throw SchemaError("unexpected column '" + header[c] + "'", 1, c + 1);
    }
    if (header[c] != kStudyLogColumns[c]) {
      throw SchemaError("expected column '" +
                            std::string(kStudyLogColumns[c]) + "', found '" +
                            header[c] + "'",
                        1, c + 1);
    }
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = SplitCsvLine(line);
    if (cells.size() != kStudyLogColumns.size()) {
      throw SchemaError("expected " + std::to_string(kStudyLogColumns.size()) +
                            " cells, found " + std::to_string(cells.size()),
                        line_no, std::min(cells.size(), kStudyLogColumns.size()));
    }
    CellParser p(cells, line_no);
    SessionRow r;
    r.condition = cells[0];
    r.team = p.integer<std::size_t>(1);
    r.player = p.integer<std::size_t>(2);
    r.day = p.integer<int>(3);
    if (r.day < 1) p.fail(3, "day must be >= 1");
    const int missed = p.integer<int>(4);
    if (missed != 0 && missed != 1) p.fail(4, "expected 0 or 1");
    r.missed = missed == 1;
    r.steps = p.optional_number(5);
    if (r.missed && r.steps) p.fail(5, "missed session must have no steps");
    if (!r.missed && !r.steps) p.fail(5, "attended session needs steps");
    if (r.steps && *r.steps < 0) p.fail(5, "steps must be non-negative");
    r.baseline_steps = p.number(6);
    r.pre_motivation = p.optional_integer<int>(7);
    r.post_motivation = p.optional_integer<int>(8);
    r.arm = p.arm(9);
    try {
      r.mode = ModeFromLabel(cells[10]);
    } catch (const std::invalid_argument&) {
      p.fail(10, "expected explore, exploit or forced, got \"" + cells[10] +
                     "\"");
    }
    r.catered_player = p.optional_integer<std::size_t>(11);
    r.artificial_steps = p.optional_number(12).value_or(0.0);
    r.best_arm = p.arm(13);
    r.worst_arm = p.arm(14);
    r.csv = p.optional_number(15).value_or(0.0);
    r.tc = p.optional_integer<std::int64_t>(16).value_or(0);
    r.running_disparity = p.optional_number(17).value_or(0.0);
    if (log.condition.empty()) log.condition = r.condition;
    log.rows.push_back(std::move(r));
  }

  std::stable_sort(log.rows.begin(), log.rows.end(),
                   [](const SessionRow& a, const SessionRow& b) {
                     return a.player != b.player ? a.player < b.player
                                                 : a.day < b.day;
                   });
  std::map<std::size_t, int> sessions;
  std::map<std::size_t, TeamState> teams;
  for (const SessionRow& r : log.rows) {
    sessions[r.player] = std::max(sessions[r.player], r.day);
  }
  for (const auto& [player, days] : sessions) {
    log.total_sessions = std::max(log.total_sessions, days);
    const SessionRow& last = *log.rows_for(player).back();
    TeamState& t = teams[last.team];
    t.players.push_back(player);
    t.csv.push_back(last.csv);
    t.tc.push_back(last.tc);
  }
  for (auto& [id, t] : teams) log.final_states.push_back(std::move(t));
  return log;
}

StudyLog ReadStudyLogCsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return ReadStudyLogCsv(in);
}

}  // namespace shapbandit
