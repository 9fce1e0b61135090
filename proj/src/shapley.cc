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

#include "shapbandit/shapley.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "shapbandit/error.h"

namespace shapbandit {
namespace {

void RequireSize(const Coalition& n, std::size_t limit, const char* what) {
  if (n.size() > limit) {
    throw CoalitionTooLarge(std::string(what) + ": coalition of " +
                            std::to_string(n.size()) + " players exceeds " +
                            std::to_string(limit));
  }
}

// Maps a dense index over 2^|members| onto the member bitmask. Ascending
// dense indices give ascending masks.
SubsetMask Scatter(std::size_t dense, std::span<const PlayerId> members) {
  SubsetMask mask = 0;
  for (std::size_t b = 0; dense != 0; ++b, dense >>= 1) {
    if (dense & 1) mask |= members[b].bit();
  }
  return mask;
}

// v evaluated on every subset of the coalition, indexed densely.
std::vector<double> TabulateSubsets(const CharacteristicFunction& v,
                                    std::span<const PlayerId> members) {
  const std::size_t count = std::size_t{1} << members.size();
  std::vector<double> values(count);
  for (std::size_t d = 0; d < count; ++d) values[d] = v(Scatter(d, members));
  return values;
}

double ShapleyFromTable(std::span<const double> table,
                        std::span<const double> weights, std::size_t position) {
  const std::size_t bit = std::size_t{1} << position;
  double phi = 0.0;
  for (std::size_t d = 0; d < table.size(); ++d) {
    if (d & bit) continue;
    const auto s = static_cast<std::size_t>(std::popcount(d));
    phi += weights[s] * (table[d | bit] - table[d]);
  }
  return phi;
}

std::size_t PositionOf(std::span<const PlayerId> members, PlayerId i) {
  auto it = std::find(members.begin(), members.end(), i);
  if (it == members.end()) {
    throw PlayerNotInCoalition("player " + std::to_string(i.index()) +
                               " is not a coalition member");
  }
  return static_cast<std::size_t>(it - members.begin());
}

}  // namespace

bool WithinTolerance(double a, double b, double rel_tol) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= rel_tol * scale;
}

double ShapleyAttribution::operator[](PlayerId p) const {
  return values[PositionOf(players, p)];
}

double ShapleyAttribution::total() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

std::vector<double> ShapleyWeights(std::size_t n) {
  // Built as a ratio of running products to stay exact well past 16!.
  std::vector<double> w(n);
  for (std::size_t s = 0; s < n; ++s) {
    // s! (n-s-1)! / n! = 1 / (n * C(n-1, s))
    double binom = 1.0;
    for (std::size_t k = 1; k <= s; ++k) {
      binom = binom * static_cast<double>(n - 1 - s + k) /
              static_cast<double>(k);
    }
    w[s] = 1.0 / (static_cast<double>(n) * binom);
  }
  return w;
}

double shapley_value(const CharacteristicFunction& v, const Coalition& n,
                     PlayerId i) {
  RequireSize(n, kMaxExactCoalition, "shapley_value");
  const auto members = n.members();
  const std::size_t pos = PositionOf(members, i);
  const auto table = TabulateSubsets(v, members);
  return ShapleyFromTable(table, ShapleyWeights(members.size()), pos);
}

ShapleyAttribution shapley_all(const CharacteristicFunction& v,
                               const Coalition& n) {
  RequireSize(n, kMaxExactCoalition, "shapley_all");
  ShapleyAttribution out;
  out.players = n.members();
  const auto table = TabulateSubsets(v, out.players);
  const auto weights = ShapleyWeights(out.players.size());
  out.values.reserve(out.players.size());
  for (std::size_t p = 0; p < out.players.size(); ++p) {
    out.values.push_back(ShapleyFromTable(table, weights, p));
  }
  return out;
}

ShapleyAttribution shapley_oracle_permutations(const CharacteristicFunction& v,
                                               const Coalition& n) {
  RequireSize(n, kMaxOracleCoalition, "shapley_oracle_permutations");
  ShapleyAttribution out;
  out.players = n.members();
  const std::size_t m = out.players.size();
  out.values.assign(m, 0.0);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::size_t orderings = 0;
  do {
    SubsetMask prefix = 0;
    double before = 0.0;
    for (std::size_t pos : order) {
      prefix |= out.players[pos].bit();
      const double after = v(prefix);
      out.values[pos] += after - before;
      before = after;
    }
    ++orderings;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& x : out.values) x /= static_cast<double>(orderings);
  return out;
}

AxiomReport check_axioms(
    const CharacteristicFunction& v, const Coalition& n,
    std::span<const CharacteristicFunction> additivity_partners,
    const AttributionFn& attribution, double rel_tol) {
  RequireSize(n, kMaxExactCoalition, "check_axioms");
  AxiomReport report;
  const auto members = n.members();
  const std::size_t m = members.size();
  const auto table = TabulateSubsets(v, members);
  const ShapleyAttribution phi = attribution(v, n);
  if (phi.values.size() != m) {
    report.efficiency = report.symmetry = report.nullity = false;
    report.failures.push_back("attribution returned " +
                              std::to_string(phi.values.size()) +
                              " values for " + std::to_string(m) + " players");
    return report;
  }

  // Efficiency.
  const double grand = table.back();
  report.efficiency_residual = phi.total() - grand;
  if (!WithinTolerance(phi.total(), grand, rel_tol)) {
    report.efficiency = false;
    std::ostringstream msg;
    msg.precision(17);
    msg << "efficiency: sum(phi) = " << phi.total() << " but v(N) = " << grand;
    report.failures.push_back(msg.str());
  }

  // Symmetry: i and j are interchangeable if v(S+i) == v(S+j) for every S
  // containing neither.
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const std::size_t ba = std::size_t{1} << a;
      const std::size_t bb = std::size_t{1} << b;
      bool interchangeable = true;
      for (std::size_t d = 0; d < table.size() && interchangeable; ++d) {
        if (d & (ba | bb)) continue;
        interchangeable = WithinTolerance(table[d | ba], table[d | bb], rel_tol);
      }
      if (!interchangeable) continue;
      report.interchangeable_pairs.emplace_back(members[a], members[b]);
      const double gap = std::abs(phi.values[a] - phi.values[b]);
      report.max_symmetry_gap = std::max(report.max_symmetry_gap, gap);
      if (!WithinTolerance(phi.values[a], phi.values[b], rel_tol)) {
        report.symmetry = false;
        report.failures.push_back(
            "symmetry: players " + std::to_string(members[a].index()) +
            " and " + std::to_string(members[b].index()) +
            " are interchangeable but receive different values");
      }
    }
  }

  // Nullity: every marginal contribution is zero.
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t ba = std::size_t{1} << a;
    bool null_player = true;
    for (std::size_t d = 0; d < table.size() && null_player; ++d) {
      if (d & ba) continue;
      null_player = WithinTolerance(table[d | ba], table[d], rel_tol);
    }
    if (!null_player) continue;
    report.null_players.push_back(members[a]);
    report.max_null_value =
        std::max(report.max_null_value, std::abs(phi.values[a]));
    if (!WithinTolerance(phi.values[a], 0.0, rel_tol)) {
      report.nullity = false;
      report.failures.push_back("nullity: null player " +
                                std::to_string(members[a].index()) +
                                " receives a nonzero value");
    }
  }

  // Additivity.
  for (const CharacteristicFunction& w : additivity_partners) {
    const ShapleyAttribution phi_w = attribution(w, n);
    const ShapleyAttribution phi_sum = attribution(v + w, n);
    if (phi_w.values.size() != m || phi_sum.values.size() != m) {
      report.additivity = false;
      report.failures.push_back("additivity: attribution size mismatch");
      continue;
    }
    for (std::size_t a = 0; a < m; ++a) {
      const double expected = phi.values[a] + phi_w.values[a];
      report.max_additivity_error = std::max(
          report.max_additivity_error, std::abs(phi_sum.values[a] - expected));
      if (!WithinTolerance(phi_sum.values[a], expected, rel_tol)) {
        if (report.additivity) {
          report.failures.push_back("additivity: phi(v+w) != phi(v)+phi(w) "
                                    "for player " +
                                    std::to_string(members[a].index()));
        }
        report.additivity = false;
      }
    }
  }
  return report;
}

}  // namespace shapbandit
