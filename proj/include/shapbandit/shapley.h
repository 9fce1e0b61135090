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

// Exact Shapley values over small coalitions.
//
//   phi_i(N, v) = sum over S subset of N \ {i} of
//                 |S|! (|N| - |S| - 1)! / |N|!  *  [v(S + i) - v(S)]
//
// Sub-coalitions are enumerated by ascending bitmask over the coalition's
// member indices, so results are bit-reproducible for a given input.

#ifndef SHAPBANDIT_SHAPLEY_H_
#define SHAPBANDIT_SHAPLEY_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shapbandit/characteristic_function.h"

namespace shapbandit {

inline constexpr std::size_t kMaxExactCoalition = 16;
inline constexpr std::size_t kMaxOracleCoalition = 8;
inline constexpr double kAxiomTolerance = 1e-9;

// |a - b| <= rel_tol * max(1, |a|, |b|).
bool WithinTolerance(double a, double b, double rel_tol = kAxiomTolerance);

struct ShapleyAttribution {
  std::vector<PlayerId> players;  // ascending, same order as values
  std::vector<double> values;

  // Throws PlayerNotInCoalition.
  double operator[](PlayerId p) const;
  double total() const;
};

// weights[s] = s! (n - s - 1)! / n! for s in [0, n).
std::vector<double> ShapleyWeights(std::size_t n);

// Throws CoalitionTooLarge if |n| > kMaxExactCoalition and
// PlayerNotInCoalition if i is not a member.
double shapley_value(const CharacteristicFunction& v, const Coalition& n,
                     PlayerId i);

ShapleyAttribution shapley_all(const CharacteristicFunction& v,
                               const Coalition& n);

// Independent route: average marginal contribution over all |N|! orderings.
// Limited to kMaxOracleCoalition players.
ShapleyAttribution shapley_oracle_permutations(const CharacteristicFunction& v,
                                               const Coalition& n);

using AttributionFn = std::function<ShapleyAttribution(
    const CharacteristicFunction&, const Coalition&)>;

struct AxiomReport {
  bool symmetry = true;
  bool nullity = true;
  bool additivity = true;
  bool efficiency = true;

  // Witnesses.
  std::vector<std::pair<PlayerId, PlayerId>> interchangeable_pairs;
  std::vector<PlayerId> null_players;
  double efficiency_residual = 0.0;  // sum(phi) - v(N)
  double max_symmetry_gap = 0.0;     // over interchangeable pairs
  double max_null_value = 0.0;       // |phi_i| over null players
  double max_additivity_error = 0.0;
  std::vector<std::string> failures;

  bool all() const { return symmetry && nullity && additivity && efficiency; }
};

// Checks the four Shapley axioms for `attribution` (shapley_all unless a
// replacement is injected) on v. Additivity is checked against every
// characteristic function in `additivity_partners` as
// phi(v + w) == phi(v) + phi(w); with no partners it holds vacuously.
AxiomReport check_axioms(
    const CharacteristicFunction& v, const Coalition& n,
    std::span<const CharacteristicFunction> additivity_partners = {},
    const AttributionFn& attribution = shapley_all,
    double rel_tol = kAxiomTolerance);

}  // namespace shapbandit

#endif  // SHAPBANDIT_SHAPLEY_H_
