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

#ifndef SHAPBANDIT_ARM_H_
#define SHAPBANDIT_ARM_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "shapbandit/rng.h"

namespace shapbandit {

// Placement of the artificial teammate's reported steps relative to the
// human players. Ordinals are stable and used in logs: A=0, B=1, C=2.
enum class Arm : std::uint8_t {
  kAboveHigher = 0,  // A: 20% above the higher player
  kBetween = 1,      // B: midpoint of the players
  kBelowLower = 2,   // C: 20% below the lower player
};

inline constexpr std::size_t kNumArms = 3;
inline constexpr std::array<Arm, kNumArms> kAllArms = {
    Arm::kAboveHigher, Arm::kBetween, Arm::kBelowLower};

constexpr std::size_t Ordinal(Arm arm) { return static_cast<std::size_t>(arm); }
// Throws std::out_of_range for ordinals >= kNumArms.
Arm ArmFromOrdinal(std::size_t ordinal);
// "A", "B" or "C".
std::string_view ArmLabel(Arm arm);
// Accepts a single letter A/B/C (case-insensitive); throws
// std::invalid_argument otherwise.
Arm ArmFromLabel(std::string_view label);

struct PlacementOptions {
  double above_factor = 1.2;
  double below_factor = 0.8;
  // Multiplicative obfuscation, uniform in [1 - jitter, 1 + jitter].
  double jitter = 0.02;
};

// Steps reported for the artificial teammate. With `jitter_rng` non-null the
// placement is multiplied by a uniform factor in [0.98, 1.02]. Throws
// std::invalid_argument on negative input steps.
double place_artificial_steps(Arm arm, double steps_a, double steps_b,
                              Rng* jitter_rng = nullptr,
                              const PlacementOptions& options = {});

// Same rule over any number of human players (higher/lower become max/min,
// the midpoint becomes the mean).
double place_artificial_steps(Arm arm, std::span<const double> human_steps,
                              Rng* jitter_rng = nullptr,
                              const PlacementOptions& options = {});

}  // namespace shapbandit

#endif  // SHAPBANDIT_ARM_H_
