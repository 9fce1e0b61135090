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

#include "shapbandit/arm.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace shapbandit {

Arm ArmFromOrdinal(std::size_t ordinal) {
  if (ordinal >= kNumArms) {
    throw std::out_of_range("arm ordinal " + std::to_string(ordinal));
  }
  return static_cast<Arm>(ordinal);
}

std::string_view ArmLabel(Arm arm) {
  switch (arm) {
    case Arm::kAboveHigher:
      return "A";
    case Arm::kBetween:
      return "B";
    case Arm::kBelowLower:
      return "C";
  }
  return "?";
}

Arm ArmFromLabel(std::string_view label) {
  if (label.size() == 1) {
    switch (label[0]) {
      case 'A':
      case 'a':
        return Arm::kAboveHigher;
      case 'B':
      case 'b':
        return Arm::kBetween;
      case 'C':
      case 'c':
        return Arm::kBelowLower;
    }
  }
  throw std::invalid_argument("unknown arm \"" + std::string(label) + "\"");
}

double place_artificial_steps(Arm arm, double steps_a, double steps_b,
                              Rng* jitter_rng,
                              const PlacementOptions& options) {
  const double steps[] = {steps_a, steps_b};
  return place_artificial_steps(arm, steps, jitter_rng, options);
}

double place_artificial_steps(Arm arm, std::span<const double> human_steps,
                              Rng* jitter_rng,
                              const PlacementOptions& options) {
  if (human_steps.empty()) {
    throw std::invalid_argument("place_artificial_steps: no human players");
  }
  for (double s : human_steps) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("place_artificial_steps: steps must be "
                                  "finite and non-negative");
    }
  }
  double placed = 0.0;
  switch (arm) {
    case Arm::kAboveHigher:
      placed = options.above_factor *
               *std::max_element(human_steps.begin(), human_steps.end());
      break;
    case Arm::kBetween:
      placed = std::accumulate(human_steps.begin(), human_steps.end(), 0.0) /
               static_cast<double>(human_steps.size());
      break;
    case Arm::kBelowLower:
      placed = options.below_factor *
               *std::min_element(human_steps.begin(), human_steps.end());
      break;
  }
  if (jitter_rng != nullptr) {
    placed *= jitter_rng->uniform(1.0 - options.jitter, 1.0 + options.jitter);
  }
  return std::max(0.0, placed);
}

}  // namespace shapbandit
