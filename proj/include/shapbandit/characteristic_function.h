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

#ifndef SHAPBANDIT_CHARACTERISTIC_FUNCTION_H_
#define SHAPBANDIT_CHARACTERISTIC_FUNCTION_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shapbandit {

// Bit i set <=> player with index i is a member.
using SubsetMask = std::uint32_t;

inline constexpr std::size_t kMaxPlayerIndex = 31;

class PlayerId {
 public:
  constexpr PlayerId() = default;
  constexpr explicit PlayerId(std::size_t index) : index_(index) {}

  constexpr std::size_t index() const { return index_; }
  constexpr SubsetMask bit() const { return SubsetMask{1} << index_; }

  auto operator<=>(const PlayerId&) const = default;

 private:
  std::size_t index_ = 0;
};

// A set of distinct players, stored as a bitmask over player indices.
class Coalition {
 public:
  Coalition() = default;
  // Throws std::invalid_argument on duplicates or indices above
  // kMaxPlayerIndex.
  Coalition(std::initializer_list<PlayerId> members);
  explicit Coalition(std::span<const PlayerId> members);

  static Coalition FromMask(SubsetMask mask);
  // {0, 1, ..., n-1}.
  static Coalition FirstN(std::size_t n);

  SubsetMask mask() const { return mask_; }
  std::size_t size() const;
  bool empty() const { return mask_ == 0; }
  bool contains(PlayerId p) const {
    return p.index() <= kMaxPlayerIndex && (mask_ & p.bit()) != 0;
  }
  bool is_subset_of(const Coalition& other) const {
    return (mask_ & ~other.mask_) == 0;
  }
  // Ascending by index.
  std::vector<PlayerId> members() const;

  bool operator==(const Coalition&) const = default;

 private:
  explicit Coalition(SubsetMask mask, int) : mask_(mask) {}
  SubsetMask mask_ = 0;
};

// v(S) for every sub-coalition S. v(empty) is always 0.
class CharacteristicFunction {
 public:
  using Evaluator = std::function<double(SubsetMask)>;

  // Throws std::invalid_argument if evaluator(0) != 0.
  explicit CharacteristicFunction(Evaluator evaluator);

  // v(S) = sum of weights[j] for j in S. The deployed approximation for
  // unobservable sub-coalitions: summed individual steps.
  static CharacteristicFunction AdditiveSteps(std::vector<double> weights);

  // Explicit table indexed by mask; table.size() must be 2^players and
  // table[0] must be 0.
  static CharacteristicFunction TableBacked(std::size_t players,
                                            std::vector<double> table);

  // {"players": k, "values": {"0,1": 23000, "0": 10000, ...}}. Keys are
  // comma-separated member indices, "" names the empty set. A missing empty
  // set entry means 0; any other missing subset is an error.
  static CharacteristicFunction TableFromJson(std::string_view json_text);

  double operator()(SubsetMask s) const {
    return s == 0 ? 0.0 : evaluator_(s);
  }
  double operator()(const Coalition& s) const { return (*this)(s.mask()); }

  friend CharacteristicFunction operator+(const CharacteristicFunction& a,
                                          const CharacteristicFunction& b);
  friend CharacteristicFunction operator*(double c,
                                          const CharacteristicFunction& v);

 private:
  Evaluator evaluator_;
};

}  // namespace shapbandit

#endif  // SHAPBANDIT_CHARACTERISTIC_FUNCTION_H_
