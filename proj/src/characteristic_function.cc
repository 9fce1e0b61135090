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

#include "shapbandit/characteristic_function.h"

#include <bit>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "shapbandit/error.h"

namespace shapbandit {

Coalition::Coalition(std::initializer_list<PlayerId> members)
    : Coalition(std::span<const PlayerId>(members.begin(), members.size())) {}

Coalition::Coalition(std::span<const PlayerId> members) {
  for (PlayerId p : members) {
    if (p.index() > kMaxPlayerIndex) {
      throw std::invalid_argument("player index " + std::to_string(p.index()) +
                                  " exceeds " +
                                  std::to_string(kMaxPlayerIndex));
    }
    if (mask_ & p.bit()) {
      throw std::invalid_argument("duplicate coalition member " +
                                  std::to_string(p.index()));
    }
    mask_ |= p.bit();
  }
}

Coalition Coalition::FromMask(SubsetMask mask) { return Coalition(mask, 0); }

Coalition Coalition::FirstN(std::size_t n) {
  if (n > kMaxPlayerIndex + 1) {
    throw std::invalid_argument("coalition of " + std::to_string(n) +
                                " players exceeds the index range");
  }
  return Coalition(n == 32 ? ~SubsetMask{0} : (SubsetMask{1} << n) - 1, 0);
}

std::size_t Coalition::size() const {
  return static_cast<std::size_t>(std::popcount(mask_));
}

std::vector<PlayerId> Coalition::members() const {
  std::vector<PlayerId> out;
  out.reserve(size());
  for (SubsetMask m = mask_; m != 0; m &= m - 1) {
    out.emplace_back(static_cast<std::size_t>(std::countr_zero(m)));
  }
  return out;
}

CharacteristicFunction::CharacteristicFunction(Evaluator evaluator)
    : evaluator_(std::move(evaluator)) {
  if (!evaluator_) {
    throw std::invalid_argument("characteristic function has no evaluator");
  }
  if (evaluator_(0) != 0.0) {
    throw std::invalid_argument("characteristic function must map the empty "
                                "coalition to 0");
  }
}

CharacteristicFunction CharacteristicFunction::AdditiveSteps(
    std::vector<double> weights) {
  if (weights.size() > kMaxPlayerIndex + 1) {
    throw std::invalid_argument("too many additive weights");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) {
      throw std::invalid_argument("additive weight is not finite");
    }
  }
  auto w = std::make_shared<const std::vector<double>>(std::move(weights));
  return CharacteristicFunction([w](SubsetMask s) {
    double total = 0.0;
    for (SubsetMask m = s; m != 0; m &= m - 1) {
      const auto j = static_cast<std::size_t>(std::countr_zero(m));
      if (j >= w->size()) {
        throw std::out_of_range("additive characteristic function has no "
                                "weight for player " + std::to_string(j));
      }
      total += (*w)[j];
    }
    return total;
  });
}

CharacteristicFunction CharacteristicFunction::TableBacked(
    std::size_t players, std::vector<double> table) {
  if (players > 20) {
    throw CoalitionTooLarge("table-backed characteristic function limited to "
                            "20 players");
  }
  if (table.size() != (std::size_t{1} << players)) {
    throw std::invalid_argument("table must have 2^players entries");
  }
  auto t = std::make_shared<const std::vector<double>>(std::move(table));
  return CharacteristicFunction([t](SubsetMask s) {
    if (s >= t->size()) {
      throw std::out_of_range("subset outside the table's player range");
    }
    return (*t)[s];
  });
}

namespace {

SubsetMask ParseMemberKey(const std::string& key, std::size_t players) {
  SubsetMask mask = 0;
  std::size_t pos = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t'; };
  while (pos < key.size() && is_space(key[pos])) ++pos;
  if (pos == key.size()) return 0;
  while (pos <= key.size()) {
    std::size_t end = key.find(',', pos);
    if (end == std::string::npos) end = key.size();
    std::string token = key.substr(pos, end - pos);
    while (!token.empty() && is_space(token.front())) token.erase(0, 1);
    while (!token.empty() && is_space(token.back())) token.pop_back();
    if (token.empty() ||
        token.find_first_not_of("0123456789") != std::string::npos) {
      throw SchemaError("bad member list \"" + key + "\" in values", 0, 0);
    }
    const unsigned long idx = std::stoul(token);
    if (idx >= players) {
      throw SchemaError("member " + token + " out of range in \"" + key +
                            "\"",
                        0, 0);
    }
    const SubsetMask bit = SubsetMask{1} << idx;
    if (mask & bit) {
      throw SchemaError("duplicate member " + token + " in \"" + key + "\"", 0,
                        0);
    }
    mask |= bit;
    pos = end + 1;
  }
  return mask;
}

}  // namespace

CharacteristicFunction CharacteristicFunction::TableFromJson(
    std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(e.what(), 0, 0);
  }
  if (!doc.is_object() || !doc.contains("players") ||
      !doc["players"].is_number_unsigned()) {
    throw SchemaError("\"players\" must be a non-negative integer", 0, 0);
  }
  if (!doc.contains("values") || !doc["values"].is_object()) {
    throw SchemaError("\"values\" must be an object", 0, 0);
  }
  const auto players = doc["players"].get<std::size_t>();
  if (players > 20) {
    throw CoalitionTooLarge("table-backed characteristic function limited to "
                            "20 players");
  }
  const std::size_t entries = std::size_t{1} << players;
  std::vector<double> table(entries, 0.0);
  std::vector<bool> seen(entries, false);
  seen[0] = true;
  for (const auto& [key, value] : doc["values"].items()) {
    if (!value.is_number()) {
      throw SchemaError("value for \"" + key + "\" is not a number", 0, 0);
    }
    const SubsetMask mask = ParseMemberKey(key, players);
    if (mask != 0 && seen[mask]) {
      throw SchemaError("subset \"" + key + "\" listed twice", 0, 0);
    }
    table[mask] = value.get<double>();
    seen[mask] = true;
  }
  if (table[0] != 0.0) {
    throw SchemaError("the empty coalition must have value 0", 0, 0);
  }
  for (std::size_t m = 1; m < entries; ++m) {
    if (!seen[m]) {
      std::string key;
      for (std::size_t j = 0; j < players; ++j) {
        if (m & (std::size_t{1} << j)) {
          if (!key.empty()) key += ",";
          key += std::to_string(j);
        }
      }
      throw SchemaError("missing value for subset \"" + key + "\"", 0, 0);
    }
  }
  return TableBacked(players, std::move(table));
}

CharacteristicFunction operator+(const CharacteristicFunction& a,
                                 const CharacteristicFunction& b) {
  return CharacteristicFunction(
      [a, b](SubsetMask s) { return a(s) + b(s); });
}

CharacteristicFunction operator*(double c, const CharacteristicFunction& v) {
  return CharacteristicFunction([c, v](SubsetMask s) { return c * v(s); });
}

}  // namespace shapbandit
