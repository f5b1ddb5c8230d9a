// Copyright 2026 The imitlab Authors.
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

#include "envsim/variant.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include "common/error.hpp"

namespace imitlab {

namespace {

struct CategoryInfo {
  VariantCategory category;
  std::string_view token;
};

constexpr CategoryInfo kCategoryTable[] = {
    {VariantCategory::MassInc, "massinc"},
    {VariantCategory::MassDec, "massdec"},
    {VariantCategory::JointDec, "jointdec"},
    {VariantCategory::LengthInc, "lengthinc"},
    {VariantCategory::LengthDec, "lengthdec"},
    {VariantCategory::FrictionInc, "frictioninc"},
    {VariantCategory::FrictionDec, "frictiondec"},
};

bool valid_part_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

}  // namespace

std::string_view category_token(VariantCategory c) {
  for (const auto& info : kCategoryTable) {
    if (info.category == c) return info.token;
  }
  return "unknown";
}

std::optional<VariantCategory> category_from_token(std::string_view token) {
  for (const auto& info : kCategoryTable) {
    if (info.token == token) return info.category;
  }
  return std::nullopt;
}

MacroCategory macro_category(VariantCategory c) {
  switch (c) {
    case VariantCategory::MassInc:
    case VariantCategory::MassDec:
      return MacroCategory::Mass;
    case VariantCategory::JointDec:
      return MacroCategory::Joint;
    case VariantCategory::LengthInc:
    case VariantCategory::LengthDec:
      return MacroCategory::Length;
    case VariantCategory::FrictionInc:
    case VariantCategory::FrictionDec:
      return MacroCategory::Friction;
  }
  return MacroCategory::Mass;
}

std::string_view macro_category_name(MacroCategory m) {
  switch (m) {
    case MacroCategory::Mass: return "mass";
    case MacroCategory::Friction: return "friction";
    case MacroCategory::Joint: return "joint";
    case MacroCategory::Length: return "length";
  }
  return "unknown";
}

std::optional<MacroCategory> macro_category_from_name(std::string_view name) {
  for (MacroCategory m : kAllMacroCategories) {
    if (macro_category_name(m) == name) return m;
  }
  return std::nullopt;
}

Attribute targeted_attribute(VariantCategory c) {
  switch (macro_category(c)) {
    case MacroCategory::Mass: return Attribute::Mass;
    case MacroCategory::Joint: return Attribute::JointRange;
    case MacroCategory::Length: return Attribute::Length;
    case MacroCategory::Friction: return Attribute::Friction;
  }
  return Attribute::Mass;
}

std::string_view attribute_name(Attribute a) {
  switch (a) {
    case Attribute::Mass: return "mass";
    case Attribute::Length: return "length";
    case Attribute::JointRange: return "joint_range";
    case Attribute::Friction: return "friction";
  }
  return "unknown";
}

bool is_increase(VariantCategory c) {
  return c == VariantCategory::MassInc || c == VariantCategory::LengthInc ||
         c == VariantCategory::FrictionInc;
}

VariantId parse_variant_id(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  while (true) {
    const std::size_t dash = s.find('-', start);
    if (dash == std::string_view::npos) {
      tokens.push_back(s.substr(start));
      break;
    }
    tokens.push_back(s.substr(start, dash - start));
    start = dash + 1;
  }
  if (tokens.size() != 3) {
    fail(ErrorKind::Parse, "variant id '" + std::string(s) + "': expected 3 '-'-separated tokens, got " +
                               std::to_string(tokens.size()));
  }

  const auto category = category_from_token(tokens[0]);
  if (!category) {
    fail(ErrorKind::Parse, "variant id '" + std::string(s) + "': unknown type token \"" +
                               std::string(tokens[0]) + "\"");
  }

  double quantity = 0.0;
  const std::string_view qtok = tokens[1];
  const auto [end, ec] = std::from_chars(qtok.data(), qtok.data() + qtok.size(), quantity);
  if (qtok.empty() || ec != std::errc() || end != qtok.data() + qtok.size()) {
    fail(ErrorKind::Parse, "variant id '" + std::string(s) + "': quantity \"" + std::string(qtok) +
                               "\" is not a number");
  }
  if (!std::isfinite(quantity) || quantity <= 0.0) {
    fail(ErrorKind::Parse, "variant id '" + std::string(s) + "': quantity \"" + std::string(qtok) +
                               "\" must be positive");
  }

  const std::string_view part = tokens[2];
  if (part.empty()) {
    fail(ErrorKind::Parse, "variant id '" + std::string(s) + "': empty part name");
  }
  for (char c : part) {
    if (!valid_part_char(c)) {
      fail(ErrorKind::Parse, "variant id '" + std::string(s) + "': invalid character in part \"" +
                                 std::string(part) + "\"");
    }
  }
  return VariantId{*category, quantity, std::string(part)};
}

std::string format_variant_id(const VariantId& v) {
  std::string out(category_token(v.category));
  out += '-';
  char buf[64];
  std::to_chars_result r;
  if (v.quantity_pct == std::floor(v.quantity_pct) && v.quantity_pct < 1e15) {
    r = std::to_chars(buf, buf + sizeof(buf), static_cast<long long>(v.quantity_pct));
  } else {
    r = std::to_chars(buf, buf + sizeof(buf), v.quantity_pct);
  }
  out.append(buf, r.ptr);
  out += '-';
  out += v.part;
  return out;
}

}  // namespace imitlab
