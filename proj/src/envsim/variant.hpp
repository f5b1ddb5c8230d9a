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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace imitlab {

enum class VariantCategory : std::uint8_t {
  MassInc,
  MassDec,
  JointDec,
  LengthInc,
  LengthDec,
  FrictionInc,
  FrictionDec,
};

inline constexpr VariantCategory kAllCategories[] = {
    VariantCategory::MassInc,   VariantCategory::MassDec,
    VariantCategory::JointDec,  VariantCategory::LengthInc,
    VariantCategory::LengthDec, VariantCategory::FrictionInc,
    VariantCategory::FrictionDec,
};

/// The four families used for k-fold splits; inc and dec share a family.
enum class MacroCategory : std::uint8_t { Mass, Friction, Joint, Length };

inline constexpr MacroCategory kAllMacroCategories[] = {
    MacroCategory::Mass, MacroCategory::Friction, MacroCategory::Joint,
    MacroCategory::Length};

/// Physical attribute a category scales.
enum class Attribute : std::uint8_t { Mass, Length, JointRange, Friction };

std::string_view category_token(VariantCategory c);
std::optional<VariantCategory> category_from_token(std::string_view token);
MacroCategory macro_category(VariantCategory c);
std::string_view macro_category_name(MacroCategory m);
std::optional<MacroCategory> macro_category_from_name(std::string_view name);
Attribute targeted_attribute(VariantCategory c);
std::string_view attribute_name(Attribute a);
bool is_increase(VariantCategory c);

/// `type-quantity-part` environment modification descriptor.
struct VariantId {
  VariantCategory category = VariantCategory::MassInc;
  double quantity_pct = 0.0;
  std::string part;

  friend bool operator==(const VariantId&, const VariantId&) = default;
};

/// Parses `<type>-<number>-<part>`. Throws Error(Parse) naming the offending
/// component.
VariantId parse_variant_id(std::string_view s);

/// Canonical lowercase form; integral quantities print without a decimal
/// point, others in shortest round-trip notation.
std::string format_variant_id(const VariantId& v);

}  // namespace imitlab
