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

#include <vector>

#include "envsim/variant.hpp"

namespace imitlab {

struct FoldSpec {
  MacroCategory held_out = MacroCategory::Mass;
  std::vector<VariantId> train_variants;
  std::vector<VariantId> eval_variants;
};

/// One fold per macro-category, in Mass, Friction, Joint, Length order.
/// Input order is preserved inside each list.
std::vector<FoldSpec> make_folds(const std::vector<VariantId>& catalog);

/// The fold whose eval set holds `v`.
const FoldSpec& fold_for(const std::vector<FoldSpec>& folds, const VariantId& v);

}  // namespace imitlab
