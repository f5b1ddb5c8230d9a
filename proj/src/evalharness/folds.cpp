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

#include "evalharness/folds.hpp"

#include "common/error.hpp"

namespace imitlab {

std::vector<FoldSpec> make_folds(const std::vector<VariantId>& catalog) {
  if (catalog.empty()) fail(ErrorKind::InvalidArgument, "make_folds: empty catalog");
  std::vector<FoldSpec> folds;
  for (MacroCategory m : {MacroCategory::Mass, MacroCategory::Friction, MacroCategory::Joint, MacroCategory::Length}) {
    FoldSpec f;
    f.held_out = m;
    for (const VariantId& v : catalog) {
      (macro_category(v.category) == m ? f.eval_variants : f.train_variants).push_back(v);
    }
    folds.push_back(std::move(f));
  }
  return folds;
}

const FoldSpec& fold_for(const std::vector<FoldSpec>& folds, const VariantId& v) {
  for (const FoldSpec& f : folds) {
    if (f.held_out == macro_category(v.category)) return f;
  }
  fail(ErrorKind::InvalidArgument, "fold_for: no fold holds out " + format_variant_id(v));
}

}  // namespace imitlab
