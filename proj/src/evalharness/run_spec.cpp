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

#include "evalharness/run_spec.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>

#include "common/error.hpp"
#include "common/file_io.hpp"

namespace imitlab {

using nlohmann::json;

namespace {

void check_keys(const json& j, const char* what, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(ErrorKind::Parse, std::string("run spec: ") + what + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) fail(ErrorKind::Parse, std::string("run spec: unknown key \"") + k + "\" in " + what);
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("run spec: bad value for \"") + key + "\": " + e.what());
  }
}

}  // namespace

void validate_run_spec(const RunSpec& s) {
  if (s.shots.empty()) fail(ErrorKind::InvalidArgument, "run spec: shots must not be empty");
  for (std::size_t i = 0; i < s.shots.size(); ++i) {
    if (s.shots[i] < 0) fail(ErrorKind::InvalidArgument, "run spec: shots must be >= 0");
    if (i > 0 && s.shots[i] <= s.shots[i - 1]) {
      fail(ErrorKind::InvalidArgument, "run spec: shots must be strictly ascending");
    }
  }
  if (s.seeds.empty()) fail(ErrorKind::InvalidArgument, "run spec: seeds must not be empty");
  if (std::set<std::uint64_t>(s.seeds.begin(), s.seeds.end()).size() != s.seeds.size()) {
    fail(ErrorKind::InvalidArgument, "run spec: seeds must be distinct");
  }
  if (std::set<AdapterKind>(s.methods.begin(), s.methods.end()).size() != s.methods.size()) {
    fail(ErrorKind::InvalidArgument, "run spec: methods must be distinct");
  }
  const EnvConfig base = default_config(s.env);
  std::set<std::string> seen;
  for (const VariantId& v : s.variants) {
    apply_variant(base, v);
    if (!seen.insert(format_variant_id(v)).second) {
      fail(ErrorKind::InvalidArgument, "run spec: duplicate variant " + format_variant_id(v));
    }
  }
  if (s.reward_episodes < 1) fail(ErrorKind::InvalidArgument, "run spec: reward_episodes must be >= 1");
  if (s.finetune.epochs < 0 || !(s.finetune.lr > 0.0) || s.finetune.batch_size < 1 ||
      s.finetune.weight_decay < 0.0) {
    fail(ErrorKind::InvalidArgument, "run spec: invalid finetune settings");
  }
  if (s.maml.inner_steps != 1 || s.maml.meta_batch < 1 || s.maml.meta_iterations < 0 ||
      !(s.maml.meta_lr > 0.0) || s.maml.inner_lr < 0.0) {
    fail(ErrorKind::InvalidArgument, "run spec: invalid maml settings");
  }
  if (s.multitask.epochs < 0 || !(s.multitask.lr > 0.0) || s.multitask.batch_size < 1 ||
      s.multitask.weight_decay < 0.0) {
    fail(ErrorKind::InvalidArgument, "run spec: invalid multitask settings");
  }
  if (s.meta_task_pairs < 1 || s.multitask_pairs_per_variant < 1) {
    fail(ErrorKind::InvalidArgument, "run spec: pair caps must be >= 1");
  }
}

std::vector<VariantId> spec_variants(const RunSpec& s) {
  return s.variants.empty() ? variant_catalog(s.env) : s.variants;
}

RunSpec run_spec_from_json(const json& j) {
  check_keys(j, "run spec",
             {"env", "methods", "shots", "seeds", "variants", "folds", "reward_episodes", "finetune", "maml",
              "multitask"});
  RunSpec s;
  if (!j.contains("env") || !j.at("env").is_string()) fail(ErrorKind::Parse, "run spec: \"env\" is required");
  s.env = parse_env_name(j.at("env").get<std::string>());
  if (!j.contains("methods") || !j.at("methods").is_array()) {
    fail(ErrorKind::Parse, "run spec: \"methods\" must be an array");
  }
  for (const json& m : j.at("methods")) {
    if (!m.is_string()) fail(ErrorKind::Parse, "run spec: methods must be strings");
    s.methods.push_back(parse_adapter_kind(m.get<std::string>()));
  }
  read_opt(j, "shots", s.shots);
  read_opt(j, "seeds", s.seeds);
  if (j.contains("variants")) {
    std::vector<std::string> ids;
    read_opt(j, "variants", ids);
    for (const std::string& id : ids) s.variants.push_back(parse_variant_id(id));
  }
  if (j.contains("folds")) {
    if (j.at("folds") != "macro-category") {
      fail(ErrorKind::Parse, "run spec: only the \"macro-category\" fold policy is supported");
    }
  }
  read_opt(j, "reward_episodes", s.reward_episodes);
  if (j.contains("finetune")) {
    const json& f = j.at("finetune");
    check_keys(f, "finetune", {"epochs", "lr", "weight_decay", "batch_size"});
    read_opt(f, "epochs", s.finetune.epochs);
    read_opt(f, "lr", s.finetune.lr);
    read_opt(f, "weight_decay", s.finetune.weight_decay);
    read_opt(f, "batch_size", s.finetune.batch_size);
  }
  if (j.contains("maml")) {
    const json& m = j.at("maml");
    check_keys(m, "maml", {"inner_lr", "meta_lr", "meta_batch", "meta_iterations", "task_pairs"});
    read_opt(m, "inner_lr", s.maml.inner_lr);
    read_opt(m, "meta_lr", s.maml.meta_lr);
    read_opt(m, "meta_batch", s.maml.meta_batch);
    read_opt(m, "meta_iterations", s.maml.meta_iterations);
    read_opt(m, "task_pairs", s.meta_task_pairs);
  }
  if (j.contains("multitask")) {
    const json& m = j.at("multitask");
    check_keys(m, "multitask", {"epochs", "lr", "weight_decay", "batch_size", "pairs_per_variant"});
    read_opt(m, "epochs", s.multitask.epochs);
    read_opt(m, "lr", s.multitask.lr);
    read_opt(m, "weight_decay", s.multitask.weight_decay);
    read_opt(m, "batch_size", s.multitask.batch_size);
    read_opt(m, "pairs_per_variant", s.multitask_pairs_per_variant);
  }
  validate_run_spec(s);
  return s;
}

json run_spec_to_json(const RunSpec& s) {
  json j;
  j["env"] = std::string(env_name_token(s.env));
  j["methods"] = json::array();
  for (AdapterKind k : s.methods) j["methods"].push_back(std::string(adapter_token(k)));
  j["shots"] = s.shots;
  j["seeds"] = s.seeds;
  if (!s.variants.empty()) {
    j["variants"] = json::array();
    for (const VariantId& v : s.variants) j["variants"].push_back(format_variant_id(v));
  }
  j["folds"] = "macro-category";
  j["reward_episodes"] = s.reward_episodes;
  j["finetune"] = {{"epochs", s.finetune.epochs},
                   {"lr", s.finetune.lr},
                   {"weight_decay", s.finetune.weight_decay},
                   {"batch_size", s.finetune.batch_size}};
  j["maml"] = {{"inner_lr", s.maml.inner_lr},
               {"meta_lr", s.maml.meta_lr},
               {"meta_batch", s.maml.meta_batch},
               {"meta_iterations", s.maml.meta_iterations},
               {"task_pairs", s.meta_task_pairs}};
  j["multitask"] = {{"epochs", s.multitask.epochs},
                    {"lr", s.multitask.lr},
                    {"weight_decay", s.multitask.weight_decay},
                    {"batch_size", s.multitask.batch_size},
                    {"pairs_per_variant", s.multitask_pairs_per_variant}};
  return j;
}

RunSpec load_run_spec(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, "run spec " + path.string() + ": " + e.what());
  }
  return run_spec_from_json(j);
}

}  // namespace imitlab
