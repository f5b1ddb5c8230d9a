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

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "imitlab/imitlab.h"

namespace {

struct Failure {
  imit_status status;
  std::string context;
};

void check(imit_status s, const std::string& context) {
  if (s != IMIT_OK) throw Failure{s, context};
}

// 0 quiet, 1 normal, 2 verbose. IMITLAB_VERBOSITY overrides the default.
int verbosity() {
  static const int v = [] {
    const char* e = std::getenv("IMITLAB_VERBOSITY");
    return e == nullptr ? 1 : std::atoi(e);
  }();
  return v;
}

void echo_invocation(const std::string& line) {
  if (verbosity() >= 1) std::cerr << "# " << line << "\n";
}

std::string quote(const std::string& s) {
  if (!s.empty() && s.find_first_of(" \t\"'") == std::string::npos) return s;
  return "\"" + s + "\"";
}

struct Strings {
  imit_strings* s = nullptr;
  ~Strings() { imit_strings_free(s); }
};

struct Policy {
  imit_policy* p = nullptr;
  ~Policy() { imit_policy_free(p); }
};

struct Dataset {
  imit_dataset* d = nullptr;
  ~Dataset() { imit_dataset_free(d); }
};

struct Results {
  imit_results* r = nullptr;
  ~Results() { imit_results_free(r); }
};

std::string policy_hash(const imit_policy* p) {
  char buf[17];
  check(imit_policy_hash(p, buf), "hash");
  return buf;
}

struct PretrainArgs {
  std::string env;
  std::string variant;
  int steps = 30000;
  int warmup = 1000;
  std::uint64_t seed = 0;
  std::string out;
  std::string warm_start;
};

int run_pretrain(const PretrainArgs& a) {
  std::ostringstream inv;
  inv << "imitlab pretrain --env " << a.env << (a.variant.empty() ? "" : " --variant " + a.variant) << " --steps "
      << a.steps << " --warmup " << a.warmup << " --seed " << a.seed << " --out " << quote(a.out)
      << (a.warm_start.empty() ? "" : " --warm-start " + quote(a.warm_start));
  echo_invocation(inv.str());
  imit_sac_options opts;
  imit_sac_options_default(&opts);
  opts.total_steps = a.steps;
  opts.warmup_steps = a.warmup;
  Policy warm;
  if (!a.warm_start.empty()) check(imit_policy_load(a.warm_start.c_str(), &warm.p), "load " + a.warm_start);
  imit_episode_cb cb = nullptr;
  if (verbosity() >= 2) {
    cb = [](int ep, double ret, int steps, void*) {
      std::fprintf(stderr, "episode %d  steps %d  return %.3f\n", ep, steps, ret);
    };
  } else if (verbosity() == 1) {
    cb = [](int ep, double ret, int steps, void*) {
      if (ep % 25 == 0) std::fprintf(stderr, "episode %d  steps %d  return %.3f\n", ep, steps, ret);
    };
  }
  Policy out;
  check(imit_pretrain(a.env.c_str(), a.variant.empty() ? nullptr : a.variant.c_str(), &opts, a.seed, warm.p, cb,
                      nullptr, &out.p),
        "pretrain");
  check(imit_policy_save(out.p, a.out.c_str()), "save " + a.out);
  std::cout << "checkpoint " << a.out << " hash " << policy_hash(out.p) << "\n";
  return 0;
}

struct RolloutArgs {
  std::string checkpoint;
  std::string variant;
  int n_traj = 100;
  int horizon = 0;
  std::string mode = "stochastic";
  std::uint64_t seed = 0;
  std::string out;
};

int run_rollout(const RolloutArgs& a) {
  std::ostringstream inv;
  inv << "imitlab rollout --checkpoint " << quote(a.checkpoint)
      << (a.variant.empty() ? "" : " --variant " + a.variant) << " --n-traj " << a.n_traj << " --horizon "
      << a.horizon << " --mode " << a.mode << " --seed " << a.seed << " --out " << quote(a.out);
  echo_invocation(inv.str());
  Policy p;
  check(imit_policy_load(a.checkpoint.c_str(), &p.p), "load " + a.checkpoint);
  Dataset d;
  const std::string label = std::filesystem::path(a.checkpoint).filename().string();
  check(imit_rollout(p.p, a.variant.empty() ? nullptr : a.variant.c_str(), a.n_traj, a.horizon, a.mode.c_str(),
                     a.seed, label.c_str(), &d.d),
        "rollout");
  check(imit_dataset_save(d.d, a.out.c_str()), "save " + a.out);
  size_t n = 0;
  check(imit_dataset_info(d.d, &n, nullptr, nullptr), "info");
  std::cout << "dataset " << a.out << " trajectories " << n << "\n";
  return 0;
}

struct AdaptArgs {
  std::string method;
  std::string base;
  std::string dataset;
  int shots = 10;
  std::uint64_t seed = 0;
  std::string out;
};

int run_adapt(const AdaptArgs& a) {
  std::ostringstream inv;
  inv << "imitlab adapt --method " << a.method << " --base " << quote(a.base) << " --dataset " << quote(a.dataset)
      << " --shots " << a.shots << " --seed " << a.seed << " --out " << quote(a.out);
  echo_invocation(inv.str());
  Policy base;
  check(imit_policy_load(a.base.c_str(), &base.p), "load " + a.base);
  Dataset d;
  check(imit_dataset_load(a.dataset.c_str(), &d.d), "load " + a.dataset);
  Policy out;
  imit_adapt_report rep{};
  check(imit_adapt(a.method.c_str(), base.p, d.d, a.shots, a.seed, &out.p, &rep), "adapt");
  check(imit_policy_save(out.p, a.out.c_str()), "save " + a.out);
  if (rep.provenance_mismatch) std::cerr << "warning: base checkpoint provenance does not match " << a.method << "\n";
  std::printf("support_trajectories %d\nquery_trajectories %d\nquery_loss_base %.17g\nquery_loss_adapted %.17g\n",
              rep.support_trajectories, rep.query_trajectories, rep.query_loss_before, rep.query_loss_after);
  std::cout << "base_hash " << policy_hash(base.p) << "\nadapted_hash " << policy_hash(out.p) << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string spec;
  std::string artifacts;
  std::string out;
  int jobs = 1;
};

int run_evaluate(const EvaluateArgs& a) {
  std::ostringstream inv;
  inv << "imitlab evaluate --spec " << quote(a.spec) << " --artifacts " << quote(a.artifacts) << " --out "
      << quote(a.out) << " --jobs " << a.jobs;
  echo_invocation(inv.str());
  imit_cell_cb cb = nullptr;
  if (verbosity() >= 1) {
    cb = [](const imit_record* r, size_t done, size_t total, void*) {
      if (verbosity() >= 2 || done == total || done % 50 == 0) {
        std::fprintf(stderr, "[%zu/%zu] %s %s shot %d seed %llu loss %.6g\n", done, total, r->variant, r->method,
                     r->shot, static_cast<unsigned long long>(r->seed), r->query_loss);
      }
    };
  }
  Results res;
  check(imit_evaluate(a.spec.c_str(), a.artifacts.c_str(), a.jobs, cb, nullptr, &res.r), "evaluate");
  std::error_code ec;
  std::filesystem::create_directories(a.out, ec);
  const std::string csv = (std::filesystem::path(a.out) / "results.csv").string();
  check(imit_results_write_csv(res.r, csv.c_str()), "write " + csv);
  std::cout << "results " << csv << " rows " << imit_results_count(res.r) << "\n";
  return 0;
}

int run_report(const std::string& results, const std::string& out) {
  echo_invocation("imitlab report --results " + quote(results) + " --out " + quote(out));
  Results res;
  check(imit_results_read_csv(results.c_str(), &res.r), "read " + results);
  Strings written;
  check(imit_report(res.r, out.c_str(), &written.s), "report");
  for (size_t i = 0; i < imit_strings_count(written.s); ++i) std::cout << imit_strings_get(written.s, i) << "\n";
  return 0;
}

int run_catalog(const std::string& env) {
  Strings ids;
  check(imit_catalog(env.c_str(), &ids.s), "catalog");
  for (size_t i = 0; i < imit_strings_count(ids.s); ++i) std::cout << imit_strings_get(ids.s, i) << "\n";
  return 0;
}

int run_validate(const std::string& path) {
  Strings summary;
  check(imit_dataset_validate(path.c_str(), &summary.s), "validate " + path);
  for (size_t i = 0; i < imit_strings_count(summary.s); ++i) std::cout << imit_strings_get(summary.s, i) << "\n";
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imitlab: few-shot imitation laboratory"};
  app.set_version_flag("--version", std::string(imit_version()));
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.footer("Environment: IMITLAB_VERBOSITY=0|1|2 sets output verbosity (default 1).");

  PretrainArgs pa;
  auto* pretrain = app.add_subcommand("pretrain", "Train a SAC policy and write a checkpoint");
  pretrain->add_option("--env", pa.env, "Environment: pendulum, cartpole, reacher2")->required();
  pretrain->add_option("--variant", pa.variant, "Variant id; empty trains on the base environment");
  pretrain->add_option("--steps", pa.steps, "Environment steps")->check(CLI::PositiveNumber);
  pretrain->add_option("--warmup", pa.warmup, "Uniform-action warmup steps")->check(CLI::NonNegativeNumber);
  pretrain->add_option("--seed", pa.seed, "Seed");
  pretrain->add_option("--out", pa.out, "Checkpoint path")->required();
  pretrain->add_option("--warm-start", pa.warm_start, "Checkpoint to start from (policy and critics)");

  RolloutArgs ra;
  auto* roll = app.add_subcommand("rollout", "Roll a checkpoint out into a trajectory dataset");
  roll->add_option("--checkpoint", ra.checkpoint, "Policy checkpoint")->required();
  roll->add_option("--variant", ra.variant, "Variant id; defaults to the checkpoint's variant");
  roll->add_option("--n-traj", ra.n_traj, "Number of trajectories")->check(CLI::NonNegativeNumber);
  roll->add_option("--horizon", ra.horizon, "Steps per trajectory; 0 uses the environment default")
      ->check(CLI::NonNegativeNumber);
  roll->add_option("--mode", ra.mode, "Action mode")->check(CLI::IsMember({"deterministic", "stochastic"}));
  roll->add_option("--seed", ra.seed, "Seed");
  roll->add_option("--out", ra.out, "Dataset directory")->required();

  AdaptArgs aa;
  auto* adapt = app.add_subcommand("adapt", "Adapt a base checkpoint on a dataset's support set");
  adapt->add_option("--method", aa.method, "Method")
      ->required()
      ->check(CLI::IsMember({"finetune", "headfinetune", "scratch", "meta", "multitask"}));
  adapt->add_option("--base", aa.base, "Base checkpoint")->required();
  adapt->add_option("--dataset", aa.dataset, "Dataset directory")->required();
  adapt->add_option("--shots", aa.shots, "Support trajectories")->check(CLI::NonNegativeNumber);
  adapt->add_option("--seed", aa.seed, "Seed");
  adapt->add_option("--out", aa.out, "Adapted checkpoint path")->required();

  EvaluateArgs ea;
  auto* evaluate = app.add_subcommand("evaluate", "Run a full experiment grid");
  evaluate->add_option("--spec", ea.spec, "Run spec (JSON)")->required();
  evaluate->add_option("--artifacts", ea.artifacts, "Artifact root")->required();
  evaluate->add_option("--out", ea.out, "Output directory for results.csv")->required();
  evaluate->add_option("--jobs", ea.jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string results_path, report_out;
  auto* report = app.add_subcommand("report", "Aggregate results.csv into tables, figure data and SVG plots");
  report->add_option("--results", results_path, "results.csv")->required();
  report->add_option("--out", report_out, "Output directory")->required();

  std::string catalog_env;
  auto* catalog = app.add_subcommand("catalog", "Print the variant ids of an environment");
  catalog->add_option("--env", catalog_env, "Environment")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate-dataset", "Check a dataset's format and invariants");
  validate->add_option("--path", validate_path, "Dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  try {
    if (*pretrain) return run_pretrain(pa);
    if (*roll) return run_rollout(ra);
    if (*adapt) return run_adapt(aa);
    if (*evaluate) return run_evaluate(ea);
    if (*report) return run_report(results_path, report_out);
    if (*catalog) return run_catalog(catalog_env);
    if (*validate) return run_validate(validate_path);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.context << ": " << imit_status_string(f.status) << ": " << imit_last_error() << "\n";
    return 1;
  }
  return 2;
}
