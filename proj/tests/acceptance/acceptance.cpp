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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Heavy artifacts (SAC policies, target
// datasets) are built through the CLI on first use and cached under
// --artifacts.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "adapters/adapters.hpp"
#include "common/error.hpp"
#include "common/file_io.hpp"
#include "common/rng.hpp"
#include "envsim/dynamics.hpp"
#include "envsim/env_config.hpp"
#include "evalharness/harness.hpp"
#include "evalharness/report.hpp"
#include "gradcheck.hpp"
#include "sacagent/gaussian_policy.hpp"
#include "sacagent/policy_file.hpp"
#include "sacagent/sac.hpp"
#include "trajstore/dataset_io.hpp"
#include "trajstore/trajectory.hpp"

namespace fs = std::filesystem;
using namespace imitlab;
using imitlab::testing::flatten;
using imitlab::testing::numeric_grad;
using imitlab::testing::rel_err;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path artifacts;
  std::string cli;
  int target_steps = 3000;
  int sac_steps = 30000;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void log(const std::string& msg) {
  std::fprintf(stderr, "[acceptance] %s\n", msg.c_str());
  std::fflush(stderr);
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

void run_cli(const Context& ctx, const std::string& args, const fs::path& log_file) {
  fs::create_directories(log_file.parent_path());
  const std::string cmd = quote(ctx.cli) + " " + args + " > " + quote(log_file.string()) + " 2>&1";
  log(args);
  const int rc = std::system(cmd.c_str());
  if (rc != 0) {
    std::string tail;
    try {
      tail = read_file(log_file);
    } catch (const Error&) {
    }
    if (tail.size() > 2000) tail = tail.substr(tail.size() - 2000);
    fail(ErrorKind::Training, "command failed (" + std::to_string(rc) + "): " + args + "\n" + tail);
  }
}

// ---------------------------------------------------------------------------
// Artifacts

fs::path sac_policy(const Context& ctx, int seed) {
  return ctx.artifacts / "sac" / ("pendulum_seed" + std::to_string(seed) + ".pol");
}

void ensure_sac(const Context& ctx, int seed) {
  const fs::path p = sac_policy(ctx, seed);
  if (fs::exists(p)) return;
  run_cli(ctx,
          "pretrain --env pendulum --seed " + std::to_string(seed) + " --steps " + std::to_string(ctx.sac_steps) +
              " --warmup 1000 --out " + quote(p.string()),
          ctx.artifacts / "sac" / ("seed" + std::to_string(seed) + ".log"));
}

// <artifacts>/main: SAC seed-0 base, warm-started targets, 100 stochastic
// trajectories per pendulum variant.
fs::path ensure_main(const Context& ctx) {
  const fs::path root = ctx.artifacts / "main";
  ensure_sac(ctx, 0);
  const fs::path base = base_policy_path(root, EnvName::Pendulum);
  if (!fs::exists(base)) {
    fs::create_directories(base.parent_path());
    fs::copy_file(sac_policy(ctx, 0), base, fs::copy_options::overwrite_existing);
  }
  const auto catalog = variant_catalog(EnvName::Pendulum);
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const VariantId& v = catalog[i];
    const std::string id = format_variant_id(v);
    const fs::path dir = variant_dir(root, EnvName::Pendulum, v);
    const fs::path target = target_policy_path(root, EnvName::Pendulum, v);
    if (!fs::exists(target)) {
      run_cli(ctx,
              "pretrain --env pendulum --variant " + id + " --steps " + std::to_string(ctx.target_steps) +
                  " --warmup 256 --seed " + std::to_string(100 + i) + " --warm-start " + quote(base.string()) +
                  " --out " + quote(target.string()),
              dir / "target.log");
    }
    if (!fs::exists(dir / kManifestName)) {
      run_cli(ctx,
              "rollout --checkpoint " + quote(target.string()) + " --n-traj 100 --mode stochastic --seed " +
                  std::to_string(200 + i) + " --out " + quote(dir.string()),
              dir / "rollout.log");
    }
  }
  return root;
}

// <artifacts>/zeroshot/<env>: short SAC base, datasets of the base itself on
// each variant. Only used for the zero-shot identity.
fs::path ensure_zeroshot(const Context& ctx, EnvName env) {
  const fs::path root = ctx.artifacts / "zeroshot";
  const std::string e(env_name_token(env));
  const fs::path base = base_policy_path(root, env);
  if (!fs::exists(base)) {
    run_cli(ctx, "pretrain --env " + e + " --steps 1500 --warmup 500 --seed 7 --out " + quote(base.string()),
            root / e / "base.log");
  }
  const auto catalog = variant_catalog(env);
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const fs::path dir = variant_dir(root, env, catalog[i]);
    if (fs::exists(dir / kManifestName)) continue;
    run_cli(ctx,
            "rollout --checkpoint " + quote(base.string()) + " --variant " + format_variant_id(catalog[i]) +
                " --n-traj 20 --mode stochastic --seed " + std::to_string(300 + i) + " --out " +
                quote(dir.string()),
            dir / "rollout.log");
  }
  return root;
}

std::vector<ResultRecord> evaluate(const Context& ctx, const std::string& name, const std::string& spec_json,
                                   const fs::path& art, int jobs) {
  const fs::path dir = ctx.artifacts / "runs" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_file(dir / "spec.json", spec_json);
  run_cli(ctx,
          "evaluate --spec " + quote((dir / "spec.json").string()) + " --artifacts " + quote(art.string()) +
              " --out " + quote(dir.string()) + " --jobs " + std::to_string(jobs),
          dir / "evaluate.log");
  return read_results_csv(dir / "results.csv");
}

// ---------------------------------------------------------------------------
// Criteria

Outcome variant_arithmetic() {
  EnvConfig cfg = default_config(EnvName::Reacher2);
  cfg.parts["link1"].mass = 2.5;
  cfg.parts["link1"].length = 1.5;
  cfg.parts["joint1"].joint_range = 180.0;
  cfg.parts["joint1"].friction = 1.9;
  const double errs[] = {
      std::abs(*apply_variant(cfg, parse_variant_id("massinc-200-link1")).parts["link1"].mass - 7.5),
      std::abs(*apply_variant(cfg, parse_variant_id("jointdec-50-joint1")).parts["joint1"].joint_range - 90.0),
      std::abs(*apply_variant(cfg, parse_variant_id("lengthinc-150-link1")).parts["link1"].length - 3.75),
      std::abs(*apply_variant(cfg, parse_variant_id("frictiondec-50-joint1")).parts["joint1"].friction - 0.95)};
  const double worst = *std::max_element(std::begin(errs), std::end(errs));
  return {worst <= 1e-12, "max abs error " + fmt("%.3g", worst)};
}

Outcome id_grammar() {
  const std::string text = read_file(fs::path(IMITLAB_FIXTURES) / "appendix_a_variant_ids.txt");
  std::istringstream in(text);
  std::string line;
  int n = 0, bad = 0;
  std::string first_bad;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++n;
    std::string back;
    try {
      back = format_variant_id(parse_variant_id(line));
    } catch (const Error& e) {
      back = std::string("error: ") + e.what();
    }
    if (back != line) {
      if (bad++ == 0) first_bad = line + " -> " + back;
    }
  }
  return {n == 154 && bad == 0,
          std::to_string(n) + " ids, " + std::to_string(bad) + " mismatches" + (bad ? " (" + first_bad + ")" : "")};
}

Eigen::MatrixXd randn(Eigen::Index r, Eigen::Index c, Rng& rng, double s = 1.0) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = s * standard_normal(rng);
  return m;
}

// Non-zero biases keep instances off the ReLU kink at exactly 0.
void jitter_biases(Mlp& m, Rng& rng) {
  for (auto& l : m.layers) l.bias = randn(l.out_dim(), 1, rng, 0.2);
}

Outcome gradient_suite() {
  Rng rng(31);
  const int n = 20;
  double bc = 0, critic = 0, policy = 0, alpha = 0;
  for (int t = 0; t < n; ++t) {
    const int obs = 2 + t % 3, act = 1 + t % 2, hid = 4 + t % 5, batch = 3 + t % 4;
    {
      GaussianPolicy p = make_gaussian_policy(obs, act, hid, rng);
      jitter_biases(p.mean_net, rng);
      DemoSet d{randn(obs, batch, rng), randn(act, batch, rng, 0.5).array().tanh().matrix()};
      const BcLoss l = bc_loss(p.mean_net, d);
      bc = std::max(bc, rel_err(flatten(l.grads), numeric_grad(p.mean_net, [&] { return bc_loss_value(p.mean_net, d); })));
    }
    {
      TwinCritic c = make_twin_critic(obs, act, hid, rng);
      jitter_biases(c.q1, rng);
      jitter_biases(c.q2, rng);
      const Eigen::MatrixXd o = randn(obs, batch, rng), a = randn(act, batch, rng, 0.5);
      const Eigen::VectorXd y = randn(batch, 1, rng);
      const CriticLoss cl = critic_loss(c, o, a, y);
      auto f = [&] { return critic_loss(c, o, a, y).loss; };
      critic = std::max({critic, rel_err(flatten(cl.q1), numeric_grad(c.q1, f)),
                         rel_err(flatten(cl.q2), numeric_grad(c.q2, f))});
    }
    {
      GaussianPolicy p = make_gaussian_policy(obs, act, hid, rng);
      jitter_biases(p.mean_net, rng);
      jitter_biases(p.log_std_head, rng);
      TwinCritic c = make_twin_critic(obs, act, hid, rng);
      jitter_biases(c.q1, rng);
      jitter_biases(c.q2, rng);
      const Eigen::MatrixXd o = randn(obs, batch, rng);
      const Eigen::MatrixXd noise = draw_noise(act, batch, rng);
      const double a = 0.1 + 0.1 * t;
      const PolicyLoss pl = policy_loss(p, c, o, a, noise);
      auto f = [&] { return policy_loss(p, c, o, a, noise).loss; };
      policy = std::max({policy, rel_err(flatten(pl.mean_net), numeric_grad(p.mean_net, f)),
                         rel_err(flatten(pl.log_std_head), numeric_grad(p.log_std_head, f))});
    }
    {
      const Eigen::VectorXd lp = randn(batch, 1, rng);
      const double la = standard_normal(rng), target = -static_cast<double>(act), h = 1e-6;
      const double num = (alpha_loss(la + h, lp, target) - alpha_loss(la - h, lp, target)) / (2 * h);
      Eigen::VectorXd an(1), nu(1);
      an << alpha_loss_grad(lp, target);
      nu << num;
      alpha = std::max(alpha, rel_err(an, nu));
    }
  }
  const bool ok = bc <= 1e-5 && critic <= 1e-5 && policy <= 1e-4 && alpha <= 1e-5;
  return {ok, std::to_string(n) + " instances each; worst rel err bc " + fmt("%.2g", bc) + ", critic " +
                  fmt("%.2g", critic) + ", policy " + fmt("%.2g", policy) + ", alpha " + fmt("%.2g", alpha)};
}

Outcome tanh_normalization() {
  Rng rng(41);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    Eigen::VectorXd mean(1), log_std(1), a(1);
    mean << uniform(rng, -1.0, 1.0);
    log_std << std::log(uniform(rng, 0.2, 1.0));
    const int n = 2000000;
    const double h = 2.0 / n;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      a[0] = -1.0 + (i + 0.5) * h;
      total += std::exp(squashed_log_prob(mean, log_std, a)) * h;
    }
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return {worst <= 1e-3, "10 draws, max |integral - 1| " + fmt("%.3g", worst)};
}

Outcome dataset_format() {
  const EnvConfig cfg = default_config(EnvName::Pendulum);
  Rng rng(51);
  const GaussianPolicy pol = make_gaussian_policy(observation_dim(cfg.env), action_dim(cfg.env), 32, rng);
  VariantDataset d;
  d.env = cfg.env;
  d.variant = variant_catalog(cfg.env).front();
  d.base_config = cfg;
  d.modified_config = apply_variant(cfg, d.variant);
  d.policy_checkpoint = "random";
  d.seed = 51;
  d.target_reward = -1.0 / 3.0;
  d.trajectories = rollout(d.modified_config, pol, 100, cfg.horizon, rng, RolloutMode::Stochastic);
  const fs::path dir = fs::temp_directory_path() / "imitlab_acceptance_dataset";
  fs::remove_all(dir);
  save_dataset(d, dir);
  const bool same = load_dataset(dir) == d;
  const std::string payload = read_file(dir / kPayloadName);
  const std::string manifest = read_file(dir / kManifestName);
  save_dataset(load_dataset(dir), dir);
  const bool same_bytes = read_file(dir / kPayloadName) == payload && read_file(dir / kManifestName) == manifest;

  int rejected = 0, tried = 0;
  auto expect_reject = [&](const std::string& pl, const std::string& mf) {
    ++tried;
    write_file(dir / kPayloadName, pl);
    write_file(dir / kManifestName, mf);
    try {
      validate_dataset(dir);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Format) ++rejected;
    }
  };
  for (std::size_t pos : {std::size_t{0}, std::size_t{30}, payload.size() / 2, payload.size() - 1}) {
    std::string bad = payload;
    bad[pos] = static_cast<char>(bad[pos] ^ 0x10);
    expect_reject(bad, manifest);
  }
  expect_reject(payload.substr(0, payload.size() - 100), manifest);
  expect_reject(payload + "x", manifest);
  expect_reject(payload, manifest.substr(0, manifest.size() / 2));
  fs::remove_all(dir);
  const bool ok = same && same_bytes && rejected == tried;
  return {ok, std::string("round trip ") + (same && same_bytes ? "bit-exact" : "MISMATCH") + ", " +
                  std::to_string(rejected) + "/" + std::to_string(tried) + " corruptions rejected"};
}

Outcome fomaml_sanity() {
  const int dim = 4;
  Rng family(61);
  Eigen::VectorXd w0 = randn(dim, 1, family, 0.8);
  const double b0 = 0.2;
  auto task = [&](Rng& r, int n) {
    const Eigen::VectorXd w = w0 + randn(dim, 1, r, 0.3);
    const double b = b0 + 0.1 * standard_normal(r);
    auto draw = [&](int m) {
      DemoSet d;
      d.obs = randn(dim, m, r);
      d.actions = ((w.transpose() * d.obs).array() + b).tanh().matrix();
      return d;
    };
    return MetaTask{draw(n), draw(50)};
  };
  Rng init_rng(62);
  const GaussianPolicy glorot = make_gaussian_policy(dim, 1, 32, init_rng);
  MamlConfig cfg;
  cfg.inner_lr = 0.05;
  cfg.meta_lr = 3e-3;
  cfg.meta_batch = 10;
  cfg.meta_iterations = 500;
  TaskSampler sampler = [&](Rng& r) -> std::optional<MetaTask> { return task(r, 10); };
  Rng train_rng(63);
  const GaussianPolicy meta = fomaml_train(glorot, sampler, cfg, train_rng);

  Rng held_out(64);
  int wins = 0;
  double lm = 0, lg = 0;
  for (int i = 0; i < 20; ++i) {
    const MetaTask t = task(held_out, 10);
    const double a = bc_loss_value(fomaml_inner(meta.mean_net, t.support, cfg.inner_lr), t.query);
    const double b = bc_loss_value(fomaml_inner(glorot.mean_net, t.support, cfg.inner_lr), t.query);
    wins += a < b;
    lm += a / 20;
    lg += b / 20;
  }
  return {wins >= 16, std::to_string(wins) + "/20 paired wins; mean adapted loss meta " + fmt("%.4g", lm) +
                          " vs glorot " + fmt("%.4g", lg)};
}

double random_baseline(const EnvConfig& cfg, int episodes) {
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    Rng rng(combine_seeds(0xbad5eedULL, static_cast<std::uint64_t>(e)));
    auto [state, obs] = reset(cfg, rng);
    for (int t = 0; t < cfg.horizon; ++t) {
      Eigen::VectorXd a(action_dim(cfg.env));
      for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = uniform(rng, -1.0, 1.0);
      StepResult sr = step(cfg, state, a);
      total += sr.reward;
      state = std::move(sr.state);
      if (sr.done) break;
    }
  }
  return total / episodes;
}

Outcome sac_learning(const Context& ctx) {
  const EnvConfig cfg = default_config(EnvName::Pendulum);
  const double random = random_baseline(cfg, 10);
  // Returns are costs here (<= 0): "3x better" means a third of the cost.
  const double threshold = random < 0.0 ? random / 3.0 : 3.0 * random;
  std::string detail = "random " + fmt("%.1f", random) + ", threshold " + fmt("%.1f", threshold) + "; seeds";
  bool ok = true;
  for (int seed = 0; seed < 3; ++seed) {
    ensure_sac(ctx, seed);
    const PolicyFile f = load_policy_file(sac_policy(ctx, seed));
    const double r = reward_eval(cfg, f.policy, 10, combine_seeds(0x5ac0ULL, static_cast<std::uint64_t>(seed)));
    ok = ok && r >= threshold;
    detail += " " + fmt("%.1f", r);
  }
  return {ok, detail};
}

std::string main_spec_json() {
  return R"({
  "env": "pendulum",
  "methods": ["finetune", "headfinetune", "scratch"],
  "shots": [0, 1, 10, 25, 50],
  "seeds": [0, 1, 2],
  "folds": "macro-category",
  "reward_episodes": 10
}
)";
}

struct MainRun {
  std::vector<ResultRecord> records;
  // (method, shot, variant) -> mean over seeds
  std::map<std::tuple<std::string, int, std::string>, double> loss;
};

MainRun& main_run(const Context& ctx) {
  static MainRun run;
  static bool done = false;
  if (!done) {
    const fs::path art = ensure_main(ctx);
    run.records = evaluate(ctx, "main", main_spec_json(), art, 1);
    std::map<std::tuple<std::string, int, std::string>, int> n;
    for (const ResultRecord& r : run.records) {
      run.loss[{r.method, r.shot, r.variant}] += r.query_loss;
      n[{r.method, r.shot, r.variant}] += 1;
    }
    for (auto& [k, v] : run.loss) v /= n[k];
    const fs::path report = ctx.artifacts / "runs" / "main" / "report";
    write_report(aggregate(run.records), report);
    done = true;
  }
  return run;
}

Outcome zero_shot_identity(const Context& ctx) {
  std::size_t compared = 0, equal = 0;
  auto compare = [&](const std::vector<ResultRecord>& recs) {
    std::map<std::tuple<std::string, std::string, std::uint64_t>, std::string> ft;
    char buf[64];
    for (const ResultRecord& r : recs) {
      if (r.shot != 0 || r.method != "finetune") continue;
      std::snprintf(buf, sizeof buf, "%.17g", r.query_loss);
      ft[{r.env, r.variant, r.seed}] = buf;
    }
    for (const ResultRecord& r : recs) {
      if (r.shot != 0 || r.method != "headfinetune") continue;
      std::snprintf(buf, sizeof buf, "%.17g", r.query_loss);
      ++compared;
      const auto it = ft.find({r.env, r.variant, r.seed});
      equal += it != ft.end() && it->second == buf;
    }
  };
  compare(main_run(ctx).records);
  for (EnvName env : {EnvName::Cartpole, EnvName::Reacher2}) {
    const fs::path art = ensure_zeroshot(ctx, env);
    const std::string spec = std::string(R"({"env": ")") + std::string(env_name_token(env)) +
                             R"(", "methods": ["finetune", "headfinetune"], "shots": [0], "seeds": [0, 1, 2],)" +
                             R"( "reward_episodes": 1})";
    compare(evaluate(ctx, "zeroshot_" + std::string(env_name_token(env)), spec, art, 1));
  }
  const std::size_t expected = 3 * (16 + 25 + 32);
  return {compared == expected && equal == compared,
          std::to_string(equal) + "/" + std::to_string(compared) + " zero-shot cells identical across 3 envs"};
}

Outcome shot_monotonicity(const Context& ctx) {
  const MainRun& run = main_run(ctx);
  std::vector<double> means;
  std::string detail = "finetune mean loss";
  for (int shot : {1, 10, 25, 50}) {
    double s = 0;
    int n = 0;
    for (const auto& [k, v] : run.loss) {
      if (std::get<0>(k) == "finetune" && std::get<1>(k) == shot) {
        s += v;
        ++n;
      }
    }
    means.push_back(s / n);
    detail += " " + std::to_string(shot) + ":" + fmt("%.4g", s / n);
  }
  bool ok = true;
  for (std::size_t i = 1; i < means.size(); ++i) ok = ok && means[i] < means[i - 1];
  return {ok, detail};
}

Outcome pairwise_at_50(const Context& ctx, const std::string& method, bool finetune_should_win) {
  const MainRun& run = main_run(ctx);
  int wins = 0, total = 0;
  for (const VariantId& v : variant_catalog(EnvName::Pendulum)) {
    const std::string id = format_variant_id(v);
    const double ft = run.loss.at({"finetune", 50, id});
    const double other = run.loss.at({method, 50, id});
    ++total;
    wins += finetune_should_win ? ft <= other : other > ft;
  }
  const double frac = static_cast<double>(wins) / total;
  return {frac >= 0.7, std::to_string(wins) + "/" + std::to_string(total) + " variants (" +
                           fmt("%.0f", 100 * frac) + "%)"};
}

Outcome determinism(const Context& ctx) {
  const fs::path art = ensure_main(ctx);
  const std::string spec = R"({
  "env": "pendulum",
  "methods": ["finetune", "headfinetune", "scratch", "meta", "multitask"],
  "shots": [0, 1, 10],
  "seeds": [0, 1],
  "variants": ["massinc-200-rod", "frictioninc-50-pivot", "jointdec-50-pivot", "lengthdec-50-rod"],
  "reward_episodes": 2,
  "maml": {"meta_iterations": 40, "meta_batch": 10, "task_pairs": 128},
  "multitask": {"epochs": 10, "pairs_per_variant": 500}
}
)";
  evaluate(ctx, "determinism_jobs1", spec, art, 1);
  evaluate(ctx, "determinism_jobs3", spec, art, 3);
  const std::string a = read_file(ctx.artifacts / "runs" / "determinism_jobs1" / "results.csv");
  const std::string b = read_file(ctx.artifacts / "runs" / "determinism_jobs3" / "results.csv");
  const auto rows = std::count(a.begin(), a.end(), '\n') - 1;
  return {a == b && rows == 4 * 5 * 3 * 2,
          std::to_string(rows) + " rows, --jobs 1 vs --jobs 3 " + (a == b ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imitlab acceptance suite"};
  Context ctx;
  std::vector<int> only;
  app.add_option("--artifacts", ctx.artifacts, "Cache directory for trained artifacts")->required();
  app.add_option("--cli", ctx.cli, "Path to the imitlab CLI")->required();
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--target-steps", ctx.target_steps, "SAC steps for each warm-started target policy");
  CLI11_PARSE(app, argc, argv);
  ctx.artifacts = fs::absolute(ctx.artifacts);
  fs::create_directories(ctx.artifacts);

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "variant arithmetic", variant_arithmetic},
      {2, "variant id grammar", id_grammar},
      {3, "gradient suite", gradient_suite},
      {4, "tanh-gaussian normalization", tanh_normalization},
      {5, "zero-shot identity", [&] { return zero_shot_identity(ctx); }},
      {6, "shot monotonicity", [&] { return shot_monotonicity(ctx); }},
      {7, "pretraining benefit", [&] { return pairwise_at_50(ctx, "scratch", true); }},
      {8, "head degradation", [&] { return pairwise_at_50(ctx, "headfinetune", false); }},
      {9, "sac learning", [&] { return sac_learning(ctx); }},
      {10, "dataset format", dataset_format},
      {11, "determinism", [&] { return determinism(ctx); }},
      {12, "fomaml sanity", fomaml_sanity},
  };

  int failed = 0;
  std::vector<std::string> lines;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char head[128];
    std::snprintf(head, sizeof head, "%s  %2d  %-28s", o.pass ? "PASS" : "FAIL", c.id, c.name);
    const std::string line = std::string(head) + " " + o.detail + "  [" + fmt("%.1f", secs) + " s]";
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    lines.push_back(line);
    failed += !o.pass;
  }
  std::printf("\nsummary\n");
  for (const auto& l : lines) std::printf("%s\n", l.c_str());
  std::printf("%d of %zu criteria failed\n", failed, lines.size());
  return failed == 0 ? 0 : 1;
}
