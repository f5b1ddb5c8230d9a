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

#include "evalharness/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "common/error.hpp"
#include "common/file_io.hpp"
#include "envsim/variant.hpp"

namespace imitlab {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

auto record_key(const ResultRecord& r) { return std::tie(r.env, r.variant, r.method, r.shot, r.seed); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line_no, const char* field) {
  T v{};
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) {
    fail(ErrorKind::Parse, "results.csv line " + std::to_string(line_no) + ": bad " + field + " \"" + s + "\"");
  }
  return v;
}

std::string variant_category(const std::string& variant) {
  return std::string(category_token(parse_variant_id(variant).category));
}

}  // namespace

void sort_records(std::vector<ResultRecord>& records) {
  std::sort(records.begin(), records.end(),
            [](const ResultRecord& a, const ResultRecord& b) { return record_key(a) < record_key(b); });
}

AggregateReport aggregate(std::vector<ResultRecord> records) {
  if (records.empty()) fail(ErrorKind::InvalidArgument, "aggregate: no records");
  sort_records(records);

  // Grid check: every (env, method) must cover its variants x all shots x all seeds.
  std::map<std::string, std::set<int>> env_shots;
  std::map<std::string, std::set<std::uint64_t>> env_seeds;
  std::map<std::pair<std::string, std::string>, std::set<std::string>> method_variants;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ResultRecord& r = records[i];
    if (i > 0 && record_key(records[i - 1]) == record_key(r)) {
      fail(ErrorKind::InvalidArgument, "aggregate: duplicate cell " + r.env + " " + r.variant + " " + r.method +
                                           " shot " + std::to_string(r.shot) + " seed " + std::to_string(r.seed));
    }
    if (!(r.query_loss >= 0.0) || !std::isfinite(r.query_loss) || !std::isfinite(r.reward_mean) ||
        !std::isfinite(r.reward_target)) {
      fail(ErrorKind::InvalidArgument, "aggregate: invalid values in cell " + r.env + " " + r.variant + " " + r.method);
    }
    env_shots[r.env].insert(r.shot);
    env_seeds[r.env].insert(r.seed);
    method_variants[{r.env, r.method}].insert(r.variant);
  }
  std::set<std::tuple<std::string, std::string, std::string, int, std::uint64_t>> present;
  for (const ResultRecord& r : records) present.insert({r.env, r.variant, r.method, r.shot, r.seed});
  std::vector<std::string> missing;
  for (const auto& [em, variants] : method_variants) {
    for (const std::string& v : variants) {
      for (int shot : env_shots[em.first]) {
        for (std::uint64_t seed : env_seeds[em.first]) {
          if (!present.count({em.first, v, em.second, shot, seed})) {
            missing.push_back(em.first + " " + v + " " + em.second + " shot " + std::to_string(shot) + " seed " +
                              std::to_string(seed));
          }
        }
      }
    }
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "aggregate: " << missing.size() << " missing cells:";
    for (std::size_t i = 0; i < missing.size() && i < 50; ++i) msg << "\n  " << missing[i];
    fail(ErrorKind::InvalidArgument, msg.str());
  }

  AggregateReport rep;
  struct Acc {
    std::size_t n = 0;
    double loss = 0.0, reward = 0.0, target = 0.0;
  };
  std::map<std::tuple<std::string, std::string, int>, Acc> by_shot;
  std::map<std::tuple<std::string, std::string, int, std::string>, Acc> by_cat;
  std::map<std::tuple<std::string, std::string, int, std::string>, Acc> by_variant;
  for (const ResultRecord& r : records) {
    for (Acc* a : {&by_shot[{r.env, r.method, r.shot}], &by_cat[{r.env, r.method, r.shot, variant_category(r.variant)}],
                   &by_variant[{r.env, r.method, r.shot, r.variant}]}) {
      a->n += 1;
      a->loss += r.query_loss;
      a->reward += r.reward_mean;
      a->target += r.reward_target;
    }
  }
  for (const auto& [k, a] : by_shot) {
    const double n = static_cast<double>(a.n);
    rep.rows.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), a.n, a.loss / n, a.reward / n, a.target / n});
  }
  for (const auto& [k, a] : by_cat) {
    rep.categories.push_back(
        {std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k), a.n, a.loss / static_cast<double>(a.n)});
  }
  for (const auto& [k, a] : by_variant) {
    const auto& [env, method, shot, variant] = k;
    if (method == "finetune") continue;
    const auto ft = by_variant.find({env, "finetune", shot, variant});
    if (ft == by_variant.end()) continue;
    rep.scatter.push_back({env, method, shot, variant, ft->second.loss / static_cast<double>(ft->second.n),
                           a.loss / static_cast<double>(a.n)});
  }
  return rep;
}

std::string format_results_csv(const std::vector<ResultRecord>& records) {
  std::string out = std::string(kResultsHeader) + "\n";
  for (const ResultRecord& r : records) {
    out += r.env + "," + r.variant + "," + r.method + "," + std::to_string(r.shot) + "," + std::to_string(r.seed) +
           "," + fmt17(r.query_loss) + "," + fmt17(r.reward_mean) + "," + fmt17(r.reward_target) + "\n";
  }
  return out;
}

std::vector<ResultRecord> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    fail(ErrorKind::Parse, std::string("results.csv: header must be ") + kResultsHeader);
  }
  std::vector<ResultRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 8) {
      fail(ErrorKind::Parse, "results.csv line " + std::to_string(line_no) + ": expected 8 fields");
    }
    ResultRecord r;
    r.env = f[0];
    r.variant = f[1];
    r.method = f[2];
    r.shot = parse_number<int>(f[3], line_no, "shot");
    r.seed = parse_number<std::uint64_t>(f[4], line_no, "seed");
    r.query_loss = parse_number<double>(f[5], line_no, "query_loss");
    r.reward_mean = parse_number<double>(f[6], line_no, "reward_mean");
    r.reward_target = parse_number<double>(f[7], line_no, "reward_target");
    parse_env_name(r.env);
    parse_variant_id(r.variant);
    parse_adapter_kind(r.method);
    out.push_back(std::move(r));
  }
  return out;
}

void write_results_csv(const std::vector<ResultRecord>& records, const fs::path& path) {
  write_file(path, format_results_csv(records));
}

std::vector<ResultRecord> read_results_csv(const fs::path& path) { return parse_results_csv(read_file(path)); }

namespace {

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#8c564b", "#9467bd", "#ff7f0e", "#17becf"};

const char* method_color(const std::string& method) {
  const auto k = adapter_from_token(method);
  return kPalette[k ? static_cast<int>(*k) : 6];
}

double log_loss(double v) { return std::log10(std::max(v, 1e-12)); }

// Minimal fixed-size SVG canvas with a plotting rectangle and linear axes.
class Svg {
 public:
  static constexpr double kW = 640, kH = 420, kL = 70, kR = 150, kT = 40, kB = 50;

  Svg(std::string title, double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (x1_ <= x0_) x1_ = x0_ + 1.0;
    if (y1_ <= y0_) y1_ = y0_ + 1.0;
    body_ << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
    body_ << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\"" << kH - kT - kB
          << "\" fill=\"none\" stroke=\"#444\"/>\n";
  }

  double px(double x) const { return kL + (x - x0_) / (x1_ - x0_) * (kW - kL - kR); }
  double py(double y) const { return kH - kB - (y - y0_) / (y1_ - y0_) * (kH - kT - kB); }

  void xtick(double x, const std::string& label) {
    body_ << "<text x=\"" << px(x) << "\" y=\"" << kH - kB + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
          << label << "</text>\n";
  }
  void ytick(double y, const std::string& label) {
    body_ << "<text x=\"" << kL - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << label
          << "</text>\n";
    body_ << "<line x1=\"" << kL << "\" y1=\"" << py(y) << "\" x2=\"" << kW - kR << "\" y2=\"" << py(y)
          << "\" stroke=\"#ddd\"/>\n";
  }
  void axis_labels(const std::string& x, const std::string& y) {
    body_ << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
          << x << "</text>\n";
    body_ << "<text x=\"16\" y=\"" << (kT + kH - kB) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 "
          << (kT + kH - kB) / 2 << ")\" text-anchor=\"middle\">" << y << "</text>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const char* color) {
    body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) body_ << px(x) << "," << py(y) << " ";
    body_ << "\"/>\n";
    for (const auto& [x, y] : pts) dot(x, y, color);
  }
  void dot(double x, double y, const char* color) {
    body_ << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
  }
  void bar(double x, double width, double y, const char* color) {
    const double top = py(y), base = py(y0_);
    body_ << "<rect x=\"" << px(x) << "\" y=\"" << std::min(top, base) << "\" width=\"" << px(x + width) - px(x)
          << "\" height=\"" << std::abs(base - top) << "\" fill=\"" << color << "\"/>\n";
  }
  void line(double xa, double ya, double xb, double yb) {
    body_ << "<line x1=\"" << px(xa) << "\" y1=\"" << py(ya) << "\" x2=\"" << px(xb) << "\" y2=\"" << py(yb)
          << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
  }
  void legend(const std::vector<std::string>& names) {
    double y = kT + 10;
    for (const auto& n : names) {
      body_ << "<rect x=\"" << kW - kR + 14 << "\" y=\"" << y - 9 << "\" width=\"10\" height=\"10\" fill=\""
            << method_color(n) << "\"/>\n";
      body_ << "<text x=\"" << kW - kR + 30 << "\" y=\"" << y << "\" font-size=\"12\">" << n << "</text>\n";
      y += 18;
    }
  }
  std::string str() const {
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 "
      << kW << " " << kH << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body_.str() << "</svg>\n";
    return o.str();
  }

 private:
  double x0_, x1_, y0_, y1_;
  std::ostringstream body_;
};

void log_ticks(Svg& svg, double lo, double hi) {
  for (int e = static_cast<int>(std::floor(lo)); e <= static_cast<int>(std::ceil(hi)); ++e) {
    if (e >= lo - 1e-9 && e <= hi + 1e-9) svg.ytick(e, "1e" + std::to_string(e));
  }
}

std::pair<double, double> padded_range(double lo, double hi) {
  if (!(hi > lo)) return {lo - 0.5, hi + 0.5};
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

std::vector<fs::path> write_report(const AggregateReport& report, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_file(out_dir / name, text);
    written.push_back(out_dir / name);
  };

  std::string agg = "env,method,shot,cells,query_loss_mean,reward_mean,reward_target_mean\n";
  std::string lvs = "env\tmethod\tshot\tcells\tquery_loss_mean\n";
  for (const AggregateRow& r : report.rows) {
    agg += r.env + "," + r.method + "," + std::to_string(r.shot) + "," + std::to_string(r.cells) + "," +
           fmt17(r.query_loss_mean) + "," + fmt17(r.reward_mean) + "," + fmt17(r.reward_target_mean) + "\n";
    lvs += r.env + "\t" + r.method + "\t" + std::to_string(r.shot) + "\t" + std::to_string(r.cells) + "\t" +
           fmt17(r.query_loss_mean) + "\n";
  }
  emit("aggregate.csv", agg);
  emit("loss_vs_shot.tsv", lvs);

  std::string sc = "env\tmethod\tshot\tvariant\tfinetune_loss\tother_loss\n";
  for (const ScatterPoint& p : report.scatter) {
    sc += p.env + "\t" + p.method + "\t" + std::to_string(p.shot) + "\t" + p.variant + "\t" + fmt17(p.finetune_loss) +
          "\t" + fmt17(p.other_loss) + "\n";
  }
  emit("scatter.tsv", sc);

  std::string cat = "env\tmethod\tshot\tcategory\tcells\tquery_loss_mean\n";
  for (const CategoryRow& c : report.categories) {
    cat += c.env + "\t" + c.method + "\t" + std::to_string(c.shot) + "\t" + c.category + "\t" +
           std::to_string(c.cells) + "\t" + fmt17(c.query_loss_mean) + "\n";
  }
  emit("category.tsv", cat);

  std::set<std::string> envs;
  for (const AggregateRow& r : report.rows) envs.insert(r.env);
  for (const std::string& env : envs) {
    // Loss vs shot, shots placed at even spacing.
    std::vector<int> shots;
    std::vector<std::string> methods;
    double lo = 1e300, hi = -1e300;
    for (const AggregateRow& r : report.rows) {
      if (r.env != env) continue;
      if (std::find(shots.begin(), shots.end(), r.shot) == shots.end()) shots.push_back(r.shot);
      if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
      lo = std::min(lo, log_loss(r.query_loss_mean));
      hi = std::max(hi, log_loss(r.query_loss_mean));
    }
    std::sort(shots.begin(), shots.end());
    auto [y0, y1] = padded_range(lo, hi);
    Svg svg(env + ": mean query loss per shot", -0.3, static_cast<double>(shots.size()) - 0.7, y0, y1);
    log_ticks(svg, y0, y1);
    for (std::size_t i = 0; i < shots.size(); ++i) svg.xtick(static_cast<double>(i), std::to_string(shots[i]));
    for (const std::string& m : methods) {
      std::vector<std::pair<double, double>> pts;
      for (const AggregateRow& r : report.rows) {
        if (r.env != env || r.method != m) continue;
        const auto pos = std::find(shots.begin(), shots.end(), r.shot) - shots.begin();
        pts.emplace_back(static_cast<double>(pos), log_loss(r.query_loss_mean));
      }
      svg.polyline(pts, method_color(m));
    }
    svg.axis_labels("shots", "query loss (log10)");
    svg.legend(methods);
    emit("loss_vs_shot_" + env + ".svg", svg.str());

    // FineTune vs other methods, log-log with the diagonal.
    std::vector<std::string> others;
    lo = 1e300;
    hi = -1e300;
    for (const ScatterPoint& p : report.scatter) {
      if (p.env != env) continue;
      if (std::find(others.begin(), others.end(), p.method) == others.end()) others.push_back(p.method);
      for (double v : {log_loss(p.finetune_loss), log_loss(p.other_loss)}) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (!others.empty()) {
      auto [s0, s1] = padded_range(lo, hi);
      Svg sp(env + ": finetune (x) vs other methods (y)", s0, s1, s0, s1);
      log_ticks(sp, s0, s1);
      for (int e = static_cast<int>(std::ceil(s0)); e <= static_cast<int>(std::floor(s1)); ++e) {
        sp.xtick(e, "1e" + std::to_string(e));
      }
      sp.line(s0, s0, s1, s1);
      for (const ScatterPoint& p : report.scatter) {
        if (p.env == env) sp.dot(log_loss(p.finetune_loss), log_loss(p.other_loss), method_color(p.method));
      }
      sp.axis_labels("finetune query loss (log10)", "other query loss (log10)");
      sp.legend(others);
      emit("scatter_" + env + ".svg", sp.str());
    }

    // Category bars per shot.
    for (int shot : shots) {
      std::vector<std::string> cats;
      lo = 1e300;
      hi = -1e300;
      for (const CategoryRow& c : report.categories) {
        if (c.env != env || c.shot != shot) continue;
        if (std::find(cats.begin(), cats.end(), c.category) == cats.end()) cats.push_back(c.category);
        lo = std::min(lo, log_loss(c.query_loss_mean));
        hi = std::max(hi, log_loss(c.query_loss_mean));
      }
      if (cats.empty()) continue;
      std::sort(cats.begin(), cats.end());
      const double floor_y = std::floor(lo) - 0.01;
      Svg bars(env + ": query loss by variant category, " + std::to_string(shot) + " shots", 0.0,
               static_cast<double>(cats.size()), floor_y, hi + 0.05 * (hi - floor_y));
      log_ticks(bars, floor_y, hi);
      const double width = 0.8 / static_cast<double>(methods.size());
      for (std::size_t ci = 0; ci < cats.size(); ++ci) {
        bars.xtick(static_cast<double>(ci) + 0.5, cats[ci]);
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
          for (const CategoryRow& c : report.categories) {
            if (c.env == env && c.shot == shot && c.category == cats[ci] && c.method == methods[mi]) {
              bars.bar(static_cast<double>(ci) + 0.1 + width * static_cast<double>(mi), width,
                       log_loss(c.query_loss_mean), method_color(c.method));
            }
          }
        }
      }
      bars.axis_labels("variant category", "query loss (log10)");
      bars.legend(methods);
      emit("category_" + env + "_shot" + std::to_string(shot) + ".svg", bars.str());
    }
  }
  return written;
}

}  // namespace imitlab
