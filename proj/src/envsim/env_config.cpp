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

#include "envsim/env_config.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "common/error.hpp"

namespace imitlab {

namespace {

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s, const std::string& context) {
  double x = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    fail(ErrorKind::Parse, context + ": \"" + std::string(s) + "\" is not a number");
  }
  return x;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

constexpr Attribute kAttributeOrder[] = {Attribute::Mass, Attribute::Length,
                                         Attribute::JointRange, Attribute::Friction};

}  // namespace

std::string_view env_name_token(EnvName e) {
  switch (e) {
    case EnvName::Pendulum: return "pendulum";
    case EnvName::Cartpole: return "cartpole";
    case EnvName::Reacher2: return "reacher2";
  }
  return "unknown";
}

std::optional<EnvName> env_name_from_token(std::string_view token) {
  for (EnvName e : kAllEnvs) {
    if (env_name_token(e) == token) return e;
  }
  return std::nullopt;
}

EnvName parse_env_name(std::string_view token) {
  const auto e = env_name_from_token(token);
  if (!e) {
    fail(ErrorKind::InvalidArgument,
         "unknown environment \"" + std::string(token) + "\" (expected pendulum, cartpole or reacher2)");
  }
  return *e;
}

std::optional<double> PartAttributes::get(Attribute a) const {
  switch (a) {
    case Attribute::Mass: return mass;
    case Attribute::Length: return length;
    case Attribute::JointRange: return joint_range;
    case Attribute::Friction: return friction;
  }
  return std::nullopt;
}

std::optional<double>& PartAttributes::slot(Attribute a) {
  switch (a) {
    case Attribute::Mass: return mass;
    case Attribute::Length: return length;
    case Attribute::JointRange: return joint_range;
    case Attribute::Friction: break;
  }
  return friction;
}

const PartAttributes& EnvConfig::part(const std::string& name) const {
  const auto it = parts.find(name);
  if (it == parts.end()) {
    fail(ErrorKind::Domain, std::string(env_name_token(env)) + " has no part \"" + name + "\"");
  }
  return it->second;
}

EnvConfig default_config(EnvName env) {
  EnvConfig cfg;
  cfg.env = env;
  cfg.dt = 0.01;
  cfg.horizon = 200;
  switch (env) {
    case EnvName::Pendulum:
      cfg.gravity = 9.81;
      cfg.max_torque = 20.0;
      cfg.parts["rod"] = PartAttributes{.mass = 1.0, .length = 1.0};
      cfg.parts["pivot"] = PartAttributes{.joint_range = std::numbers::pi, .friction = 0.1};
      break;
    case EnvName::Cartpole:
      cfg.gravity = 9.81;
      cfg.max_torque = 15.0;
      cfg.parts["cart"] = PartAttributes{.mass = 1.0, .friction = 0.1};
      cfg.parts["pole"] = PartAttributes{.mass = 0.1, .length = 1.0};
      cfg.parts["slider"] = PartAttributes{.joint_range = 2.4};
      cfg.parts["hinge"] = PartAttributes{.friction = 0.01};
      break;
    case EnvName::Reacher2:
      cfg.gravity = 0.0;
      cfg.max_torque = 1.0;
      cfg.parts["link1"] = PartAttributes{.mass = 1.0, .length = 0.5};
      cfg.parts["link2"] = PartAttributes{.mass = 1.0, .length = 0.5};
      cfg.parts["joint1"] = PartAttributes{.joint_range = std::numbers::pi, .friction = 0.1};
      cfg.parts["joint2"] = PartAttributes{.joint_range = 2.5, .friction = 0.1};
      break;
  }
  return cfg;
}

void validate_config(const EnvConfig& cfg) {
  const std::string env(env_name_token(cfg.env));
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) fail(ErrorKind::Domain, env + ": dt must be positive");
  if (cfg.horizon < 1) fail(ErrorKind::Domain, env + ": horizon must be >= 1");
  if (!std::isfinite(cfg.gravity) || cfg.gravity < 0.0) {
    fail(ErrorKind::Domain, env + ": gravity must be finite and non-negative");
  }
  if (!(cfg.max_torque > 0.0) || !std::isfinite(cfg.max_torque)) {
    fail(ErrorKind::Domain, env + ": max_torque must be positive");
  }
  const EnvConfig reference = default_config(cfg.env);
  for (const auto& [name, ref_attrs] : reference.parts) {
    const auto it = cfg.parts.find(name);
    if (it == cfg.parts.end()) fail(ErrorKind::Domain, env + ": missing part \"" + name + "\"");
  }
  for (const auto& [name, attrs] : cfg.parts) {
    if (!reference.parts.contains(name)) {
      fail(ErrorKind::Domain, env + ": unknown part \"" + name + "\"");
    }
    for (Attribute a : kAttributeOrder) {
      const auto value = attrs.get(a);
      if (value && !(*value > 0.0 && std::isfinite(*value))) {
        fail(ErrorKind::Domain, env + ": " + name + "." + std::string(attribute_name(a)) +
                                    " must be strictly positive");
      }
    }
  }
}

EnvConfig apply_variant(const EnvConfig& cfg, const VariantId& v) {
  const auto it = cfg.parts.find(v.part);
  if (it == cfg.parts.end()) {
    fail(ErrorKind::Domain, "variant " + format_variant_id(v) + ": " +
                                std::string(env_name_token(cfg.env)) + " has no part \"" + v.part + "\"");
  }
  const Attribute attr = targeted_attribute(v.category);
  if (!it->second.get(attr)) {
    fail(ErrorKind::Domain, "variant " + format_variant_id(v) + ": part \"" + v.part + "\" has no " +
                                std::string(attribute_name(attr)));
  }
  if (!(v.quantity_pct > 0.0)) {
    fail(ErrorKind::Domain, "variant " + format_variant_id(v) + ": quantity must be positive");
  }
  if (!is_increase(v.category) && v.quantity_pct >= 100.0) {
    fail(ErrorKind::Domain, "variant " + format_variant_id(v) +
                                ": a decrease of 100% or more makes the attribute non-positive");
  }
  const double factor = is_increase(v.category) ? 1.0 + v.quantity_pct / 100.0
                                                : 1.0 - v.quantity_pct / 100.0;
  EnvConfig out = cfg;
  auto& value = out.parts[v.part].slot(attr);
  value = *value * factor;
  return out;
}

std::vector<double> quantity_grid(VariantCategory c) {
  switch (c) {
    case VariantCategory::MassInc: return {100, 200, 300};
    case VariantCategory::MassDec: return {25, 50};
    case VariantCategory::JointDec: return {25, 50};
    case VariantCategory::LengthInc: return {50, 100, 150, 200};
    case VariantCategory::LengthDec: return {50};
    case VariantCategory::FrictionInc: return {25, 50};
    case VariantCategory::FrictionDec: return {25, 50};
  }
  return {};
}

std::vector<VariantId> variant_catalog(EnvName env) {
  const EnvConfig base = default_config(env);
  std::vector<VariantId> out;
  for (VariantCategory c : kAllCategories) {
    const Attribute attr = targeted_attribute(c);
    for (double q : quantity_grid(c)) {
      for (const auto& [name, attrs] : base.parts) {
        if (attrs.get(attr)) out.push_back(VariantId{c, q, name});
      }
    }
  }
  return out;
}

std::string env_config_to_text(const EnvConfig& cfg) {
  std::ostringstream os;
  os << "# imitlab environment configuration\n";
  os << "env = " << env_name_token(cfg.env) << '\n';
  os << "dt = " << format_double(cfg.dt) << '\n';
  os << "horizon = " << cfg.horizon << '\n';
  os << "gravity = " << format_double(cfg.gravity) << '\n';
  os << "max_torque = " << format_double(cfg.max_torque) << '\n';
  for (const auto& [name, attrs] : cfg.parts) {
    os << "\n[" << name << "]\n";
    for (Attribute a : kAttributeOrder) {
      if (const auto v = attrs.get(a)) {
        os << attribute_name(a) << " = " << format_double(*v) << '\n';
      }
    }
  }
  return os.str();
}

EnvConfig env_config_from_text(std::string_view text) {
  EnvConfig cfg;
  cfg.parts.clear();
  bool have_env = false;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string ctx = "env config line " + std::to_string(line_no);

    std::string_view line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) fail(ErrorKind::Parse, ctx + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (cfg.parts.contains(section)) fail(ErrorKind::Parse, ctx + ": duplicate part \"" + section + "\"");
      cfg.parts[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorKind::Parse, ctx + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    if (section.empty()) {
      if (key == "env") {
        cfg.env = parse_env_name(value);
        have_env = true;
      } else if (key == "dt") {
        cfg.dt = parse_double(value, ctx);
      } else if (key == "horizon") {
        const double h = parse_double(value, ctx);
        if (h != std::floor(h)) fail(ErrorKind::Parse, ctx + ": horizon must be an integer");
        cfg.horizon = static_cast<int>(h);
      } else if (key == "gravity") {
        cfg.gravity = parse_double(value, ctx);
      } else if (key == "max_torque") {
        cfg.max_torque = parse_double(value, ctx);
      } else {
        fail(ErrorKind::Parse, ctx + ": unknown key \"" + key + "\"");
      }
      continue;
    }
    bool matched = false;
    for (Attribute a : kAttributeOrder) {
      if (attribute_name(a) == key) {
        cfg.parts[section].slot(a) = parse_double(value, ctx);
        matched = true;
      }
    }
    if (!matched) fail(ErrorKind::Parse, ctx + ": unknown attribute \"" + key + "\"");
  }
  if (!have_env) fail(ErrorKind::Parse, "env config: missing 'env' key");
  validate_config(cfg);
  return cfg;
}

}  // namespace imitlab
