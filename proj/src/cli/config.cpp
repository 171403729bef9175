// Copyright 2026 The mcmcsel Authors
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

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "mcmcsel/cli.hpp"

namespace mcmcsel::cli {
namespace {

std::string where(const YAML::Node& node) {
  const auto mark = node.Mark();
  if (mark.is_null()) return "";
  return " (line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1) + ")";
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kParseError, "field '" + field + "'" + where(node) + ": " + what);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void check_keys(const YAML::Node& map, const std::string& field, std::initializer_list<std::string_view> allowed) {
  if (!map.IsMap()) fail(map, field, "expected a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(kv.first, field.empty() ? key : field + "." + key, "unknown field");
    }
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, field, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, field, "cannot convert '" + node.Scalar() + "'");
  }
}

std::uint64_t unsigned_scalar(const YAML::Node& node, const std::string& field) {
  const auto text = scalar<std::string>(node, field);
  if (text.empty() || text.front() == '-') fail(node, field, "expected a nonnegative integer");
  return scalar<std::uint64_t>(node, field);
}

std::vector<double> real_list(const YAML::Node& node, const std::string& field) {
  if (node.IsScalar()) return {scalar<double>(node, field)};
  if (!node.IsSequence()) fail(node, field, "expected a number or a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(scalar<double>(node[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// {mean, variance | variances | covariance}
GaussianSpec parse_gaussian(const YAML::Node& node, const std::string& field) {
  check_keys(node, field, {"mean", "variance", "variances", "covariance"});
  if (!node["mean"]) fail(node, field + ".mean", "missing");
  const Eigen::VectorXd mean = to_vector(real_list(node["mean"], field + ".mean"));
  const auto d = mean.size();
  const int given = (node["variance"] ? 1 : 0) + (node["variances"] ? 1 : 0) + (node["covariance"] ? 1 : 0);
  if (given != 1) fail(node, field, "give exactly one of variance, variances, covariance");
  try {
    if (node["variance"]) {
      const double v = scalar<double>(node["variance"], field + ".variance");
      return GaussianSpec(mean, Eigen::MatrixXd::Identity(d, d) * v);
    }
    if (node["variances"]) {
      const auto v = real_list(node["variances"], field + ".variances");
      if (static_cast<Eigen::Index>(v.size()) != d) fail(node["variances"], field + ".variances", "length differs from mean");
      return GaussianSpec::diagonal(mean, to_vector(v));
    }
    const auto& rows = node["covariance"];
    if (!rows.IsSequence() || static_cast<Eigen::Index>(rows.size()) != d) {
      fail(rows, field + ".covariance", "expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
    }
    Eigen::MatrixXd cov(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto row = real_list(rows[i], field + ".covariance");
      if (static_cast<Eigen::Index>(row.size()) != d) fail(rows[i], field + ".covariance", "row length differs from mean");
      for (Eigen::Index j = 0; j < d; ++j) cov(i, j) = row[static_cast<std::size_t>(j)];
    }
    return GaussianSpec(mean, cov);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) throw;
    throw Error(ErrorCode::kValidationError, field + where(node) + ": " + e.what());
  }
}

TargetModel parse_target(const YAML::Node& node) {
  if (!node.IsMap() || !node["type"]) fail(node, "target", "expected a mapping with a 'type'");
  const auto type = lower(scalar<std::string>(node["type"], "target.type"));
  if (type == "gaussian") {
    YAML::Node rest = YAML::Clone(node);
    rest.remove("type");
    return TargetModel(parse_gaussian(rest, "target"));
  }
  if (type == "mixture") {
    check_keys(node, "target", {"type", "components"});
    const auto& list = node["components"];
    if (!list || !list.IsSequence() || list.size() == 0) fail(node, "target.components", "expected a nonempty list");
    std::vector<MixtureComponent> components;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string field = "target.components[" + std::to_string(i) + "]";
      if (!list[i].IsMap() || !list[i]["weight"]) fail(list[i], field + ".weight", "missing");
      const double w = scalar<double>(list[i]["weight"], field + ".weight");
      YAML::Node rest = YAML::Clone(list[i]);
      rest.remove("weight");
      components.push_back({w, parse_gaussian(rest, field)});
    }
    try {
      return TargetModel(MixtureSpec(std::move(components)));
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidationError, std::string("target") + where(node) + ": " + e.what());
    }
  }
  if (type == "builtin") {
    check_keys(node, "target", {"type", "name"});
    if (!node["name"]) fail(node, "target.name", "missing");
    const auto name = scalar<std::string>(node["name"], "target.name");
    if (name == "sinusoid_gaussian") return TargetModel(UnnormalizedSpec::sinusoid_gaussian());
    throw Error(ErrorCode::kValidationError, "target.name" + where(node["name"]) + ": unknown built-in density '" + name + "'");
  }
  if (type == "posterior") {
    check_keys(node, "target", {"type", "data", "prior_mean", "prior_variance", "shape", "rate"});
    for (const char* key : {"data", "prior_mean", "prior_variance", "shape", "rate"}) {
      if (!node[key]) fail(node, std::string("target.") + key, "missing");
    }
    std::vector<double> data;
    if (node["data"].IsScalar() && node["data"].Scalar() == "synthetic") {
      data = recipe_posterior_data();
    } else {
      if (!node["data"].IsSequence()) fail(node["data"], "target.data", "expected a list of numbers or 'synthetic'");
      data = real_list(node["data"], "target.data");
    }
    try {
      return TargetModel(ConjugatePosteriorSpec(std::move(data), scalar<double>(node["prior_mean"], "target.prior_mean"),
                                                scalar<double>(node["prior_variance"], "target.prior_variance"),
                                                scalar<double>(node["shape"], "target.shape"),
                                                scalar<double>(node["rate"], "target.rate")));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParseError) throw;
      throw Error(ErrorCode::kValidationError, std::string("target") + where(node) + ": " + e.what());
    }
  }
  fail(node["type"], "target.type", "expected gaussian, mixture, builtin or posterior");
}

InitialLaw parse_initial(const YAML::Node& node) {
  check_keys(node, "initial", {"point", "gaussian"});
  if (node["point"] && !node["gaussian"]) return to_vector(real_list(node["point"], "initial.point"));
  if (node["gaussian"] && !node["point"]) return parse_gaussian(node["gaussian"], "initial.gaussian");
  fail(node, "initial", "give exactly one of point, gaussian");
}

StrategyConfig parse_strategy(const YAML::Node& node, const std::string& field) {
  check_keys(node, field, {"id", "kind", "proposal", "t0", "scale", "epsilon", "selection", "scan", "stream"});
  StrategyConfig s;
  if (!node["id"]) fail(node, field + ".id", "missing");
  if (!node["kind"]) fail(node, field + ".kind", "missing");
  s.id = scalar<std::string>(node["id"], field + ".id");
  try {
    s.kind = parse_strategy_kind(scalar<std::string>(node["kind"], field + ".kind"));
  } catch (const Error&) {
    fail(node["kind"], field + ".kind", "expected is, rwmh, am, gibbs or mwg");
  }
  if (node["proposal"]) s.proposal = parse_gaussian(node["proposal"], field + ".proposal");
  if (node["t0"]) s.am.t0 = scalar<std::int64_t>(node["t0"], field + ".t0");
  if (node["scale"]) s.am.scale = scalar<double>(node["scale"], field + ".scale");
  if (node["epsilon"]) s.am.epsilon = scalar<double>(node["epsilon"], field + ".epsilon");
  if (node["selection"]) s.mwg.selection = real_list(node["selection"], field + ".selection");
  if (node["scan"]) {
    const auto scan = lower(scalar<std::string>(node["scan"], field + ".scan"));
    if (scan == "systematic") {
      s.mwg.scan = ScanMode::kSystematic;
    } else if (scan == "random") {
      s.mwg.scan = ScanMode::kRandom;
    } else {
      fail(node["scan"], field + ".scan", "expected systematic or random");
    }
  }
  if (node["stream"]) s.stream = scalar<std::string>(node["stream"], field + ".stream");
  return s;
}

std::vector<std::int64_t> parse_checkpoints(const YAML::Node& node) {
  if (node.IsScalar() && node.Scalar() == "default") return default_checkpoints();
  if (!node.IsSequence()) fail(node, "checkpoints", "expected a list of iterations or 'default'");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(scalar<std::int64_t>(node[i], "checkpoints[" + std::to_string(i) + "]"));
  }
  return out;
}

void parse_estimation(const YAML::Node& node, EstimationSettings& e) {
  check_keys(node, "estimation", {"N", "M", "k", "mode", "burn_in", "n0", "level", "jitter", "reference"});
  if (node["N"]) e.chains = unsigned_scalar(node["N"], "estimation.N");
  if (node["M"]) e.reference_size = unsigned_scalar(node["M"], "estimation.M");
  if (node["k"]) {
    const auto& k = node["k"];
    e.k = k.IsScalar() && k.Scalar() == "auto" ? 0 : unsigned_scalar(k, "estimation.k");
    if (e.k == 0 && k.Scalar() != "auto") fail(k, "estimation.k", "expected a positive integer or 'auto'");
  }
  if (node["mode"]) {
    const auto mode = lower(scalar<std::string>(node["mode"], "estimation.mode"));
    if (mode == "auto") {
      e.mode.reset();
    } else if (mode == "known_f" || mode == "known-f") {
      e.mode = EstimatorMode::kKnownF;
    } else if (mode == "unknown_f" || mode == "unknown-f") {
      e.mode = EstimatorMode::kUnknownF;
    } else {
      fail(node["mode"], "estimation.mode", "expected auto, known_f or unknown_f");
    }
  }
  if (node["burn_in"]) e.burn_in = scalar<std::int64_t>(node["burn_in"], "estimation.burn_in");
  if (node["n0"]) e.thin = scalar<std::int64_t>(node["n0"], "estimation.n0");
  if (node["level"]) e.level = scalar<double>(node["level"], "estimation.level");
  if (node["jitter"]) e.jitter = scalar<bool>(node["jitter"], "estimation.jitter");
  if (node["reference"]) {
    const auto& r = node["reference"];
    if (r.IsScalar() && r.Scalar() == "direct") {
      e.reference_generator.reset();
    } else {
      e.reference_generator = parse_strategy(r, "estimation.reference");
    }
  }
}

RunConfig from_yaml(const YAML::Node& root) {
  if (!root.IsMap()) fail(root, "<root>", "expected a mapping");
  check_keys(root, "", {"name", "reproduce", "target", "initial", "strategies", "divergence", "estimation",
                        "checkpoints", "criterion", "threshold", "master_seed", "output"});
  std::optional<ComparisonConfig> base;
  if (root["reproduce"]) {
    const int figure = scalar<int>(root["reproduce"], "reproduce");
    if (figure < 1 || figure > 5) {
      throw Error(ErrorCode::kValidationError, "reproduce" + where(root["reproduce"]) + ": figure must be 1..5");
    }
    base = reproduction_recipe(figure);
  } else {
    for (const char* key : {"target", "initial", "strategies", "divergence"}) {
      if (!root[key]) fail(root, key, "missing (required unless 'reproduce' is given)");
    }
    base.emplace(ComparisonConfig{.name = "comparison",
                                  .target = parse_target(root["target"]),
                                  .initial = parse_initial(root["initial"]),
                                  .strategies = {},
                                  .kind = {},
                                  .checkpoints = default_checkpoints(),
                                  .estimation = {},
                                  .criterion = Criterion::kFinalValue,
                                  .threshold = 0.05,
                                  .master_seed = 1});
  }
  RunConfig cfg{.comparison = std::move(*base), .output_dir = "out"};
  ComparisonConfig& c = cfg.comparison;
  if (root["name"]) c.name = scalar<std::string>(root["name"], "name");
  if (root["reproduce"] && root["target"]) c.target = parse_target(root["target"]);
  if (root["reproduce"] && root["initial"]) c.initial = parse_initial(root["initial"]);
  if (root["strategies"]) {
    const auto& list = root["strategies"];
    if (!list.IsSequence()) fail(list, "strategies", "expected a list");
    c.strategies.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      c.strategies.push_back(parse_strategy(list[i], "strategies[" + std::to_string(i) + "]"));
    }
  }
  if (root["divergence"]) {
    const auto& d = root["divergence"];
    check_keys(d, "divergence", {"family", "alpha"});
    if (d["family"]) c.kind.family = parse_family(scalar<std::string>(d["family"], "divergence.family"));
    if (d["alpha"]) c.kind.alpha = scalar<double>(d["alpha"], "divergence.alpha");
  }
  if (root["estimation"]) parse_estimation(root["estimation"], c.estimation);
  if (root["checkpoints"]) c.checkpoints = parse_checkpoints(root["checkpoints"]);
  if (root["criterion"]) c.criterion = parse_criterion(scalar<std::string>(root["criterion"], "criterion"));
  if (root["threshold"]) c.threshold = scalar<double>(root["threshold"], "threshold");
  if (root["master_seed"]) c.master_seed = unsigned_scalar(root["master_seed"], "master_seed");
  if (root["output"]) cfg.output_dir = scalar<std::string>(root["output"], "output");

  c.validate();
  c.estimation.k = c.estimation.resolved_k();
  c.estimation.mode = c.estimation.resolved_mode(c.target);
  return cfg;
}

// Emission helpers.

void emit_list(YAML::Emitter& out, const Eigen::VectorXd& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i];
  out << YAML::EndSeq;
}

void emit_list(YAML::Emitter& out, const std::vector<double>& v) {
  emit_list(out, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

void emit_gaussian_fields(YAML::Emitter& out, const GaussianSpec& g) {
  out << YAML::Key << "mean" << YAML::Value;
  emit_list(out, g.mean());
  out << YAML::Key << "covariance" << YAML::Value << YAML::BeginSeq;
  for (Eigen::Index i = 0; i < g.covariance().rows(); ++i) emit_list(out, Eigen::VectorXd(g.covariance().row(i).transpose()));
  out << YAML::EndSeq;
}

void emit_gaussian(YAML::Emitter& out, const GaussianSpec& g) {
  out << YAML::BeginMap;
  emit_gaussian_fields(out, g);
  out << YAML::EndMap;
}

void emit_strategy(YAML::Emitter& out, const StrategyConfig& s) {
  out << YAML::BeginMap;
  out << YAML::Key << "id" << YAML::Value << s.id;
  out << YAML::Key << "kind" << YAML::Value << std::string(to_string(s.kind));
  if (s.proposal) {
    out << YAML::Key << "proposal" << YAML::Value;
    emit_gaussian(out, *s.proposal);
  }
  if (s.kind == StrategyKind::kAM) {
    out << YAML::Key << "t0" << YAML::Value << s.am.t0;
    out << YAML::Key << "scale" << YAML::Value << s.am.scale;
    out << YAML::Key << "epsilon" << YAML::Value << s.am.epsilon;
  }
  if (s.kind == StrategyKind::kMWG) {
    out << YAML::Key << "selection" << YAML::Value;
    emit_list(out, s.mwg.selection);
    out << YAML::Key << "scan" << YAML::Value << (s.mwg.scan == ScanMode::kSystematic ? "systematic" : "random");
  }
  if (!s.stream.empty()) out << YAML::Key << "stream" << YAML::Value << s.stream;
  out << YAML::EndMap;
}

void emit_target(YAML::Emitter& out, const TargetModel& target) {
  out << YAML::BeginMap;
  std::visit(
      [&](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, GaussianSpec>) {
          out << YAML::Key << "type" << YAML::Value << "gaussian";
          emit_gaussian_fields(out, spec);
        } else if constexpr (std::is_same_v<T, MixtureSpec>) {
          out << YAML::Key << "type" << YAML::Value << "mixture";
          out << YAML::Key << "components" << YAML::Value << YAML::BeginSeq;
          for (const auto& c : spec.components()) {
            out << YAML::BeginMap << YAML::Key << "weight" << YAML::Value << c.weight;
            emit_gaussian_fields(out, c.law);
            out << YAML::EndMap;
          }
          out << YAML::EndSeq;
        } else if constexpr (std::is_same_v<T, UnnormalizedSpec>) {
          out << YAML::Key << "type" << YAML::Value << "builtin";
          out << YAML::Key << "name" << YAML::Value << spec.name();
        } else {
          out << YAML::Key << "type" << YAML::Value << "posterior";
          out << YAML::Key << "data" << YAML::Value;
          emit_list(out, spec.data());
          out << YAML::Key << "prior_mean" << YAML::Value << spec.prior_mean();
          out << YAML::Key << "prior_variance" << YAML::Value << spec.prior_variance();
          out << YAML::Key << "shape" << YAML::Value << spec.ig_shape();
          out << YAML::Key << "rate" << YAML::Value << spec.ig_rate();
        }
      },
      target.spec());
  out << YAML::EndMap;
}

}  // namespace

RunConfig parse_config_text(std::string_view text, std::string_view source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::kParseError, std::string(source) + ": line " + std::to_string(e.mark.line + 1) + ", column " +
                                            std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  try {
    return from_yaml(root);
  } catch (const Error& e) {
    throw Error(e.code(), std::string(source) + ": " + e.what());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParseError, std::string(source) + ": " + e.what());
  }
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

std::string resolved_config_yaml(const RunConfig& config) {
  const ComparisonConfig& c = config.comparison;
  const EstimationSettings& e = c.estimation;
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.name;
  out << YAML::Key << "target" << YAML::Value;
  emit_target(out, c.target);
  out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  if (const auto* point = std::get_if<Point>(&c.initial)) {
    out << YAML::Key << "point" << YAML::Value;
    emit_list(out, *point);
  } else {
    out << YAML::Key << "gaussian" << YAML::Value;
    emit_gaussian(out, std::get<GaussianSpec>(c.initial));
  }
  out << YAML::EndMap;
  out << YAML::Key << "strategies" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : c.strategies) emit_strategy(out, s);
  out << YAML::EndSeq;
  out << YAML::Key << "divergence" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "family" << YAML::Value << std::string(to_string(c.kind.family));
  out << YAML::Key << "alpha" << YAML::Value << c.kind.alpha;
  out << YAML::EndMap;
  out << YAML::Key << "estimation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "N" << YAML::Value << e.chains;
  out << YAML::Key << "M" << YAML::Value << e.reference_size;
  out << YAML::Key << "k" << YAML::Value << e.resolved_k();
  out << YAML::Key << "mode" << YAML::Value << std::string(to_string(e.resolved_mode(c.target)));
  out << YAML::Key << "burn_in" << YAML::Value << e.burn_in;
  out << YAML::Key << "n0" << YAML::Value << e.thin;
  out << YAML::Key << "level" << YAML::Value << e.level;
  out << YAML::Key << "jitter" << YAML::Value << e.jitter;
  out << YAML::Key << "reference" << YAML::Value;
  if (e.reference_generator) {
    emit_strategy(out, *e.reference_generator);
  } else {
    out << "direct";
  }
  out << YAML::EndMap;
  out << YAML::Key << "checkpoints" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (auto n : c.checkpoints) out << n;
  out << YAML::EndSeq;
  out << YAML::Key << "criterion" << YAML::Value << std::string(to_string(c.criterion));
  out << YAML::Key << "threshold" << YAML::Value << c.threshold;
  out << YAML::Key << "master_seed" << YAML::Value << c.master_seed;
  out << YAML::Key << "output" << YAML::Value << config.output_dir.string();
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace mcmcsel::cli
