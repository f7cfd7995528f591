// Copyright 2026 The kpnn-forest Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "kpnn/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "kpnn/distances.hpp"
#include "kpnn/error.hpp"

namespace kpnn {
namespace {

const std::vector<ExperimentInfo> kCatalog = {
    {ExperimentKind::kCltRate, "clt-rate",
     "Kolmogorov distance of standardized predictions to the normal law, per n"},
    {ExperimentKind::kPnnCount, "pnn-count",
     "moments of the voting-set size L and their log n scaling"},
    {ExperimentKind::kBiasDecay, "bias-decay",
     "bias and variance floor of the prediction, per n and k"},
    {ExperimentKind::kTailCalibration, "tail-calibration",
     "simulated region membership against the Poisson formula and tail bound"},
    {ExperimentKind::kConcentration, "concentration",
     "lower-tail mass P(L <= E L / 2)"},
    {ExperimentKind::kLowerBoundFit, "lower-bound-fit",
     "growth exponent in k of the double psi integral"},
    {ExperimentKind::kAssumptionAudit, "assumption-audit",
     "region properties R1, R3, R4 on random small configurations"},
};

// Known keys and their defaults. An empty default means "derived".
const std::vector<std::pair<std::string, std::string>> kKeys = {
    {"experiment.name", "pnn-count"},
    {"experiment.seed", "1"},
    {"experiment.reps", "100"},
    {"experiment.output", "results"},
    {"model.dim", "2"},
    {"model.density", "uniform"},
    {"model.lo", ""},
    {"model.hi", ""},
    {"model.mean", ""},
    {"model.sd", ""},
    {"model.beta_a", "2"},
    {"model.beta_b", "2"},
    {"model.noise", "gaussian"},
    {"model.r0", "constant"},
    {"model.constant", "0"},
    {"model.weights", ""},
    {"model.intercept", "0"},
    {"model.amplitude", "1"},
    {"model.frequency", "1"},
    {"model.scale", "constant"},
    {"model.sigma", "1"},
    {"model.sigma_a", "1"},
    {"model.sigma_b", "0"},
    {"grid.n", "1000"},
    {"grid.k", "1"},
    {"grid.x0", ""},
    {"grid.sampling", "poisson"},
    {"forest.scheme", "uniform"},
    {"forest.alpha", "1"},
    {"forest.seed", "0"},
    {"forest.per_point_streams", "true"},
    {"stabilization.cases", "20"},
    {"stabilization.draws", "20000"},
    {"stabilization.max_k", "10"},
    {"stabilization.t", "1"},
    {"stabilization.alpha", "1"},
    {"stabilization.outer", "20000"},
    {"stabilization.inner", "64"},
    {"stabilization.instances", "500"},
    {"stabilization.max_points", "200"},
    {"output.plot", "false"},
    {"output.rect_grid", "41"},
    {"output.bootstrap", "200"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, std::string>& values) : values_(values) {}

  const std::string& raw(const std::string& key) const { return values_.at(key); }

  double real(const std::string& key) const { return parse_real(key, raw(key)); }

  double positive(const std::string& key) const {
    const double v = real(key);
    if (!(v > 0.0)) fail(key, "must be positive");
    return v;
  }

  std::size_t count(const std::string& key, std::size_t min_value) const {
    return parse_count(key, raw(key), min_value);
  }

  bool flag(const std::string& key) const {
    const std::string v = raw(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(key, "expected true or false");
    return false;
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& part : split(raw(key), ',')) out.push_back(parse_real(key, part));
    if (out.empty()) fail(key, "expected a comma separated list");
    return out;
  }

  std::uint64_t seed(const std::string& key) const {
    const std::string v = raw(key);
    try {
      std::size_t used = 0;
      const unsigned long long s = std::stoull(v, &used, 0);
      if (used != v.size() || v.front() == '-') fail(key, "expected an unsigned integer");
      return s;
    } catch (const std::logic_error&) {
      fail(key, "expected an unsigned integer");
    }
    return 0;
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  [[noreturn]] static void fail(const std::string& key, const std::string& what) {
    throw InvalidArgument("config: " + key + ": " + what);
  }

  static double parse_real(const std::string& key, const std::string& text) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size() || !std::isfinite(v)) fail(key, "not a finite number: '" + text + "'");
      return v;
    } catch (const std::logic_error&) {
      fail(key, "not a number: '" + text + "'");
    }
  }

  static std::size_t parse_count(const std::string& key, const std::string& text,
                                 std::size_t min_value) {
    const double v = parse_real(key, text);
    if (v != std::floor(v) || v < static_cast<double>(min_value) || v > 1e15) {
      fail(key, "expected an integer >= " + std::to_string(min_value));
    }
    return static_cast<std::size_t>(v);
  }

 private:
  std::map<std::string, std::string>& values_;
};

std::string join_reals(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

DensitySpec read_density(Reader& r, std::size_t dim) {
  const std::string kind = r.raw("model.density");
  if (r.raw("model.lo").empty()) r.set("model.lo", join_reals(std::vector<double>(dim, 0.0)));
  if (r.raw("model.hi").empty()) r.set("model.hi", join_reals(std::vector<double>(dim, 1.0)));
  const std::vector<double> lo = r.reals("model.lo");
  const std::vector<double> hi = r.reals("model.hi");
  if (lo.size() != dim || hi.size() != dim) {
    Reader::fail("model.lo/hi", "need " + std::to_string(dim) + " entries");
  }
  if (kind == "uniform") return DensitySpec::uniform_box(lo, hi);
  if (kind == "truncated-gaussian") {
    if (r.raw("model.mean").empty()) {
      std::vector<double> mid(dim);
      for (std::size_t i = 0; i < dim; ++i) mid[i] = 0.5 * (lo[i] + hi[i]);
      r.set("model.mean", join_reals(mid));
    }
    if (r.raw("model.sd").empty()) r.set("model.sd", join_reals(std::vector<double>(dim, 1.0)));
    const std::vector<double> mean = r.reals("model.mean");
    const std::vector<double> sd = r.reals("model.sd");
    if (mean.size() != dim || sd.size() != dim) {
      Reader::fail("model.mean/sd", "need " + std::to_string(dim) + " entries");
    }
    return DensitySpec::truncated_gaussian(mean, sd, lo, hi);
  }
  if (kind == "product-beta") {
    return DensitySpec::product_beta(r.positive("model.beta_a"), r.positive("model.beta_b"),
                                     lo, hi);
  }
  Reader::fail("model.density", "unknown density '" + kind +
                                    "' (uniform, truncated-gaussian, product-beta)");
}

NoiseSpec read_noise(const Reader& r) {
  const std::string kind = r.raw("model.noise");
  NoiseSpec noise;
  if (kind == "gaussian") {
    noise.kind = NoiseKind::kGaussian;
  } else if (kind == "uniform") {
    noise.kind = NoiseKind::kUniform;
  } else if (kind == "rademacher") {
    noise.kind = NoiseKind::kRademacher;
  } else {
    Reader::fail("model.noise", "unknown noise '" + kind + "' (gaussian, uniform, rademacher)");
  }
  return noise;
}

RegressionSpec read_regression(Reader& r, std::size_t dim) {
  RegressionSpec reg;
  const std::string mean = r.raw("model.r0");
  if (mean == "constant") {
    reg = RegressionSpec::constant_mean(r.real("model.constant"), 1.0);
  } else if (mean == "linear") {
    if (r.raw("model.weights").empty()) {
      r.set("model.weights", join_reals(std::vector<double>(dim, 1.0)));
    }
    const std::vector<double> w = r.reals("model.weights");
    if (w.size() != dim) Reader::fail("model.weights", "need " + std::to_string(dim) + " entries");
    reg = RegressionSpec::linear_mean(w, r.real("model.intercept"), 1.0);
  } else if (mean == "smooth-sine") {
    reg = RegressionSpec::smooth_sine(r.real("model.amplitude"), r.real("model.frequency"), 1.0);
  } else {
    Reader::fail("model.r0", "unknown regression '" + mean + "' (constant, linear, smooth-sine)");
  }
  const std::string scale = r.raw("model.scale");
  if (scale == "constant") {
    reg.scale_kind = ScaleKind::kConstant;
    reg.sigma = r.real("model.sigma");
  } else if (scale == "affine-norm") {
    reg.scale_kind = ScaleKind::kAffineNorm;
    reg.sigma_a = r.real("model.sigma_a");
    reg.sigma_b = r.real("model.sigma_b");
  } else {
    Reader::fail("model.scale", "unknown scale '" + scale + "' (constant, affine-norm)");
  }
  reg.validate(dim);
  return reg;
}

std::vector<Point> read_x0s(Reader& r, const DensitySpec& density) {
  const std::size_t dim = density.dim();
  if (r.raw("grid.x0").empty()) {
    std::vector<double> mid(dim);
    for (std::size_t i = 0; i < dim; ++i) mid[i] = 0.5 * (density.lo[i] + density.hi[i]);
    r.set("grid.x0", join_reals(mid));
  }
  std::vector<Point> out;
  for (const std::string& part : split(r.raw("grid.x0"), ';')) {
    if (part.empty()) continue;
    std::vector<double> c;
    for (const std::string& v : split(part, ',')) c.push_back(Reader::parse_real("grid.x0", v));
    if (c.size() != dim) {
      Reader::fail("grid.x0", "test point '" + part + "' needs " + std::to_string(dim) +
                                  " coordinates");
    }
    out.push_back(Point{std::move(c)});
  }
  if (out.empty()) Reader::fail("grid.x0", "need at least one test point");
  return out;
}

WeightScheme read_scheme(const Reader& r) {
  WeightScheme s;
  const std::string kind = r.raw("forest.scheme");
  if (kind == "uniform") {
    s.kind = SchemeKind::kUniform;
  } else if (kind == "dirichlet") {
    s.kind = SchemeKind::kDirichlet;
  } else if (kind == "single-vote") {
    s.kind = SchemeKind::kSingleVote;
  } else {
    Reader::fail("forest.scheme", "unknown scheme '" + kind + "' (uniform, dirichlet, single-vote)");
  }
  s.alpha = r.positive("forest.alpha");
  s.seed = r.seed("forest.seed");
  s.per_point_streams = r.flag("forest.per_point_streams");
  s.validate();
  return s;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() { return kCatalog; }

ExperimentKind experiment_from_name(const std::string& name) {
  for (const ExperimentInfo& e : kCatalog) {
    if (name == e.name) return e.kind;
  }
  std::string known;
  for (const ExperimentInfo& e : kCatalog) known += std::string(known.empty() ? "" : ", ") + e.name;
  throw InvalidArgument("unknown experiment '" + name + "' (" + known + ")");
}

std::string experiment_name(ExperimentKind kind) {
  for (const ExperimentInfo& e : kCatalog) {
    if (e.kind == kind) return e.name;
  }
  return "unknown";
}

ExperimentConfig parse_config(const std::string& text,
                              const std::vector<std::string>& overrides) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream is(text);
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidArgument(std::string("config: ") + e.message() + " at line " +
                          std::to_string(e.line()));
  }

  std::map<std::string, std::string> values(kKeys.begin(), kKeys.end());
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw InvalidArgument("config: key '" + section + "' outside any section");
    }
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      if (!values.count(full)) throw InvalidArgument("config: unknown key '" + full + "'");
      values[full] = trim(node.data());
    }
  }
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("override '" + o + "' must look like section.key=value");
    }
    const std::string key = trim(o.substr(0, eq));
    if (!values.count(key)) throw InvalidArgument("override: unknown key '" + key + "'");
    values[key] = trim(o.substr(eq + 1));
  }

  Reader r(values);
  ExperimentConfig c;
  c.kind = experiment_from_name(r.raw("experiment.name"));
  c.seed = r.seed("experiment.seed");
  c.reps = r.count("experiment.reps", 2);
  c.output = r.raw("experiment.output");
  if (c.output.empty()) Reader::fail("experiment.output", "must not be empty");

  const std::size_t dim = r.count("model.dim", 1);
  c.model.density = read_density(r, dim);
  c.model.noise = read_noise(r);
  c.model.regression = read_regression(r, dim);
  c.model.validate();

  c.intensities = r.reals("grid.n");
  for (double n : c.intensities) {
    if (!(n > 0.0)) Reader::fail("grid.n", "intensities must be positive");
  }
  c.ks.clear();
  for (const std::string& part : split(r.raw("grid.k"), ',')) {
    c.ks.push_back(Reader::parse_count("grid.k", part, 1));
  }
  c.x0s = read_x0s(r, c.model.density);
  const std::string sampling = r.raw("grid.sampling");
  if (sampling == "poisson") {
    c.sampling = SamplingMode::kPoisson;
  } else if (sampling == "binomial") {
    c.sampling = SamplingMode::kBinomial;
  } else {
    Reader::fail("grid.sampling", "expected poisson or binomial");
  }

  c.scheme = read_scheme(r);

  c.cases = r.count("stabilization.cases", 1);
  c.draws = r.count("stabilization.draws", 2);
  c.max_k = r.count("stabilization.max_k", 1);
  c.t = r.positive("stabilization.t");
  c.alpha = r.positive("stabilization.alpha");
  c.outer_samples = r.count("stabilization.outer", 2);
  c.inner_samples = r.count("stabilization.inner", 1);
  c.instances = r.count("stabilization.instances", 1);
  c.max_points = r.count("stabilization.max_points", 1);

  c.plot = r.flag("output.plot");
  c.rect_grid = r.count("output.rect_grid", 2);
  c.bootstrap = r.count("output.bootstrap", 0);

  c.resolved = values;
  return c;
}

ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return parse_config(os.str(), overrides);
}

std::vector<Finding> validate_config(const ExperimentConfig& c) {
  std::vector<Finding> out;
  auto error = [&](std::string m) { out.push_back({Finding::Level::kError, std::move(m)}); };
  auto warn = [&](std::string m) { out.push_back({Finding::Level::kWarning, std::move(m)}); };
  const std::size_t m = c.x0s.size();

  switch (c.kind) {
    case ExperimentKind::kCltRate:
      if (m > kMaxRectDim) {
        error("clt-rate: " + std::to_string(m) + " test points requested; the rectangle-grid " +
              "distance is limited to m <= " + std::to_string(kMaxRectDim) +
              " because it evaluates grid^m lower orthants");
      }
      if (c.rect_grid > kMaxRectGrid) {
        error("output.rect_grid = " + std::to_string(c.rect_grid) + " exceeds the limit of " +
              std::to_string(kMaxRectGrid) + " points per axis");
      }
      if (c.reps < 100) error("clt-rate needs reps >= 100 for the empirical distance");
      break;
    case ExperimentKind::kPnnCount:
      if (c.reps < 30) error("pnn-count needs reps >= 30 for the moment estimates");
      if (c.intensities.size() < 2) warn("pnn-count: a single n gives no log n slope");
      break;
    case ExperimentKind::kBiasDecay:
      if (c.reps < 30) error("bias-decay needs reps >= 30");
      if (c.scheme.kind != SchemeKind::kUniform) {
        warn("bias-decay: the variance floor columns assume uniform weights");
      }
      break;
    case ExperimentKind::kTailCalibration:
      if (c.draws < 100) warn("tail-calibration: fewer than 100 draws per case");
      break;
    case ExperimentKind::kConcentration:
      if (c.reps < 30) error("concentration needs reps >= 30");
      for (std::size_t k : c.ks) {
        if (k < 11) {
          warn("concentration: k = " + std::to_string(k) +
               " is below 11, where the lower-tail estimate is not covered; it will be skipped");
        }
      }
      break;
    case ExperimentKind::kLowerBoundFit:
      if (c.intensities.size() != 1) warn("lower-bound-fit uses only the first n of the grid");
      if (c.ks.size() < 2) error("lower-bound-fit needs at least two k values to fit a slope");
      for (std::size_t k : c.ks) {
        const double n = c.intensities.front();
        if (static_cast<double>(k) > 2.0 * n) {
          error("lower-bound-fit: k = " + std::to_string(k) + " exceeds 2n; the lower bound " +
                "requires k <= 2n");
        } else if (static_cast<double>(k) >= n / 2.0) {
          warn("lower-bound-fit: k = " + std::to_string(k) + " is at least n/2; the lower " +
               "bound only holds for k <= 2n and the fitted slope bends near that edge");
        }
      }
      break;
    case ExperimentKind::kAssumptionAudit:
      if (c.max_points > 200) {
        error("assumption-audit checks exhaustively and is limited to max_points <= 200");
      }
      break;
  }
  if (c.sampling == SamplingMode::kBinomial) {
    warn("binomial sampling is a debug mode; the checks are calibrated for Poisson samples");
  }
  for (double n : c.intensities) {
    if (n < 100.0 && c.kind != ExperimentKind::kLowerBoundFit) {
      warn("n = " + std::to_string(n) + ": empty samples become likely and are flagged");
    }
  }
  return out;
}

double estimated_cost_points(const ExperimentConfig& c) {
  double total_n = 0.0;
  for (double n : c.intensities) total_n += n;
  const double reps = static_cast<double>(c.reps);
  switch (c.kind) {
    case ExperimentKind::kCltRate:
    case ExperimentKind::kPnnCount:
    case ExperimentKind::kBiasDecay:
    case ExperimentKind::kConcentration:
      return total_n * reps;
    case ExperimentKind::kTailCalibration:
      return total_n * static_cast<double>(c.cases * c.draws);
    case ExperimentKind::kLowerBoundFit:
      return static_cast<double>(c.ks.size() * c.outer_samples * c.inner_samples);
    case ExperimentKind::kAssumptionAudit:
      return static_cast<double>(c.instances * c.max_points);
  }
  return 0.0;
}

}  // namespace kpnn
