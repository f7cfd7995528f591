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


#include "kpnn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "kpnn/checks.hpp"
#include "kpnn/distances.hpp"
#include "kpnn/error.hpp"
#include "kpnn/replication.hpp"
#include "kpnn/stabilization.hpp"

namespace kpnn {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double as_real(std::size_t v) { return static_cast<double>(v); }

ReplicationPlan plan_from(const ExperimentConfig& c, bool positions_only) {
  ReplicationPlan p;
  p.model = c.model;
  p.intensities = c.intensities;
  p.ks = c.ks;
  p.x0s = c.x0s;
  p.reps = c.reps;
  p.scheme = c.scheme;
  p.seed = c.seed;
  p.mode = c.sampling;
  p.positions_only = positions_only;
  return p;
}

std::string cell_label(double n, std::size_t k) {
  std::ostringstream os;
  os << "n=" << n << " k=" << k;
  return os.str();
}

void note_empty(ExperimentResult& out, const RawMatrix& cell) {
  const std::size_t e = cell.empty_count();
  if (e > 0) {
    out.notes.push_back(cell_label(cell.n, cell.k) + ": " + std::to_string(e) +
                        " replications drew an empty sample (kept, predicting 0)");
  }
}

// ------------------------------------------------------------- clt-rate

ExperimentResult run_clt_rate(const ExperimentConfig& c, std::size_t workers) {
  ExperimentResult out;
  out.table.columns = result_columns(ExperimentKind::kCltRate);
  out.plot = {"n", "d_k", "k", true, "Kolmogorov distance to the normal law"};
  const ReplicationPlan plan = plan_from(c, false);
  for (std::size_t ni = 0; ni < plan.intensities.size(); ++ni) {
    const auto cells = run_replications_all_k(plan, ni, workers);
    for (std::size_t ki = 0; ki < cells.size(); ++ki) {
      const RawMatrix& cell = cells[ki];
      note_empty(out, cell);
      const std::vector<double> first = cell.prediction_column(0);
      double dk = kNaN;
      double dk_se = kNaN;
      double rect = kNaN;
      double min_eig = kNaN;
      try {
        dk = ecdf_kolmogorov(standardize_1d(first));
        const std::uint64_t boot_seed = derive_seed(c.seed ^ 0xb007ull, ni * 1000 + ki + 1);
        dk_se = c.bootstrap > 1 ? kolmogorov_bootstrap_se(first, c.bootstrap, boot_seed) : kNaN;
      } catch (const NumericalError& e) {
        out.numerical_failures.push_back(cell_label(cell.n, cell.k) + ": d_k: " + e.what());
      }
      const Eigen::MatrixXd data = cell.prediction_matrix();
      const Eigen::MatrixXd cov = sample_covariance(data);
      min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov, Eigen::EigenvaluesOnly)
                    .eigenvalues()
                    .minCoeff();
      try {
        rect = standardized_rect_kolmogorov(data, c.rect_grid);
      } catch (const NumericalError& e) {
        out.numerical_failures.push_back(cell_label(cell.n, cell.k) + ": rect_k: " + e.what());
      }
      const std::vector<std::size_t> L = cell.L_column(0);
      double mean_L = 0.0;
      for (std::size_t v : L) mean_L += as_real(v);
      mean_L /= as_real(L.size());
      out.table.rows.push_back({cell.n, as_real(cell.k), as_real(cell.m), as_real(cell.reps), dk,
                                dk_se, rect, min_eig, mean_L, as_real(cell.empty_count())});
    }
  }
  return out;
}

// ------------------------------------------------------------ pnn-count

ExperimentResult run_pnn_count(const ExperimentConfig& c, std::size_t workers) {
  ExperimentResult out;
  out.table.columns = result_columns(ExperimentKind::kPnnCount);
  out.plot = {"n", "mean_L", "k", true, "Mean number of k-PNNs"};
  const ReplicationPlan plan = plan_from(c, true);
  const std::size_t d = c.model.dim();
  // (k index, x0 index) -> (log n, E L) pairs for the slope.
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::vector<double>, std::vector<double>>>
      series;
  for (std::size_t ni = 0; ni < plan.intensities.size(); ++ni) {
    const auto cells = run_replications_all_k(plan, ni, workers);
    for (std::size_t ki = 0; ki < cells.size(); ++ki) {
      const RawMatrix& cell = cells[ki];
      note_empty(out, cell);
      for (std::size_t j = 0; j < cell.m; ++j) {
        const std::vector<std::size_t> L = cell.L_column(j);
        const LMoments mom = estimate_L_moments(L, cell.n, cell.k, d);
        out.table.rows.push_back({cell.n, as_real(cell.k), as_real(d), as_real(j),
                                  as_real(cell.reps), mom.mean, mom.se, mom.variance, mom.ratio,
                                  mom.recip_mean, mom.recip_product, mom.quantiles[0],
                                  mom.quantiles[2], mom.quantiles[4]});
        auto& s = series[{ki, j}];
        s.first.push_back(std::pow(std::log(cell.n), static_cast<double>(d - 1)));
        s.second.push_back(mom.mean);
      }
    }
  }
  if (plan.intensities.size() >= 2) {
    for (const auto& [key, s] : series) {
      const LinearFit fit = ols_fit(s.first, s.second);
      const std::string tag = "k" + std::to_string(plan.ks[key.first]) + "_x" +
                              std::to_string(key.second);
      out.summary["slope_" + tag] = fit.slope;
      out.summary["slope_se_" + tag] = fit.slope_se;
      out.summary["slope_per_k_" + tag] = fit.slope / as_real(plan.ks[key.first]);
    }
  }
  return out;
}

// ----------------------------------------------------------- bias-decay

ExperimentResult run_bias_decay(const ExperimentConfig& c, std::size_t workers) {
  ExperimentResult out;
  out.table.columns = result_columns(ExperimentKind::kBiasDecay);
  out.plot = {"n", "bias", "k", true, "Absolute bias of the prediction"};
  const ReplicationPlan plan = plan_from(c, false);
  const double floor_variance = c.model.regression.min_variance(c.model.density.support());
  for (std::size_t ni = 0; ni < plan.intensities.size(); ++ni) {
    const auto cells = run_replications_all_k(plan, ni, workers);
    for (const RawMatrix& cell : cells) {
      note_empty(out, cell);
      for (std::size_t j = 0; j < cell.m; ++j) {
        const std::vector<double> preds = cell.prediction_column(j);
        const std::vector<std::size_t> L = cell.L_column(j);
        const double r0 = c.model.regression.r0(c.x0s[j]);
        const BiasEstimate b = estimate_bias(preds, r0);
        const VarianceFloor vf = variance_floor_check(preds, floor_variance, L);
        double recip = 0.0;
        double ssw = 0.0;
        std::size_t nonempty = 0;
        for (std::size_t r = 0; r < cell.reps; ++r) {
          ssw += cell.sum_sq_weights[r * cell.m + j];
          if (L[r] > 0) {
            recip += 1.0 / as_real(L[r]);
            ++nonempty;
          }
        }
        recip = nonempty ? recip / as_real(nonempty) : kNaN;
        ssw /= as_real(cell.reps);
        const double ratio = vf.floor > 0.0 ? vf.variance / vf.floor : kNaN;
        out.table.rows.push_back({cell.n, as_real(cell.k), as_real(j), as_real(cell.reps),
                                  b.signed_bias + r0, r0, b.bias, b.se, vf.variance,
                                  vf.variance_se, vf.floor, vf.mean_L, recip, ssw, ratio,
                                  vf.pass ? 1.0 : 0.0});
      }
    }
  }
  return out;
}

// ----------------------------------------------------- tail-calibration

struct CalibrationCase {
  double n = 0.0;
  std::size_t k = 1;
  Point x0, x, y;
};

Point lerp(Coords a, Coords b, double s) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * (b[i] - a[i]);
  return Point{std::move(out)};
}

// Random (x0, x, y, k) with y inside Rect(x0, x); x is pulled towards x0
// until the expected count in the box lands in a range where the
// membership probability is neither 0 nor 1 to many digits.
CalibrationCase make_case(const ExperimentConfig& c, std::size_t index) {
  CounterEngine eng(SeedSpec{c.seed, index}, Lane::kAux);
  const DensitySpec& g = c.model.density;
  const std::size_t d = g.dim();
  CalibrationCase out;
  out.n = c.intensities[index % c.intensities.size()];
  out.k = 1 + static_cast<std::size_t>(eng.uniform01() * as_real(c.max_k));
  out.k = std::min(out.k, c.max_k);
  std::vector<double> x0(d), x(d);
  draw_point(g, eng, x0.data());
  draw_point(g, eng, x.data());
  const double kk = as_real(out.k);
  const double target =
      std::max(0.25, kk + (2.0 * eng.uniform01() - 1.0) * (2.0 * std::sqrt(kk) + 1.0));
  double lo = 0.0, hi = 1.0;
  if (rect_lambda(g, out.n, x0, x) > target) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (rect_lambda(g, out.n, x0, lerp(x0, x, mid)) > target) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }
  out.x0 = Point{x0};
  out.x = lerp(x0, x, hi);
  std::vector<double> y(d);
  for (std::size_t i = 0; i < d; ++i) {
    y[i] = out.x0.coords[i] + eng.uniform01() * (out.x.coords[i] - out.x0.coords[i]);
  }
  out.y = Point{std::move(y)};
  return out;
}

ExperimentResult run_tail_calibration(const ExperimentConfig& c, std::size_t workers) {
  ExperimentResult out;
  out.table.columns = result_columns(ExperimentKind::kTailCalibration);
  out.plot = {"lambda", "empirical", "", false, "Simulated against exact membership probability"};
  const DensitySpec& g = c.model.density;
  std::vector<std::vector<double>> rows(c.cases);
  parallel_for(c.cases, workers == 0 ? default_workers() : workers, [&](std::size_t ci) {
    const CalibrationCase cs = make_case(c, ci);
    const double lambda = rect_lambda(g, cs.n, cs.x0, cs.x);
    const double analytic = membership_prob(g, cs.n, cs.x0, cs.x, cs.y, cs.k);
    const double bound = tail_bound(g, cs.n, cs.x0, cs.x, cs.k);
    std::size_t hits = 0;
    const std::uint64_t case_seed = derive_seed(c.seed, ci + 1);
    for (std::size_t r = 0; r < c.draws; ++r) {
      // The region of x in the sample plus x is Rect(x0, x) iff fewer than
      // k sample points fall in that box.
      const PointConfig sample = sample_poisson_config(cs.n, g, {case_seed, r}, c.sampling);
      std::size_t inside = 0;
      for (std::size_t i = 0; i < sample.size() && inside < cs.k; ++i) {
        if (in_rect_between(cs.x0, cs.x, sample[i])) ++inside;
      }
      const bool member = inside < cs.k && in_rect_between(cs.x0, cs.x, cs.y);
      if (member) ++hits;
    }
    const double draws = as_real(c.draws);
    const double empirical = as_real(hits) / draws;
    const double se = std::sqrt(analytic * (1.0 - analytic) / draws);
    const double diff = empirical - analytic;
    const double z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : kNaN);
    const bool within = std::abs(diff) <= 3.0 * se;
    rows[ci] = {as_real(ci), cs.n, as_real(cs.k), lambda, analytic, empirical, se, z,
                within ? 1.0 : 0.0, bound, bound >= analytic ? 1.0 : 0.0};
  });
  double within = 0.0;
  double dominated = 0.0;
  for (auto& row : rows) {
    within += row[8];
    dominated += row[10];
    out.table.rows.push_back(std::move(row));
  }
  out.summary["cases"] = as_real(c.cases);
  out.summary["within_3se"] = within;
  out.summary["bound_dominates"] = dominated;
  return out;
}

// -------------------------------------------------------- concentration

ExperimentResult run_concentration(const ExperimentConfig& c, std::size_t workers) {
  ExperimentResult out;
  out.table.columns = result_columns(ExperimentKind::kConcentration);
  out.plot = {"n", "fraction", "k", true, "P(L <= E L / 2)"};
  const ReplicationPlan plan = plan_from(c, true);
  for (std::size_t ni = 0; ni < plan.intensities.size(); ++ni) {
    const auto cells = run_replications_all_k(plan, ni, workers);
    for (const RawMatrix& cell : cells) {
      note_empty(out, cell);
      for (std::size_t j = 0; j < cell.m; ++j) {
        const Concentration conc = concentration_check(cell.L_column(j), cell.k);
        if (conc.skipped) out.notes.push_back(cell_label(cell.n, cell.k) + ": " + conc.notice);
        out.table.rows.push_back({cell.n, as_real(cell.k), as_real(j), as_real(cell.reps),
                                  conc.mean_L, conc.skipped ? kNaN : conc.fraction,
                                  conc.skipped ? kNaN : conc.se, conc.skipped ? 1.0 : 0.0});
      }
    }
  }
  return out;
}

// ------------------------------------------------------ lower-bound-fit

ExperimentResult run_lower_bound_fit(const ExperimentConfig& c) {
  ExperimentResult out;
  out.table.columns = result_columns(ExperimentKind::kLowerBoundFit);
  out.plot = {"k", "estimate", "", true, "Double psi integral against k"};
  const double n = c.intensities.front();
  LowerBoundOptions opts;
  opts.dim = c.model.dim();
  opts.outer_samples = c.outer_samples;
  opts.inner_samples = c.inner_samples;
  opts.seed = c.seed;
  const LowerBoundFit fit = lower_bound_exponent_fit(n, c.ks, c.t, c.alpha, opts);
  for (std::size_t i = 0; i < c.ks.size(); ++i) {
    out.table.rows.push_back(
        {n, as_real(c.ks[i]), c.t, c.alpha, fit.estimates[i], fit.std_errors[i]});
  }
  out.summary["exponent"] = fit.exponent;
  out.summary["expected_exponent"] = c.t + 1.0;
  return out;
}

// ----------------------------------------------------- assumption-audit

ExperimentResult run_assumption_audit(const ExperimentConfig& c) {
  ExperimentResult out;
  out.table.columns = result_columns(ExperimentKind::kAssumptionAudit);
  out.plot = {"instance", "collapsed", "", false, "Regions collapsed by the probe"};
  const DensitySpec& g = c.model.density;
  const std::size_t d = g.dim();
  std::size_t r1 = 0, r3 = 0, r4 = 0;
  for (std::size_t inst = 0; inst < c.instances; ++inst) {
    CounterEngine eng(SeedSpec{c.seed, inst}, Lane::kAux);
    const std::size_t npts =
        std::min(c.max_points, 1 + static_cast<std::size_t>(eng.uniform01() * as_real(c.max_points)));
    const std::size_t k =
        std::min(c.max_k, 1 + static_cast<std::size_t>(eng.uniform01() * as_real(c.max_k)));
    // Every fourth instance lives on a coarse lattice so that boundary ties
    // of the closed rectangles are exercised.
    const bool lattice = inst % 4 == 3;
    auto snap = [&](double* p) {
      if (!lattice) return;
      for (std::size_t i = 0; i < d; ++i) {
        const double step = (g.hi[i] - g.lo[i]) / 8.0;
        p[i] = g.lo[i] + std::round((p[i] - g.lo[i]) / step) * step;
      }
    };
    std::vector<double> flat(npts * d);
    for (std::size_t j = 0; j < npts; ++j) {
      draw_point(g, eng, flat.data() + j * d);
      snap(flat.data() + j * d);
    }
    const PointConfig config(d, std::move(flat));
    std::vector<double> x0(d), probe(d);
    draw_point(g, eng, x0.data());
    snap(x0.data());
    if (eng.uniform01() < 0.5) {
      // Probe inside the box of a random configuration point.
      const std::size_t j = std::min(npts - 1, static_cast<std::size_t>(eng.uniform01() * as_real(npts)));
      for (std::size_t i = 0; i < d; ++i) {
        probe[i] = x0[i] + eng.uniform01() * (config[j][i] - x0[i]);
      }
    } else {
      draw_point(g, eng, probe.data());
    }
    snap(probe.data());
    const AssumptionReport rep = check_assumptions(config, x0, k, probe);
    r1 += rep.r1_violations;
    r3 += rep.r3_violations;
    r4 += rep.r4_violations;
    for (const std::string& f : rep.findings) {
      out.notes.push_back("instance " + std::to_string(inst) + ": " + f);
    }
    out.table.rows.push_back({as_real(inst), as_real(npts), as_real(k),
                              as_real(rep.points_checked), as_real(rep.r1_violations),
                              as_real(rep.r3_violations), as_real(rep.r4_violations),
                              as_real(rep.collapsed_regions)});
  }
  out.summary["instances"] = as_real(c.instances);
  out.summary["r1_violations"] = as_real(r1);
  out.summary["r3_violations"] = as_real(r3);
  out.summary["r4_violations"] = as_real(r4);
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << text;
  os.close();
  if (!os) throw IoError("error while writing '" + path.string() + "'");
}

}  // namespace

std::size_t ResultTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidArgument("no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<std::string> result_columns(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kCltRate:
      return {"n", "k", "m", "reps", "d_k", "d_k_se", "rect_k", "sigma_min_eig", "mean_L",
              "empty_samples"};
    case ExperimentKind::kPnnCount:
      return {"n", "k", "d", "x0_index", "reps", "mean_L", "se_L", "var_L",
              "ratio_to_klogd", "recip_moment", "recip_product", "q05_L", "q50_L", "q95_L"};
    case ExperimentKind::kBiasDecay:
      return {"n", "k", "x0_index", "reps", "mean_prediction", "r0", "bias", "bias_se",
              "variance", "variance_se", "variance_floor", "mean_L", "recip_moment",
              "mean_sum_sq_weights", "floor_ratio", "floor_pass"};
    case ExperimentKind::kTailCalibration:
      return {"case", "n", "k", "lambda", "analytic", "empirical", "se", "z", "within_3se",
              "tail_bound", "bound_dominates"};
    case ExperimentKind::kConcentration:
      return {"n", "k", "x0_index", "reps", "mean_L", "fraction", "fraction_se", "skipped"};
    case ExperimentKind::kLowerBoundFit:
      return {"n", "k", "t", "alpha", "estimate", "se"};
    case ExperimentKind::kAssumptionAudit:
      return {"instance", "points", "k", "points_checked", "r1_violations", "r3_violations",
              "r4_violations", "collapsed"};
  }
  return {};
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t workers) {
  for (const Finding& f : validate_config(config)) {
    if (f.level == Finding::Level::kError) throw InvalidArgument(f.message);
  }
  if (workers == 0) workers = default_workers();
  switch (config.kind) {
    case ExperimentKind::kCltRate:
      return run_clt_rate(config, workers);
    case ExperimentKind::kPnnCount:
      return run_pnn_count(config, workers);
    case ExperimentKind::kBiasDecay:
      return run_bias_decay(config, workers);
    case ExperimentKind::kTailCalibration:
      return run_tail_calibration(config, workers);
    case ExperimentKind::kConcentration:
      return run_concentration(config, workers);
    case ExperimentKind::kLowerBoundFit:
      return run_lower_bound_fit(config);
    case ExperimentKind::kAssumptionAudit:
      return run_assumption_audit(config);
  }
  throw InvalidArgument("unhandled experiment");
}

std::string format_csv(const ResultTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += (i ? "," : "") + table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string render_svg(const ResultTable& table, const PlotSpec& spec) {
  constexpr double kW = 640, kH = 420, kL = 70, kR = 20, kT = 40, kB = 50;
  const std::size_t xi = table.column(spec.x);
  const std::size_t yi = table.column(spec.y);
  const bool has_series = !spec.series.empty();
  const std::size_t si = has_series ? table.column(spec.series) : 0;

  auto xval = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  std::map<double, std::vector<std::pair<double, double>>> lines;
  for (const auto& row : table.rows) {
    const double x = xval(row[xi]);
    const double y = row[yi];
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
    lines[has_series ? row[si] : 0.0].emplace_back(x, y);
  }
  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << spec.title << "</text>\n";
  if (lines.empty()) {
    os << "<text x=\"" << kW / 2 << "\" y=\"" << kH / 2
       << "\" text-anchor=\"middle\">no finite values</text>\n</svg>\n";
    return os.str();
  }
  if (x1 == x0) { x0 -= 0.5; x1 += 0.5; }
  if (y1 == y0) { y0 -= 0.5; y1 += 0.5; }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); };
  auto py = [&](double y) { return kH - kB - (y - y0) / (y1 - y0) * (kH - kT - kB); };
  os << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR << "\" y2=\""
     << kH - kB << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\"" << kH - kB
     << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0;
    const double yv = y0 + (y1 - y0) * t / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << kH - kB + 16 << "\" text-anchor=\"middle\">"
       << (spec.log_x ? std::pow(10.0, xv) : xv) << "</text>\n";
    os << "<text x=\"" << kL - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << yv
       << "</text>\n";
  }
  os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">" << spec.x
     << (spec.log_x ? " (log scale)" : "") << "</text>\n";
  os << "<text x=\"16\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 16 " << kH / 2
     << ")\" text-anchor=\"middle\">" << spec.y << "</text>\n";
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::size_t li = 0;
  for (auto& [key, pts] : lines) {
    std::sort(pts.begin(), pts.end());
    const char* color = kColors[li % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    for (const auto& [x, y] : pts) {
      os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color
         << "\"/>\n";
    }
    if (has_series) {
      os << "<text x=\"" << kW - kR - 60 << "\" y=\"" << kT + 14 * li << "\" fill=\"" << color
         << "\">" << spec.series << " = " << key << "</text>\n";
    }
    ++li;
  }
  os << "</svg>\n";
  return os.str();
}

void write_artifacts(const ExperimentConfig& config, const ExperimentResult& result,
                     double wall_seconds, std::size_t workers) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  write_file(dir / "results.csv", format_csv(result.table));

  nlohmann::ordered_json meta;
  meta["experiment"] = experiment_name(config.kind);
  meta["version"] = kVersion;
  meta["seed"] = config.seed;
  meta["config"] = config.resolved;
  meta["columns"] = result.table.columns;
  meta["rows"] = result.table.rows.size();
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& [k, v] : result.summary) summary[k] = v;
  meta["summary"] = summary;
  meta["notes"] = result.notes;
  meta["numerical_failures"] = result.numerical_failures;
  meta["workers"] = workers;
  meta["wall_time_seconds"] = wall_seconds;
  meta["finished_utc"] = utc_timestamp();
  write_file(dir / "meta.json", meta.dump(2) + "\n");

  if (config.plot) write_file(dir / "plot.svg", render_svg(result.table, result.plot));
}

}  // namespace kpnn
