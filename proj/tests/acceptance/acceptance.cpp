// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "lightray/experiment.hpp"
#include "lightray/experiment_config.hpp"
#include "lightray/forward_model.hpp"
#include "lightray/phantom.hpp"
#include "lightray/priors.hpp"
#include "lightray/random.hpp"
#include "lightray/solvers.hpp"
#include "lightray/spectral.hpp"

using namespace lightray;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Pinned tolerances and protocol constants.
constexpr double kSliceRelTol = 0.01;          // C1
constexpr double kSliceMaxSeconds = 30.0;      // C1
constexpr int kSlicePairs = 50;                // C1
constexpr double kAdjointTol = 1e-10;          // C2
constexpr int kAdjointPairs = 20;              // C2
constexpr double kHybridTol = 1e-8;            // C3
constexpr double kFistaTol = 1e-8;             // C4
constexpr double kLassoTol = 1e-8;             // C4
constexpr double kGenTikhonovTol = 1e-6;       // C5
constexpr double kCovarianceTol = 1e-10;       // C5
constexpr double kTimeLikeTol = 1e-8;          // C8
constexpr double kQuadratureTol = 0.01;        // C9
constexpr int kStabilityTrials = 100;          // C9
constexpr double kLineTol = 1e-9;              // C10
constexpr double kGainTarget = 0.5;            // C10
constexpr double kGainTol = 0.15;              // C10
constexpr std::array<std::uint64_t, 5> kSeeds{1, 2, 3, 4, 5};
constexpr std::array<double, 3> kSpeeds{0.0, 1.0, 1.5};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void progress(const std::string& msg) { std::cerr << "  .. " << msg << std::endl; }

Eigen::VectorXd normal_vector(Eigen::Index n, std::uint64_t seed) { return CounterRng(seed).normal_vector(n); }

Eigen::MatrixXd normal_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  CounterRng rng(seed);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.normal();
  }
  return m;
}

SolverOptions monitor_only(int iters) {
  SolverOptions o;
  o.max_iters = iters;
  o.dp_enabled = false;
  return o;
}

// ---------------------------------------------------------------------------
// Cached desk-scale experiment runs shared by C6, C7, C8 and C11.

ExperimentConfig example1_desk(double c, std::uint64_t seed) { return desk_example1(c, seed); }

ExperimentConfig example3_desk(std::uint64_t seed) {
  ExperimentConfig cfg = desk_example1(0.0, seed);
  cfg.phantom = Phantom::appearing_ball(0.05, 1.2, 2.8);
  MethodConfig tik;
  tik.method = Method::Tikhonov;
  tik.options.dp_enabled = false;
  MethodConfig gen = tik;
  gen.method = Method::GenTikhonov;
  cfg.solvers = {tik, gen};
  return cfg;
}

class RunCache {
 public:
  const ExperimentRun& example1(double c, std::uint64_t seed) {
    const auto key = std::make_tuple(1, c, seed);
    auto it = runs_.find(key);
    if (it == runs_.end()) {
      progress(fmt("example 1 desk run c=%.1f seed=%llu", c, static_cast<unsigned long long>(seed)));
      it = runs_.emplace(key, run(example1_desk(c, seed))).first;
    }
    return it->second;
  }

  const ExperimentRun& example3(std::uint64_t seed) {
    const auto key = std::make_tuple(3, 0.0, seed);
    auto it = runs_.find(key);
    if (it == runs_.end()) {
      progress(fmt("example 3 desk run seed=%llu", static_cast<unsigned long long>(seed)));
      it = runs_.emplace(key, run(example3_desk(seed))).first;
    }
    return it->second;
  }

 private:
  static ExperimentRun run(const ExperimentConfig& cfg) {
    RunOptions opts;
    opts.write_artifacts = false;
    return run_experiment(cfg, opts);
  }

  std::map<std::tuple<int, double, std::uint64_t>, ExperimentRun> runs_;
};

double min_rre(const ExperimentRun& run, Method m) {
  const auto* r = run.report.find(to_string(m));
  return r ? r->rre_min : NAN;
}

// ---------------------------------------------------------------------------

Outcome c1_fourier_slice() {
  const auto start = std::chrono::steady_clock::now();
  const GridField f = GridField::sample({128, 128, 128}, {-8, -8, -8}, {16, 16, 16}, [](double t, double x, double y) {
    return std::exp(-(t * t + x * x + y * y) / 2);
  });
  CounterRng rng(2024);
  double worst = 0.0;
  for (int i = 0; i < kSlicePairs; ++i) {
    const double r = 4.0 * rng.uniform(), phi = 2 * kPi * rng.uniform(), psi = 2 * kPi * rng.uniform();
    const Eigen::Vector2d xi(r * std::cos(phi), r * std::sin(phi));
    const Eigen::Vector2d v(std::cos(psi), std::sin(psi));
    const double tau = v.dot(xi);
    const double exact = std::pow(2 * kPi, 1.5) * std::exp(-(tau * tau + xi.squaredNorm()) / 2);
    worst = std::max(worst, std::abs(fourier_slice(f, xi, v) - exact) / exact);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= kSliceRelTol && secs <= kSliceMaxSeconds,
          fmt("max rel err %.2e over %d pairs (tol %.0e), %.1f s (limit %.0f s)", worst, kSlicePairs, kSliceRelTol, secs,
              kSliceMaxSeconds)};
}

Outcome c2_adjoint() {
  const SpaceTimeGrid g = build_grid(25, {-3, 3}, 10, {0, 4});
  const SparseOperator A = assemble_operator(g, enumerate_rays(g, RayPolicy::null_shell()));
  double worst = 0.0;
  for (int i = 0; i < kAdjointPairs; ++i) {
    const Eigen::VectorXd u = normal_vector(A.cols(), 100 + i);
    const Eigen::VectorXd w = normal_vector(A.rows(), 200 + i);
    const Eigen::VectorXd Au = A.apply(u);
    worst = std::max(worst, std::abs(Au.dot(w) - u.dot(A.apply_adjoint(w))) / (Au.norm() * w.norm()));
  }
  return {worst <= kAdjointTol, fmt("%lld x %lld operator, max scaled gap %.2e (tol %.0e)",
                                    static_cast<long long>(A.rows()), static_cast<long long>(A.cols()), worst,
                                    kAdjointTol)};
}

Outcome c3_hybrid_oracle() {
  const Eigen::MatrixXd M = normal_matrix(30, 20, 31);
  const Eigen::VectorXd b = normal_vector(30, 32);
  double worst = 0.0;
  for (double lambda : {1e-3, 1.0, 10.0}) {
    SolverOptions o = monitor_only(20);
    o.lambda_rule = LambdaRule::fixed(lambda);
    const ReconResult r = hybrid_tikhonov(DenseOperator(M), Observation::from_data(b, 0.0), nullptr, o);
    const Eigen::VectorXd direct =
        (M.transpose() * M + lambda * Eigen::MatrixXd::Identity(20, 20)).ldlt().solve(M.transpose() * b);
    worst = std::max(worst, (r.x_final - direct).norm() / direct.norm());
  }
  return {worst <= kHybridTol, fmt("max rel diff %.2e at k=20 (tol %.0e)", worst, kHybridTol)};
}

Outcome c4_prox_fista() {
  // 1D brute-force prox on 10^4 points over [-5, 5].
  const int n = 10000;
  const double h = 10.0 / (n - 1);
  CounterRng rng(41);
  double prox_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const double x = -4 + 8 * rng.uniform(), t = 2 * rng.uniform();
    double best = 0, best_val = INFINITY;
    for (int i = 0; i < n; ++i) {
      const double z = -5 + i * h;
      const double v = (z - x) * (z - x) + 2 * t * std::abs(z);
      if (v < best_val) best_val = v, best = z;
    }
    prox_err = std::max(prox_err, std::abs(shrink(Eigen::VectorXd::Constant(1, x), t)[0] - best));
  }
  const bool prox_ok = prox_err <= h;

  const Eigen::VectorXd b = normal_vector(12, 42);
  SolverOptions o = monitor_only(500);
  o.stagnation_tol = 0.0;
  const ReconResult fi = fista(DenseOperator(Eigen::MatrixXd::Identity(12, 12)), Observation::from_data(b, 0.0), 0.8,
                               nullptr, o);
  const double id_err = (fi.x_final - shrink(b, 0.4)).norm();

  const Eigen::MatrixXd A = normal_matrix(5, 3, 43);
  const Eigen::VectorXd y = normal_vector(5, 44);
  const double lambda = 0.7;
  const double L = 2.0 * std::pow(Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0), 2);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  for (int i = 0; i < 1000000; ++i) x = shrink(x - 2.0 * A.transpose() * (A * x - y) / L, lambda / L);
  auto obj = [&](const Eigen::VectorXd& z) { return (A * z - y).squaredNorm() + lambda * z.lpNorm<1>(); };
  const ReconResult lasso = fista(DenseOperator(A), Observation::from_data(y, 0.0), lambda, nullptr, monitor_only(200));
  const double lasso_gap = std::abs(obj(lasso.x_final) - obj(x));

  return {prox_ok && id_err <= kFistaTol && lasso_gap <= kLassoTol,
          fmt("prox err %.1e (grid h %.1e); identity err %.1e (tol %.0e); lasso gap %.1e (tol %.0e)", prox_err, h,
              id_err, kFistaTol, lasso_gap, kLassoTol)};
}

Outcome c5_gen_tikhonov() {
  const SpaceTimeGrid g = build_grid(6, {-3, 3}, 4, {0, 4});
  const SparseOperator A = assemble_operator(g, enumerate_rays(g, RayPolicy::null_shell()));
  const MaternParams prior{1.5, 0.3, 1.0};
  const auto n = static_cast<Eigen::Index>(g.size());
  auto coords = [&](Eigen::Index i) {
    const auto k = i / 36, s = i % 36;
    return Eigen::Vector3d((s % 6) / 5.0, (s / 6) / 5.0, k / 4.0);
  };
  Eigen::MatrixXd Qd(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) Qd(i, j) = matern_kernel((coords(i) - coords(j)).norm(), prior);
  }
  const CovarianceOperator Q = build_covariance_operator(g, prior);
  double cov_err = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cov_err = std::max(cov_err, (Q.apply(Eigen::VectorXd::Unit(n, i)) - Qd.col(i)).cwiseAbs().maxCoeff());
  }

  const Eigen::VectorXd xt = rasterize_phantom(Phantom::translating_circle(0.05, 0.0), g);
  const Observation obs = add_noise(A.apply(xt), 1.0, 5);
  const double lambda = 0.05;
  SolverOptions o = monitor_only(static_cast<int>(n) + 5);
  o.lambda_rule = LambdaRule::fixed(lambda);
  const ReconResult r = gen_tikhonov(A, obs, Q, &xt, o);
  const Eigen::MatrixXd Ad = A.to_dense();
  // (A^T A + lambda Q^{-1}) x = A^T b, multiplied through by Q to avoid forming Q^{-1}.
  const Eigen::VectorXd direct = (Qd * Ad.transpose() * Ad + lambda * Eigen::MatrixXd::Identity(n, n))
                                     .partialPivLu()
                                     .solve(Qd * Ad.transpose() * obs.b);
  const double gen_err = (r.x_final - direct).norm() / direct.norm();
  return {gen_err <= kGenTikhonovTol && cov_err <= kCovarianceTol,
          fmt("gen-tikhonov rel diff %.2e after %zu steps (tol %.0e); covariance max err %.2e (tol %.0e)", gen_err,
              r.history.size(), kGenTikhonovTol, cov_err, kCovarianceTol)};
}

Outcome c6_semiconvergence(RunCache& cache, std::vector<std::string>& info) {
  int semi = 0, dp_fired = 0;
  std::ostringstream s;
  for (auto seed : kSeeds) {
    const auto& lw = cache.example1(0.0, seed).find(Method::Landweber)->result;
    const int m = *lw.min_rre_iter;
    const int last = static_cast<int>(lw.history.size());
    const bool interior = m > 1 && m < last && lw.record(m + 1).rre > lw.record(m).rre &&
                          lw.history.back().rre > lw.record(m).rre;
    semi += interior;
    const bool fired = lw.dp_iter && *lw.dp_iter < 400;
    dp_fired += fired;
    s << " s" << seed << ":min@" << m << (interior ? "" : "(edge)") << ",dp@"
      << (lw.dp_iter ? std::to_string(*lw.dp_iter) : "none");
  }
  for (Method other : {Method::Fista, Method::Tikhonov}) {
    std::string its;
    for (auto seed : kSeeds) {
      const auto& r = cache.example1(0.0, seed).find(other)->result;
      its += " " + (r.dp_iter ? std::to_string(*r.dp_iter) : std::string("none"));
    }
    info.push_back("C6 c=0 " + std::string(to_string(other)) + " DP iteration per seed:" + its);
  }
  return {semi >= 4 && dp_fired == static_cast<int>(kSeeds.size()),
          fmt("interior minimum %d/5 (need 4), DP fired %d/5 (need 5);", semi, dp_fired) + s.str()};
}

Outcome c7_method_ordering(RunCache& cache) {
  bool ok = true;
  std::ostringstream s;
  for (double c : kSpeeds) {
    int wins = 0;
    for (auto seed : kSeeds) {
      const auto& run = cache.example1(c, seed);
      const double f = min_rre(run, Method::Fista);
      wins += f < min_rre(run, Method::Landweber) && f < min_rre(run, Method::Tikhonov);
    }
    ok = ok && wins >= 4;
    s << fmt("c=%.1f fista best %d/5; ", c, wins);
  }
  for (Method m : {Method::Landweber, Method::Fista, Method::Tikhonov}) {
    int mono = 0;
    for (auto seed : kSeeds) {
      const double a = min_rre(cache.example1(0.0, seed), m);
      const double b = min_rre(cache.example1(1.0, seed), m);
      const double c = min_rre(cache.example1(1.5, seed), m);
      mono += a < b && b < c;
    }
    ok = ok && mono >= 4;
    s << to_string(m) << " monotone in c " << mono << "/5; ";
  }
  return {ok, s.str() + "(need 4/5 each)"};
}

/// ||(x - x_true)|_M|| / ||x_true|_M|| over nodes within `band` of the circle
/// of radius 2 centred at (c t, 0), split by angle from the x axis.
std::pair<double, double> masked_rre(const ExperimentRun& run, const Eigen::VectorXd& x, double c, double band) {
  const SpaceTimeGrid& g = run.grid;
  double err_lr = 0, ref_lr = 0, err_tb = 0, ref_tb = 0;
  for (int k = 0; k < g.planes(); ++k) {
    const double cx = c * g.plane_times()[k];
    for (int iy = 0; iy < g.nx(); ++iy) {
      for (int ix = 0; ix < g.nx(); ++ix) {
        const double dx = g.node(ix) - cx, dy = g.node(iy);
        if (std::abs(std::hypot(dx, dy) - 2.0) > band) continue;
        const auto i = static_cast<Eigen::Index>(g.index(ix, iy, k));
        const double e = x[i] - run.x_true[i];
        const double t = run.x_true[i];
        if (std::abs(dx) >= std::abs(dy)) {
          err_lr += e * e;
          ref_lr += t * t;
        } else {
          err_tb += e * e;
          ref_tb += t * t;
        }
      }
    }
  }
  return {std::sqrt(err_lr / ref_lr), std::sqrt(err_tb / ref_tb)};
}

Outcome c8_timelike(RunCache& cache, std::vector<std::string>& info) {
  GridField f({32, 32, 32}, {-4, -4, -4}, {8, 8, 8});
  CounterRng rng(81);
  for (double& v : f.values()) v = rng.normal();
  f = apply_fourier_multiplier(f, [](double tau, double xi) { return std::abs(tau) > 1.2 * xi ? 1.0 : 0.0; });
  const double ratio = apply_normal_multiplier(f, 1).norm() / f.norm();

  const double band = 0.5;
  int lr_worse = 0;
  std::ostringstream s;
  for (auto seed : kSeeds) {
    const auto& run = cache.example1(0.0, seed);
    const auto [lr, tb] = masked_rre(run, run.find(Method::Landweber)->result.x_dp, 0.0, band);
    lr_worse += lr > tb;
    s << fmt(" s%llu:%.4f/%.4f", static_cast<unsigned long long>(seed), lr, tb);
  }
  for (double c : {1.5}) {
    for (Method m : {Method::Landweber, Method::Fista, Method::Tikhonov}) {
      int count = 0;
      std::ostringstream d;
      for (auto seed : kSeeds) {
        const auto& run = cache.example1(c, seed);
        const auto& res = run.find(m)->result;
        const auto [lr, tb] = masked_rre(run, res.x_dp.size() ? res.x_dp : res.x_best, c, band);
        count += lr > tb;
        d << fmt(" %.3f/%.3f", lr, tb);
      }
      info.push_back(fmt("C8 c=%.1f %s DP iterate: left/right masked RRE > top/bottom in %d/5 seeds;", c,
                         std::string(to_string(m)).c_str(), count) +
                     d.str());
    }
  }
  return {ratio <= kTimeLikeTol && lr_worse >= 4,
          fmt("time-like band ||Nf||/||f|| = %.1e (tol %.0e); c=0 Landweber DP masked RRE left/right > top/bottom in "
              "%d/5 seeds (need 4), lr/tb:",
              ratio, kTimeLikeTol, lr_worse) +
              s.str()};
}

Outcome c9_stability(std::vector<std::string>& info) {
  std::vector<double> mins;
  bool above = true;
  std::ostringstream s;
  for (double delta : {0.1, 0.5}) {
    double quad = INFINITY;
    for (int i = 0; i < 20000; ++i) {
      const double u = (1.0 - delta) * i / 20000;
      quad = std::min(quad, stability_weight(u, 1.0, 3, CnConvention::SphereArea));
    }
    const StabilityEstimate e = estimate_stability_constant(3, delta, kStabilityTrials, 91);
    above = above && e.min_ratio >= (1.0 - kQuadratureTol) * std::sqrt(quad);
    mins.push_back(e.min_ratio);
    s << fmt("delta=%.1f min %.6f vs sqrt(inf) %.6f; ", delta, e.min_ratio, std::sqrt(quad));
  }
  const bool independent = std::abs(mins[0] - mins[1]) <= kQuadratureTol * mins[0];
  const StabilityEstimate two = estimate_stability_constant(2, 0.1, kStabilityTrials, 92);
  info.push_back(fmt("C9 n=2 delta=0.1: empirical min ratio %.4f, weight infimum sqrt %.4f (SphereArea convention)",
                     two.min_ratio, two.analytic_infimum));
  return {above && independent && two.min_ratio > 0.0,
          s.str() + fmt("delta-independent: %s; n=2 constant %.4f > 0", independent ? "yes" : "no", two.min_ratio)};
}

Outcome c10_artefacts(std::vector<std::string>& info) {
  const double r = 1.0 / std::sqrt(2.0);
  std::set<std::pair<int, int>> seen;
  double worst = 0.0;
  for (double st : {1.0, -1.0}) {
    for (double sx : {1.0, -1.0}) {
      const ArtefactLine l = predict_artefacts(st * r, Eigen::Vector2d(sx * r, 0.0), st * r, Eigen::Vector2d(sx * r, 0));
      // In the (t, x) projection the line is t' - s x' = c with s = 1 / velocity.
      const double s = 1.0 / l.velocity[0];
      const double c = l.t - s * l.x[0];
      worst = std::max({worst, std::abs(std::abs(s) - 1.0), std::abs(std::abs(c) - std::sqrt(2.0)),
                        std::abs(l.velocity[1])});
      seen.insert({s > 0 ? 1 : -1, c > 0 ? 1 : -1});
    }
  }
  const bool lines_ok = worst <= kLineTol && seen.size() == 4;

  const GridField probe = null_plane_probe({64, 64, 64}, 8.0, 0.05);
  const auto rows = smoothing_order_check(probe, 2);
  const double g1 = rows[1].gain, g2 = rows[2].gain - rows[1].gain;
  const bool gains_ok = std::abs(g1 - kGainTarget) <= kGainTol && std::abs(g2 - kGainTarget) <= kGainTol;
  SmoothingOrderOptions space;
  space.direction = Eigen::Vector3d(0.3, 1.0, 0.0);
  const auto srows = smoothing_order_check(probe, 2, space);
  info.push_back(fmt("C10 space-like direction gains j=1 %.3f, j=2 %.3f (elliptic order 1 per power)", srows[1].gain,
                     srows[2].gain));
  return {lines_ok && gains_ok,
          fmt("lines t-+x=+-sqrt2: %zu distinct, max param err %.1e (tol %.0e); per-power gain j=1 %.3f, j=2 %.3f "
              "(target %.2f +- %.2f)",
              seen.size(), worst, kLineTol, g1, g2, kGainTarget, kGainTol)};
}

Outcome c11_example3(RunCache& cache) {
  const SpaceTimeGrid g = build_grid(51, {-3, 3}, 20, {0, 4});
  const StateVector x = rasterize_phantom(Phantom::appearing_ball(0.05, 1.2, 2.8), g);
  const auto per = static_cast<Eigen::Index>(g.nodes_per_plane());
  std::string empty;
  bool slices_ok = true;
  for (int k = 0; k < 20; ++k) {
    const bool zero = x.segment(k * per, per).cwiseAbs().maxCoeff() == 0.0;
    const bool should = k < 6 || k >= 14;
    slices_ok = slices_ok && zero == should;
    if (zero) empty += (empty.empty() ? "" : ",") + std::to_string(k + 1);
  }
  int wins = 0;
  std::ostringstream s;
  for (auto seed : kSeeds) {
    const auto& run = cache.example3(seed);
    const double gen = min_rre(run, Method::GenTikhonov), hyb = min_rre(run, Method::Tikhonov);
    wins += gen < hyb;
    s << fmt(" %.4f/%.4f", gen, hyb);
  }
  return {slices_ok && wins >= 3, "empty slices {" + empty + "}; gen < hybrid min-RRE in " + std::to_string(wins) +
                                      "/5 seeds (need 3), gen/hybrid:" + s.str()};
}

void full_scale_report() {
  // Reference full-scale minimum RREs (Landweber, FISTA, Tikhonov) for c = 0, 1, 1.5.
  const std::map<double, std::array<double, 3>> table{
      {0.0, {0.1282, 0.0728, 0.1275}}, {1.0, {0.1591, 0.0955, 0.1594}}, {1.5, {0.1950, 0.1198, 0.1957}}};
  for (const auto& [c, ref] : table) {
    ExperimentConfig cfg = desk_example1(c, 1);
    cfg.grid.nx = 51;
    cfg.grid.planes = 20;
    RunOptions opts;
    opts.write_artifacts = false;
    progress(fmt("full-scale example 1 c=%.1f", c));
    const ExperimentRun run = run_experiment(cfg, opts);
    const std::array<Method, 3> methods{Method::Landweber, Method::Fista, Method::Tikhonov};
    for (std::size_t i = 0; i < 3; ++i) {
      const double got = min_rre(run, methods[i]);
      std::cout << fmt("INFO  full-scale c=%.1f %-10s min RRE %.4f vs table %.4f (%s the +-0.05 band), A %lld x %lld",
                       c, std::string(to_string(methods[i])).c_str(), got, ref[i],
                       std::abs(got - ref[i]) <= 0.05 ? "inside" : "outside", static_cast<long long>(run.A.rows()),
                       static_cast<long long>(run.A.cols()))
                << std::endl;
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only, expected_failures;
  bool full = false;
  std::string report_path;
  app.add_option("--report", report_path, "Also write the PASS/FAIL/INFO lines to this file");
  app.add_option("--only", only, "Run only these criterion numbers");
  app.add_option("--expect-fail", expected_failures,
                 "Criteria known to fail; their FAIL lines are still printed but do not set the exit status");
  app.add_flag("--full", full, "Also run the non-gating full-scale (51 x 51 x 20) comparison");
  CLI11_PARSE(app, argc, argv);

  RunCache cache;
  std::vector<std::string> info;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"fourier-slice", c1_fourier_slice},
      {"adjoint", c2_adjoint},
      {"hybrid-tikhonov-oracle", c3_hybrid_oracle},
      {"prox-fista-oracles", c4_prox_fista},
      {"gen-tikhonov-oracle", c5_gen_tikhonov},
      {"semiconvergence-dp", [&] { return c6_semiconvergence(cache, info); }},
      {"method-ordering", [&] { return c7_method_ordering(cache); }},
      {"time-like-invisibility", [&] { return c8_timelike(cache, info); }},
      {"stability-constant", [&] { return c9_stability(info); }},
      {"artefact-geometry", [&] { return c10_artefacts(info); }},
      {"example3-empty-slices", [&] { return c11_example3(cache); }},
  };

  auto listed = [](const std::vector<int>& ids, int id) { return std::find(ids.begin(), ids.end(), id) != ids.end(); };
  std::ostringstream out;
  auto emit = [&](const std::string& line) {
    std::cout << line << std::endl;
    out << line << '\n';
  };
  int failed = 0, known = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !listed(only, id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool expected = listed(expected_failures, id);
    if (!o.pass) (expected ? known : failed) += 1;
    emit((o.pass ? "PASS" : "FAIL") + fmt("  C%-2d %-24s ", id, criteria[i].first.c_str()) + o.detail +
         fmt("  [%.1fs]", secs) + (expected ? (o.pass ? "  (listed as expected failure)" : "  (expected)") : ""));
  }
  for (const auto& line : info) emit("INFO  " + line);
  if (full) full_scale_report();
  emit(std::to_string(failed) + " unexpected failure(s), " + std::to_string(known) + " expected failure(s)");
  if (!report_path.empty()) std::ofstream(report_path) << out.str();
  return failed == 0 ? 0 : 1;
}
