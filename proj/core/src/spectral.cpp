#include "lightray/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <fftw3.h>

#include "fftw_util.hpp"
#include "lightray/error.hpp"
#include "lightray/random.hpp"
#include "lightray/raw_io.hpp"

namespace lightray {

namespace {

constexpr double kPi = std::numbers::pi;

using Spectrum = std::vector<std::complex<double>>;

void transform(const GridField& like, const fftw_complex* in, fftw_complex* out, int sign) {
  const auto d = like.dims();
  // Plan on scratch arrays so FFTW_ESTIMATE never touches caller data, then
  // execute on the real buffers through the new-array interface.
  detail::ComplexBuffer scratch_in(like.size());
  detail::ComplexBuffer scratch_out(like.size());
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_3d(d[0], d[2], d[1], scratch_in.data, scratch_out.data, sign, FFTW_ESTIMATE);
  }
  fftw_execute_dft(plan, const_cast<fftw_complex*>(in), out);
  std::lock_guard lock(detail::fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

/// Calls fn(index, tau, xi1, xi2) for every DFT coefficient.
template <typename Fn>
void for_each_frequency(const GridField& f, Fn&& fn) {
  const auto d = f.dims();
  std::vector<double> wt(d[0]), wx(d[1]), wy(d[2]);
  for (int m = 0; m < d[0]; ++m) wt[m] = f.frequency(0, m);
  for (int m = 0; m < d[1]; ++m) wx[m] = f.frequency(1, m);
  for (int m = 0; m < d[2]; ++m) wy[m] = f.frequency(2, m);
  for (int it = 0; it < d[0]; ++it) {
    for (int iy = 0; iy < d[2]; ++iy) {
      for (int ix = 0; ix < d[1]; ++ix) fn(f.index(it, ix, iy), wt[it], wx[ix], wy[iy]);
    }
  }
}

std::string join(const std::array<double, 3>& v) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << v[0] << ' ' << v[1] << ' ' << v[2];
  return os.str();
}

template <typename T>
std::array<T, 3> parse3(const std::map<std::string, std::string>& header, const std::string& key) {
  const auto it = header.find(key);
  require(it != header.end(), ErrorCode::Io, "grid field header lacks '" + key + "'");
  std::istringstream is(it->second);
  std::array<T, 3> out{};
  is >> out[0] >> out[1] >> out[2];
  require(!is.fail(), ErrorCode::Io, "malformed grid field header entry '" + key + "'");
  return out;
}

}  // namespace

FrequencyClass classify(double tau, double xi_norm, double rel_tol) {
  const double a = std::abs(tau);
  require(xi_norm >= 0.0, ErrorCode::InvalidArgument, "|xi| must be nonnegative");
  require(a > 0.0 || xi_norm > 0.0, ErrorCode::InvalidArgument, "the zero frequency has no causal class");
  if (std::abs(xi_norm - a) <= rel_tol * std::max(xi_norm, a)) return FrequencyClass::LightLike;
  return xi_norm > a ? FrequencyClass::SpaceLike : FrequencyClass::TimeLike;
}

FrequencyClass classify(const FrequencyPoint& p, double rel_tol) { return classify(p.tau, p.xi_norm(), rel_tol); }

double sphere_area(int d) {
  require(d >= 0, ErrorCode::InvalidArgument, "sphere dimension must be nonnegative");
  const double h = 0.5 * (d + 1);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

double cn_constant(int n, CnConvention convention) {
  require(n >= 2, ErrorCode::InvalidArgument, "dimension n must be >= 2");
  const double area = sphere_area(n - 2);
  return convention == CnConvention::SphereArea ? area : 2.0 * kPi * area;
}

double normal_symbol(double tau, double xi_norm, int n) {
  require(n >= 2, ErrorCode::InvalidArgument, "dimension n must be >= 2");
  require(xi_norm >= 0.0, ErrorCode::InvalidArgument, "|xi| must be nonnegative");
  const double a = std::abs(tau);
  if (a > xi_norm) return 0.0;
  if (a == xi_norm) return n == 2 ? std::numeric_limits<double>::infinity() : 0.0;
  const double s = (xi_norm - a) * (xi_norm + a);
  return cn_constant(n, CnConvention::NormalSymbol) * std::pow(s, 0.5 * (n - 3)) / std::pow(xi_norm, n - 2);
}

GridField::GridField(std::array<int, 3> dims, std::array<double, 3> origin, std::array<double, 3> lengths)
    : dims_(dims), origin_(origin), lengths_(lengths) {
  for (int a = 0; a < 3; ++a) {
    require(dims[a] >= 1, ErrorCode::InvalidCount, "grid field needs at least one sample per axis");
    require(lengths[a] > 0.0 && std::isfinite(lengths[a]), ErrorCode::InvalidExtent,
            "grid field box lengths must be positive");
  }
  values_.assign(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], 0.0);
}

GridField GridField::sample(std::array<int, 3> dims, std::array<double, 3> origin, std::array<double, 3> lengths,
                            const std::function<double(double, double, double)>& f) {
  GridField g(dims, origin, lengths);
  for (int it = 0; it < dims[0]; ++it) {
    for (int iy = 0; iy < dims[2]; ++iy) {
      for (int ix = 0; ix < dims[1]; ++ix) {
        g(it, ix, iy) = f(g.coordinate(0, it), g.coordinate(1, ix), g.coordinate(2, iy));
      }
    }
  }
  return g;
}

double GridField::frequency(int axis, int m) const {
  const int n = dims_[axis];
  const int k = m <= n / 2 ? m : m - n;
  return 2.0 * kPi * k / lengths_[axis];
}

double GridField::norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

bool GridField::same_lattice(const GridField& other) const {
  return dims_ == other.dims_ && origin_ == other.origin_ && lengths_ == other.lengths_;
}

std::vector<std::complex<double>> forward_transform(const GridField& f) {
  detail::ComplexBuffer in(f.size());
  detail::ComplexBuffer out(f.size());
  const auto& v = f.values();
  for (std::size_t i = 0; i < f.size(); ++i) {
    in.data[i][0] = v[i];
    in.data[i][1] = 0.0;
  }
  transform(f, in.data, out.data, FFTW_FORWARD);
  const double scale = 1.0 / std::sqrt(static_cast<double>(f.size()));
  Spectrum result(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) result[i] = {out.data[i][0] * scale, out.data[i][1] * scale};
  return result;
}

GridField inverse_transform(std::span<const std::complex<double>> coefficients, const GridField& like) {
  require(coefficients.size() == like.size(), ErrorCode::DimensionMismatch, "coefficient count mismatch");
  detail::ComplexBuffer in(like.size());
  detail::ComplexBuffer out(like.size());
  for (std::size_t i = 0; i < like.size(); ++i) {
    in.data[i][0] = coefficients[i].real();
    in.data[i][1] = coefficients[i].imag();
  }
  transform(like, in.data, out.data, FFTW_BACKWARD);
  const double scale = 1.0 / std::sqrt(static_cast<double>(like.size()));
  GridField g(like.dims(), like.origin(), like.lengths());
  auto& v = g.values();
  for (std::size_t i = 0; i < like.size(); ++i) v[i] = out.data[i][0] * scale;
  return g;
}

GridField apply_fourier_multiplier(const GridField& f, const std::function<double(double, double)>& symbol) {
  Spectrum coeffs = forward_transform(f);
  for_each_frequency(f, [&](std::size_t i, double tau, double x1, double x2) {
    coeffs[i] *= symbol(tau, std::hypot(x1, x2));
  });
  return inverse_transform(coeffs, f);
}

std::complex<double> fourier_transform_at(const GridField& f, double tau, const Eigen::Vector2d& xi) {
  const auto d = f.dims();
  auto phases = [&](int axis, double w) {
    std::vector<std::complex<double>> p(d[axis]);
    for (int i = 0; i < d[axis]; ++i) p[i] = std::polar(1.0, -w * f.coordinate(axis, i));
    return p;
  };
  const auto et = phases(0, tau);
  const auto ex = phases(1, xi[0]);
  const auto ey = phases(2, xi[1]);
  const auto& v = f.values();
  std::complex<double> total = 0.0;
  std::size_t idx = 0;
  for (int it = 0; it < d[0]; ++it) {
    std::complex<double> acc_t = 0.0;
    for (int iy = 0; iy < d[2]; ++iy) {
      std::complex<double> acc_y = 0.0;
      for (int ix = 0; ix < d[1]; ++ix) acc_y += v[idx++] * ex[ix];
      acc_t += acc_y * ey[iy];
    }
    total += acc_t * et[it];
  }
  return total * f.cell_volume();
}

std::complex<double> fourier_slice(const GridField& f, const Eigen::Vector2d& xi, const Eigen::Vector2d& v) {
  require(std::abs(v.norm() - 1.0) <= 1e-9, ErrorCode::NonUnitVector, "fourier_slice direction must be a unit vector");
  return fourier_transform_at(f, v.dot(xi), xi);
}

double clamped_normal_symbol(double tau, double xi_norm, double lightcone_eps) {
  const double a = std::abs(tau);
  if (xi_norm == 0.0 || a > xi_norm) return 0.0;
  const double clamped = xi_norm - a < lightcone_eps * xi_norm ? (1.0 - lightcone_eps) * xi_norm : a;
  return normal_symbol(clamped, xi_norm, 2);
}

GridField apply_normal_multiplier(const GridField& f, int j, double lightcone_eps) {
  require(j >= 0, ErrorCode::InvalidArgument, "multiplier power must be nonnegative");
  require(lightcone_eps > 0.0 && lightcone_eps < 1.0, ErrorCode::InvalidArgument, "lightcone_eps must lie in (0, 1)");
  if (j == 0) return f;
  return apply_fourier_multiplier(f, [&](double tau, double xi_norm) {
    return std::pow(clamped_normal_symbol(tau, xi_norm, lightcone_eps), j);
  });
}

GridField spacelike_filter(const GridField& f, double delta) {
  require(delta >= 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "filter delta must lie in [0, 1)");
  return apply_fourier_multiplier(
      f, [&](double tau, double xi_norm) { return (1.0 - delta) * xi_norm > std::abs(tau) ? 1.0 : 0.0; });
}

double stability_weight(double tau, double xi_norm, int n, CnConvention convention) {
  const double c = cn_constant(n, convention);
  const double a = std::abs(tau);
  if (!(xi_norm > a)) return 0.0;
  const double s = (xi_norm - a) * (xi_norm + a);
  return c * std::pow(s, 0.5 * (n - 3)) / std::pow(xi_norm, n - 3);
}

double stability_weight_infimum(int n, double delta, CnConvention convention) {
  require(delta >= 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "delta must lie in [0, 1)");
  const double c = cn_constant(n, convention);
  // With u = |tau|/|xi| in [0, 1-delta) the weight is c (1 - u^2)^{(n-3)/2}:
  // increasing in u for n = 2, constant for n = 3, decreasing for n > 3.
  if (n <= 3) return c;
  const double u = 1.0 - delta;
  return c * std::pow(1.0 - u * u, 0.5 * (n - 3));
}

double stability_ratio(std::span<const SpectralSample> samples, int n, CnConvention convention) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& s : samples) {
    const double e = std::norm(s.value);
    num += stability_weight(s.tau, s.xi_norm, n, convention) * e;
    den += e;
  }
  require(den > 0.0, ErrorCode::ZeroDenominator, "stability ratio of a zero spectrum");
  return std::sqrt(num / den);
}

StabilityEstimate estimate_stability_constant(int n, double delta, int trials, std::uint64_t seed,
                                              CnConvention convention, int lattice_points) {
  require(n >= 2, ErrorCode::InvalidArgument, "dimension n must be >= 2");
  require(trials >= 1, ErrorCode::InvalidCount, "need at least one trial");
  require(delta >= 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "delta must lie in [0, 1)");
  const int per_axis = lattice_points > 0 ? lattice_points : (n == 2 ? 24 : n == 3 ? 14 : 8);
  const int dim = n + 1;

  // Cell centres of a lattice on [-1, 1]^{n+1}; an even count keeps xi = 0 off it.
  const double step = 2.0 / per_axis;
  std::size_t count = 1;
  for (int a = 0; a < dim; ++a) count *= static_cast<std::size_t>(per_axis);
  std::vector<Eigen::VectorXd> points;
  points.reserve(count);
  std::vector<int> digits(dim, 0);
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::VectorXd z(dim);
    for (int a = 0; a < dim; ++a) z[a] = -1.0 + (digits[a] + 0.5) * step;
    points.push_back(std::move(z));
    for (int a = 0; a < dim && ++digits[a] == per_axis; ++a) digits[a] = 0;
  }

  auto in_cone = [&](const Eigen::VectorXd& z) { return (1.0 - delta) * z.tail(n).norm() > std::abs(z[0]); };

  StabilityEstimate est;
  est.trials = trials;
  est.analytic_infimum = std::sqrt(stability_weight_infimum(n, delta, convention));
  est.min_ratio = std::numeric_limits<double>::infinity();
  CounterRng rng(seed);
  std::vector<SpectralSample> samples;
  samples.reserve(count);
  for (int trial = 0; trial < trials; ++trial) {
    Eigen::VectorXd centre(dim);
    do {
      for (int a = 0; a < dim; ++a) centre[a] = 2.0 * rng.uniform() - 1.0;
    } while (!in_cone(centre));
    const double width = std::exp(std::log(0.05) + rng.uniform() * (std::log(0.6) - std::log(0.05)));
    samples.clear();
    for (const auto& z : points) {
      if (!in_cone(z)) continue;
      const double envelope = std::exp(-(z - centre).squaredNorm() / (2.0 * width * width));
      const std::complex<double> amp(rng.normal(), rng.normal());
      samples.push_back({z[0], z.tail(n).norm(), envelope * amp});
    }
    const double ratio = stability_ratio(samples, n, convention);
    est.min_ratio = std::min(est.min_ratio, ratio);
    est.max_ratio = std::max(est.max_ratio, ratio);
  }
  return est;
}

ArtefactLine predict_artefacts(double t, const Eigen::VectorXd& x, double tau, const Eigen::VectorXd& xi) {
  require(x.size() == xi.size() && x.size() >= 1, ErrorCode::DimensionMismatch,
          "base point and conormal must have the same spatial dimension");
  const double xn = xi.norm();
  const double a = std::abs(tau);
  require(xn > 0.0 && std::abs(xn - a) <= 1e-9 * std::max(xn, a), ErrorCode::NotLightLike,
          "artefact prediction needs a light-like conormal |tau| = |xi|");
  const double sign = tau > 0.0 ? 1.0 : -1.0;
  return ArtefactLine{t, x, -sign * xi / xn};
}

void write_artefact_csv(const std::filesystem::path& path, std::span<const ArtefactLine> lines, double t_min,
                        double t_max, int samples) {
  require(samples >= 2, ErrorCode::InvalidCount, "a polyline needs at least two samples");
  std::ofstream os(path);
  require(os.good(), ErrorCode::Io, "cannot write " + path.string());
  os.precision(std::numeric_limits<double>::max_digits10);
  os << "t,x,y\n";
  for (std::size_t l = 0; l < lines.size(); ++l) {
    if (l > 0) os << '\n';
    for (int s = 0; s < samples; ++s) {
      const double tp = t_min + (t_max - t_min) * s / (samples - 1);
      const Eigen::VectorXd p = lines[l].at(tp);
      os << tp << ',' << p[0] << ',' << (p.size() > 1 ? p[1] : 0.0) << '\n';
    }
  }
  require(os.good(), ErrorCode::Io, "failed writing " + path.string());
}

std::vector<SmoothingOrderRow> smoothing_order_check(const GridField& probe, int j_max,
                                                     const SmoothingOrderOptions& options) {
  require(j_max >= 0, ErrorCode::InvalidArgument, "j_max must be nonnegative");
  const Eigen::Vector3d d = options.direction;
  const Eigen::Vector2d xi0 = d.tail<2>();
  require(xi0.norm() > 0.0, ErrorCode::InvalidArgument, "direction needs a nonzero spatial part");
  const bool light_like = classify(d[0], xi0.norm(), 1e-9) == FrequencyClass::LightLike;
  const Eigen::Vector2d e = xi0.normalized();
  const Eigen::Vector2d e_perp(-e[1], e[0]);
  const Eigen::Vector3d d_unit = d.normalized();

  double nyquist = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) nyquist = std::min(nyquist, kPi / probe.spacing(a));
  const double rho_lo = options.rho_min_fraction * nyquist;
  const double rho_hi = options.rho_max_fraction * nyquist;
  require(rho_lo > 0.0 && rho_hi > rho_lo && options.bins >= 3, ErrorCode::InvalidArgument, "bad fit window");

  struct Point {
    double rho;
    double energy;
    double k;
  };
  std::vector<Point> tube;
  const Spectrum coeffs = forward_transform(probe);
  for_each_frequency(probe, [&](std::size_t i, double tau, double x1, double x2) {
    const Eigen::Vector3d z(tau, x1, x2);
    const double rho = z.norm();
    if (rho < rho_lo || rho > rho_hi) return;
    const Eigen::Vector2d xi(x1, x2);
    if (light_like) {
      if (tau * d[0] <= 0.0 || xi.dot(e) <= 0.0 || std::abs(xi.dot(e_perp)) > options.transverse) return;
      const double offset = xi.norm() - std::abs(tau);
      if (offset < options.offset_min || offset > options.offset_max) return;
    } else if (std::acos(std::clamp(z.dot(d_unit) / rho, -1.0, 1.0)) > options.cone_angle) {
      return;
    }
    tube.push_back({rho, std::norm(coeffs[i]), clamped_normal_symbol(tau, xi.norm(), options.lightcone_eps)});
  });

  const double log_lo = std::log(rho_lo);
  const double log_step = (std::log(rho_hi) - log_lo) / options.bins;
  std::vector<SmoothingOrderRow> rows;
  for (int j = 0; j <= j_max; ++j) {
    std::vector<double> sum_e(options.bins, 0.0), sum_log_rho(options.bins, 0.0);
    std::vector<int> hits(options.bins, 0);
    for (const auto& p : tube) {
      const int b = std::min(options.bins - 1, static_cast<int>((std::log(p.rho) - log_lo) / log_step));
      sum_e[b] += p.energy * std::pow(p.k, 2 * j);
      sum_log_rho[b] += std::log(p.rho);
      ++hits[b];
    }
    std::vector<double> xs, ys;
    for (int b = 0; b < options.bins; ++b) {
      if (hits[b] == 0 || !(sum_e[b] > 0.0)) continue;
      xs.push_back(sum_log_rho[b] / hits[b]);
      ys.push_back(std::log(sum_e[b] / hits[b]));
    }
    require(xs.size() >= 3, ErrorCode::InvalidArgument, "too few populated frequency bins to fit a slope");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i] / n;
      my += ys[i] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    SmoothingOrderRow row;
    row.j = j;
    row.slope = sxy / sxx;
    row.gain = j == 0 ? 0.0 : 0.5 * (rows.front().slope - row.slope);
    rows.push_back(row);
  }
  return rows;
}

GridField null_plane_probe(std::array<int, 3> dims, double half_width, double a, double sigma) {
  require(half_width > 0.0 && a > 0.0 && sigma > 0.0, ErrorCode::InvalidArgument, "probe parameters must be positive");
  const std::array<double, 3> origin{-half_width, -half_width, -half_width};
  const std::array<double, 3> lengths{2 * half_width, 2 * half_width, 2 * half_width};
  return GridField::sample(dims, origin, lengths, [&](double t, double x, double y) {
    const double s = x - t;
    return s > 0.0 ? std::exp(-(t * t + x * x + y * y) / (2.0 * sigma * sigma)) * std::pow(s, a) : 0.0;
  });
}

void write_grid_field(const std::filesystem::path& path, const GridField& f) {
  const auto d = f.dims();
  std::map<std::string, std::string> header{
      {"kind", "grid_field"},
      {"dims", std::to_string(d[0]) + " " + std::to_string(d[1]) + " " + std::to_string(d[2])},
      {"origin", join(f.origin())},
      {"lengths", join(f.lengths())},
      {"layout", "t,y,x"},
  };
  write_raw_volume(path, header, f.values());
}

GridField read_grid_field(const std::filesystem::path& path) {
  RawVolume raw = read_raw_volume(path);
  GridField f(parse3<int>(raw.header, "dims"), parse3<double>(raw.header, "origin"),
              parse3<double>(raw.header, "lengths"));
  require(raw.data.size() == f.size(), ErrorCode::Io, "grid field sample count does not match its dims");
  f.values() = std::move(raw.data);
  return f;
}

}  // namespace lightray
