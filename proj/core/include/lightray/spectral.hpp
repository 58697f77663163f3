#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace lightray {

// Fourier convention throughout: F f(tau, xi) = int e^{-i(t tau + x.xi)} f(t, x) dt dx,
// with tau the temporal and xi the spatial (angular) frequency.

struct FrequencyPoint {
  double tau = 0.0;
  Eigen::VectorXd xi;

  double xi_norm() const { return xi.norm(); }
};

enum class FrequencyClass { SpaceLike, LightLike, TimeLike };

/// Space-like iff |xi| > |tau|. Points with ||xi| - |tau|| <= rel_tol * max(|xi|, |tau|)
/// are light-like. The zero frequency has no class and is rejected.
FrequencyClass classify(double tau, double xi_norm, double rel_tol = 1e-12);
FrequencyClass classify(const FrequencyPoint& p, double rel_tol = 1e-12);

/// Two normalisations of C_n appear in the theory: the surface area
/// |S^{n-2}| (stability estimate) and 2 pi |S^{n-2}| (normal operator symbol).
enum class CnConvention { SphereArea, NormalSymbol };

/// Surface area of the unit sphere S^d in R^{d+1}; |S^0| = 2.
double sphere_area(int d);
double cn_constant(int n, CnConvention convention);

/// Symbol of the normal operator,
/// k = C_n (|xi|^2 - tau^2)_+^{(n-3)/2} / |xi|^{n-2}, C_n = 2 pi |S^{n-2}|.
/// For n = 2 the light cone (including the origin) is +infinity.
double normal_symbol(double tau, double xi_norm, int n);

/// Periodic samples of a real function on a uniform (t, x, y) lattice.
///
/// Storage is [t][y][x] with x fastest, matching the state-vector slice
/// layout. Sample i along an axis sits at origin + i * length / count.
class GridField {
 public:
  /// dims and boxes are ordered (t, x, y).
  GridField(std::array<int, 3> dims, std::array<double, 3> origin, std::array<double, 3> lengths);

  static GridField sample(std::array<int, 3> dims, std::array<double, 3> origin, std::array<double, 3> lengths,
                          const std::function<double(double, double, double)>& f);

  std::array<int, 3> dims() const { return dims_; }
  std::array<double, 3> origin() const { return origin_; }
  std::array<double, 3> lengths() const { return lengths_; }
  double spacing(int axis) const { return lengths_[axis] / dims_[axis]; }
  double coordinate(int axis, int i) const { return origin_[axis] + i * spacing(axis); }
  double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
  /// Angular frequency of DFT index m along an axis (m > count/2 wraps negative).
  double frequency(int axis, int m) const;

  std::size_t size() const { return values_.size(); }
  std::size_t index(int it, int ix, int iy) const {
    return (static_cast<std::size_t>(it) * dims_[2] + iy) * dims_[1] + ix;
  }
  double& operator()(int it, int ix, int iy) { return values_[index(it, ix, iy)]; }
  double operator()(int it, int ix, int iy) const { return values_[index(it, ix, iy)]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Discrete l2 norm of the samples (no cell-volume factor).
  double norm() const;
  bool same_lattice(const GridField& other) const;

 private:
  std::array<int, 3> dims_;
  std::array<double, 3> origin_;
  std::array<double, 3> lengths_;
  std::vector<double> values_;
};

/// Unitary DFT (scaled by 1/sqrt(N)), so the sum of |coefficients|^2 equals
/// the sum of |samples|^2. Same [t][y][x] layout as the field.
std::vector<std::complex<double>> forward_transform(const GridField& f);
/// Inverse of forward_transform; the imaginary part is discarded.
GridField inverse_transform(std::span<const std::complex<double>> coefficients, const GridField& like);

/// Multiplies every DFT coefficient by symbol(tau, |xi|). The symbol should
/// be even so the result stays real.
GridField apply_fourier_multiplier(const GridField& f, const std::function<double(double, double)>& symbol);

/// F f at (v.xi, xi) by direct evaluation of the sampled Fourier integral,
/// i.e. the trigonometric interpolant of the DFT. v must be a unit vector.
std::complex<double> fourier_slice(const GridField& f, const Eigen::Vector2d& xi, const Eigen::Vector2d& v);
/// F f at an arbitrary (tau, xi).
std::complex<double> fourier_transform_at(const GridField& f, double tau, const Eigen::Vector2d& xi);

/// The n = 2 symbol with a light-cone clamp: for 0 <= |xi| - |tau| < eps |xi| it
/// is evaluated at |tau| = (1 - eps)|xi|. Time-like frequencies and the origin
/// map to 0.
double clamped_normal_symbol(double tau, double xi_norm, double lightcone_eps);

/// N^j f for the (2+1)-dimensional field, using the clamped symbol. j = 0 is the identity.
GridField apply_normal_multiplier(const GridField& f, int j, double lightcone_eps = 1e-3);

/// Keeps Fourier coefficients with (1 - delta)|xi| > |tau|; requires 0 <= delta < 1.
GridField spacelike_filter(const GridField& f, double delta);

/// Stability-estimate weight C_n (|xi|^2 - tau^2)^{(n-3)/2} / |xi|^{n-3}
/// inside the space-like cone, 0 outside.
double stability_weight(double tau, double xi_norm, int n, CnConvention convention);

/// Infimum of stability_weight over the cone (1 - delta)|xi| > |tau|.
double stability_weight_infimum(int n, double delta, CnConvention convention);

struct SpectralSample {
  double tau = 0.0;
  double xi_norm = 0.0;
  std::complex<double> value;
};

/// ||Lf||_{H^{1/2}} / ||f||_{L^2} for a spectrum given on equal-volume cells,
/// with the numerator from the angular-integration weight identity.
double stability_ratio(std::span<const SpectralSample> samples, int n, CnConvention convention);

struct StabilityEstimate {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  /// sqrt of the analytic infimum of the weight over the cone.
  double analytic_infimum = 0.0;
  int trials = 0;
};

/// Minimum of stability_ratio over random band-limited spectra supported in
/// the cone (1 - delta)|xi| > |tau|, sampled on a lattice in (tau, xi) space.
StabilityEstimate estimate_stability_constant(int n, double delta, int trials, std::uint64_t seed,
                                              CnConvention convention = CnConvention::SphereArea,
                                              int lattice_points = 0);

/// Flow-out of a light-like singularity at (t, x) with conormal (tau, xi):
/// the null line x'(t') = x - (t' - t) sgn(tau) xi / |xi|.
struct ArtefactLine {
  double t = 0.0;
  Eigen::VectorXd x;
  /// Spatial velocity dx'/dt', a unit vector.
  Eigen::VectorXd velocity;

  Eigen::VectorXd at(double t_prime) const { return x + (t_prime - t) * velocity; }
};

ArtefactLine predict_artefacts(double t, const Eigen::VectorXd& x, double tau, const Eigen::VectorXd& xi);

/// CSV with header `t,x,y`; each line is sampled at `samples` points over
/// [t_min, t_max] and separated from the next by an empty row.
void write_artefact_csv(const std::filesystem::path& path, std::span<const ArtefactLine> lines, double t_min,
                        double t_max, int samples = 2);

struct SmoothingOrderOptions {
  /// Direction (tau, xi_1, xi_2) along which the spectrum is followed.
  Eigen::Vector3d direction{-1.0, 1.0, 0.0};
  double lightcone_eps = 1e-3;
  /// Light-like tube: |xi| - |tau| in [offset_min, offset_max] and at most
  /// `transverse` off the plane of the direction. Absolute angular frequencies.
  double offset_min = 1.0;
  double offset_max = 3.0;
  double transverse = 0.5;
  /// Half-angle (radians) of the tube for non-light-like directions.
  double cone_angle = 0.15;
  /// Fit window in |zeta| as fractions of the smallest Nyquist frequency.
  double rho_min_fraction = 0.15;
  double rho_max_fraction = 0.8;
  int bins = 10;
};

struct SmoothingOrderRow {
  int j = 0;
  double slope = 0.0;  // log-log slope of the mean spectral energy of N^j f
  double gain = 0.0;   // (slope_0 - slope_j) / 2, a Sobolev order
};

/// Fits the decay of |k^j f^|^2 along a tube around the given direction for
/// j = 0..j_max. For a light-like direction in 2+1 dimensions the expected
/// gain is j/2; for a space-like one it is j.
std::vector<SmoothingOrderRow> smoothing_order_check(const GridField& probe, int j_max,
                                                     const SmoothingOrderOptions& options = {});

/// exp(-|z|^2 / (2 sigma^2)) (x - t)_+^a: a conormal singularity across the
/// null plane x = t, whose conormal (-1, 1, 0) is light-like.
GridField null_plane_probe(std::array<int, 3> dims, double half_width, double a, double sigma = 1.0);

void write_grid_field(const std::filesystem::path& path, const GridField& f);
GridField read_grid_field(const std::filesystem::path& path);

}  // namespace lightray
