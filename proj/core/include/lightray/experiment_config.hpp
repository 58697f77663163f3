#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lightray/forward_model.hpp"
#include "lightray/grid.hpp"
#include "lightray/phantom.hpp"
#include "lightray/priors.hpp"
#include "lightray/solvers/common.hpp"

namespace lightray {

enum class Method { Landweber, Fista, Tikhonov, GenTikhonov };

/// "landweber", "fista", "tikhonov", "gen-tikhonov".
std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

struct GridConfig {
  int nx = 51;
  Interval extent{-3.0, 3.0};
  int planes = 20;
  Interval time_extent{0.0, 4.0};

  SpaceTimeGrid build() const;
  bool operator==(const GridConfig&) const = default;
};

struct RayConfig {
  RayMode mode = RayMode::NullShell;
  std::optional<double> eps_ray;
  bool scale_by_segment_length = false;

  RayPolicy policy() const;
  bool operator==(const RayConfig&) const = default;
};

struct NoiseConfig {
  double level = 5.0;  // percent
  std::uint64_t seed = 1;

  bool operator==(const NoiseConfig&) const = default;
};

struct MethodConfig {
  Method method = Method::Landweber;
  SolverOptions options;
  MaternParams prior;  // gen-tikhonov only

  bool operator==(const MethodConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  /// Any of "csv" (slice CSVs), "pgm" (slice images), "raw" (volume).
  std::vector<std::string> formats{"csv", "pgm"};

  bool operator==(const OutputConfig&) const = default;
};

/// Experiment description. Schema (TOML shown; JSON uses the same nesting):
///
///     [grid]     nx, extent = [min, max], planes, time_extent = [min, max]
///     [phantom]  kind, a, c, t0, t1
///     [rays]     mode = "null-shell" | "cone-interior", eps_ray, scale_by_segment_length
///     [noise]    level (percent), seed
///     [solvers.<landweber|fista|tikhonov|gen_tikhonov>]
///                max_iters, relaxation_factor, dp_tau, dp_enabled, seed,
///                lambda_rule = "fixed" | "optimal" | "sweep", lambda, lambda_grid,
///                L0, eta, sigma_iters, sigma_tol, stagnation_tol,
///                log10_lambda_min, log10_lambda_max, golden_evaluations
///     [solvers.gen_tikhonov.prior]  nu, ell, sigma2
///     [output]   directory, formats
///
/// Every section except the solver tables is required; unknown keys are
/// rejected. Solvers run in the order listed above.
struct ExperimentConfig {
  GridConfig grid;
  Phantom phantom;
  RayConfig rays;
  NoiseConfig noise;
  std::vector<MethodConfig> solvers;
  OutputConfig output;

  void validate() const;
  const MethodConfig* find(Method method) const;
  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config_toml(std::string_view text);
ExperimentConfig parse_config_json(std::string_view text);
/// Chooses the parser by extension (.json, otherwise TOML).
ExperimentConfig load_config(const std::filesystem::path& path);

std::string to_toml(const ExperimentConfig& cfg);
std::string to_json(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical JSON serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Desk-scale (25 x 25 x 10) translating-circle configuration with all three
/// non-prior solvers at their defaults.
ExperimentConfig desk_example1(double c = 0.0, std::uint64_t seed = 1);

}  // namespace lightray
