#pragma once

#include <string_view>

#include "lightray/grid.hpp"

namespace lightray {

enum class PhantomKind {
  TranslatingCircle,  // f1: circle of radius 2 moving along +x at speed c
  CollapsingCircle,   // f2: circle collapsing at speed 1/2, then the printed second branch
  AppearingBall,      // f3: spacetime ball of radius 1.5 visible on [t0, t1]
  Zero,
  Impulse,            // 1 at (t0, x, y) exactly, 0 elsewhere
};

std::string_view to_string(PhantomKind kind);
PhantomKind phantom_kind_from_string(std::string_view name);

/// Tagged description of a test object. Only the fields relevant to `kind`
/// are read.
struct Phantom {
  PhantomKind kind = PhantomKind::TranslatingCircle;
  double a = 0.05;   // conormal strength exponent
  double c = 0.0;    // speed, f1 only
  double t0 = 1.2;   // appearance time (f3) or impulse time
  double t1 = 2.8;   // disappearance time (f3)
  double x = 0.0;    // impulse location
  double y = 0.0;

  static Phantom translating_circle(double a, double c);
  static Phantom collapsing_circle(double a);
  static Phantom appearing_ball(double a, double t0, double t1);
  static Phantom zero();
  static Phantom impulse(double t, double x, double y);

  /// Checks a > 0 and, for f3, time_extent.min <= t0 < t1 <= time_extent.max.
  void validate(Interval time_extent) const;

  bool operator==(const Phantom&) const = default;
};

/// (s)_+^a: s^a for s > 0, else 0.
double positive_power(double s, double a);

double eval_phantom(const Phantom& p, double t, double x, double y);

StateVector rasterize_phantom(const Phantom& p, const SpaceTimeGrid& grid);

}  // namespace lightray
