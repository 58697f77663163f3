#include "lightray/phantom.hpp"

#include <cmath>
#include <string>

#include "lightray/error.hpp"

namespace lightray {

std::string_view to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::TranslatingCircle: return "translating_circle";
    case PhantomKind::CollapsingCircle: return "collapsing_circle";
    case PhantomKind::AppearingBall: return "appearing_ball";
    case PhantomKind::Zero: return "zero";
    case PhantomKind::Impulse: return "impulse";
  }
  return "unknown";
}

PhantomKind phantom_kind_from_string(std::string_view name) {
  for (auto kind : {PhantomKind::TranslatingCircle, PhantomKind::CollapsingCircle, PhantomKind::AppearingBall,
                    PhantomKind::Zero, PhantomKind::Impulse}) {
    if (name == to_string(kind)) return kind;
  }
  fail(ErrorCode::Config, "unknown phantom kind '" + std::string(name) + "'");
}

Phantom Phantom::translating_circle(double a, double c) {
  Phantom p;
  p.kind = PhantomKind::TranslatingCircle;
  p.a = a;
  p.c = c;
  return p;
}

Phantom Phantom::collapsing_circle(double a) {
  Phantom p;
  p.kind = PhantomKind::CollapsingCircle;
  p.a = a;
  return p;
}

Phantom Phantom::appearing_ball(double a, double t0, double t1) {
  Phantom p;
  p.kind = PhantomKind::AppearingBall;
  p.a = a;
  p.t0 = t0;
  p.t1 = t1;
  return p;
}

Phantom Phantom::zero() {
  Phantom p;
  p.kind = PhantomKind::Zero;
  return p;
}

Phantom Phantom::impulse(double t, double x, double y) {
  Phantom p;
  p.kind = PhantomKind::Impulse;
  p.t0 = t;
  p.x = x;
  p.y = y;
  return p;
}

void Phantom::validate(Interval time_extent) const {
  require(a > 0.0, ErrorCode::InvalidArgument, "phantom exponent a must be positive");
  if (kind == PhantomKind::AppearingBall) {
    require(time_extent.min <= t0 && t0 < t1 && t1 <= time_extent.max, ErrorCode::InvalidArgument,
            "appearing ball needs t_min <= t0 < t1 <= t_max");
  }
}

double positive_power(double s, double a) { return s > 0.0 ? std::pow(s, a) : 0.0; }

double eval_phantom(const Phantom& p, double t, double x, double y) {
  switch (p.kind) {
    case PhantomKind::TranslatingCircle: {
      const double dx = x - p.c * t;
      return positive_power(2.0 - std::hypot(dx, y), p.a);
    }
    case PhantomKind::CollapsingCircle: {
      // The second branch grows with radius; kept as printed.
      const double r = std::hypot(x, y);
      return t <= 2.0 ? positive_power(1.0 - t / 2.0 - r, p.a) : positive_power(1.0 - t / 2.0 + r, p.a);
    }
    case PhantomKind::AppearingBall: {
      if (t < p.t0 || t > p.t1) return 0.0;
      const double dt = t - 2.0;
      return positive_power(1.5 - std::sqrt(x * x + y * y + dt * dt), p.a);
    }
    case PhantomKind::Zero:
      return 0.0;
    case PhantomKind::Impulse:
      return (t == p.t0 && x == p.x && y == p.y) ? 1.0 : 0.0;
  }
  return 0.0;
}

StateVector rasterize_phantom(const Phantom& p, const SpaceTimeGrid& grid) {
  StateVector out(static_cast<Eigen::Index>(grid.size()));
  const auto times = grid.plane_times();
  for (int k = 0; k < grid.planes(); ++k) {
    for (int iy = 0; iy < grid.nx(); ++iy) {
      for (int ix = 0; ix < grid.nx(); ++ix) {
        out[static_cast<Eigen::Index>(grid.index(ix, iy, k))] = eval_phantom(p, times[k], grid.node(ix), grid.node(iy));
      }
    }
  }
  return out;
}

}  // namespace lightray
