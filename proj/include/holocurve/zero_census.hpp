#pragma once

// Census of zeros of a continuous C -> C function by winding-number
// subdivision.  For solutions of dbar u + A u = 0 the similarity principle
// guarantees isolated zeros of positive local index; the census checks the
// computable consequence: every reported index >= 1 and the total equals the
// boundary winding number.

#include "holocurve/core.hpp"

namespace holocurve {

struct ZeroRecord {
  Complex location;
  int index = 0;
};

struct ZeroCensus {
  std::vector<ZeroRecord> zeros;
  int boundary_winding = 0;
  bool conclusive = true;
  int total_index() const {
    int s = 0;
    for (const auto& z : zeros) s += z.index;
    return s;
  }
};

namespace detail {

// winding of w(t) along a closed polyline of samples; requires |w| bounded
// below and angular increments < pi/2 per step (refined by the caller).
inline bool winding_of_samples(const std::vector<Complex>& w, double floor_abs, int& out) {
  double total = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    const Complex a = w[i], b = w[(i + 1) % w.size()];
    if (std::abs(a) < floor_abs || std::abs(b) < floor_abs) return false;
    const double d = std::arg(b / a);
    if (std::abs(d) > 1.5) return false;  // too coarse to trust
    total += d;
  }
  out = static_cast<int>(std::lround(total / kTwoPi));
  return true;
}

inline bool circle_winding(const std::function<Complex(Complex)>& f, Complex center, double radius,
                           double floor_abs, int& out, int samples = 256) {
  std::vector<Complex> w(samples);
  for (int i = 0; i < samples; ++i)
    w[i] = f(center + radius * std::exp(Complex(0, kTwoPi * i / samples)));
  return winding_of_samples(w, floor_abs, out);
}

inline bool box_winding(const std::function<Complex(Complex)>& f, Complex lo, double side,
                        double floor_abs, int& out, int per_edge = 64) {
  std::vector<Complex> w;
  w.reserve(4 * per_edge);
  auto push_edge = [&](Complex a, Complex b) {
    for (int i = 0; i < per_edge; ++i) w.push_back(f(a + (b - a) * (static_cast<double>(i) / per_edge)));
  };
  const Complex v1 = lo + Complex(side, 0), v2 = lo + Complex(side, side), v3 = lo + Complex(0, side);
  push_edge(lo, v1);
  push_edge(v1, v2);
  push_edge(v2, v3);
  push_edge(v3, lo);
  return winding_of_samples(w, floor_abs, out);
}

inline void subdivide(const std::function<Complex(Complex)>& f, Complex lo, double side, double floor_abs,
                      double resolution, ZeroCensus& census, int depth) {
  int w = 0;
  if (!box_winding(f, lo, side, floor_abs, w)) {
    // boundary runs too close to a zero; nudge by recursing immediately
    if (depth > 40) {
      census.conclusive = false;
      return;
    }
    const double half = side / 2;
    for (int q = 0; q < 4; ++q)
      subdivide(f, lo + Complex((q & 1) * half, ((q >> 1) & 1) * half), half, floor_abs, resolution, census,
                depth + 1);
    return;
  }
  if (w == 0) return;
  if (w < 0) {
    census.conclusive = false;  // violates positivity; flag rather than report
    return;
  }
  if (side <= resolution || depth > 40) {
    census.zeros.push_back({lo + Complex(side / 2, side / 2), w});
    return;
  }
  const double half = side / 2;
  for (int q = 0; q < 4; ++q)
    subdivide(f, lo + Complex((q & 1) * half, ((q >> 1) & 1) * half), half, floor_abs, resolution, census,
              depth + 1);
}

}  // namespace detail

inline ZeroCensus zero_census(const std::function<Complex(Complex)>& f, double radius,
                              double resolution = 1e-4, double floor_abs = 1e-12) {
  ZeroCensus census;
  double circle_min = 1e300;
  for (int i = 0; i < 512; ++i)
    circle_min = std::min(circle_min, std::abs(f(radius * std::exp(Complex(0, kTwoPi * i / 512)))));
  if (circle_min < 1e3 * floor_abs) {
    census.conclusive = false;  // |u| not bounded below on the test circle
    return census;
  }
  if (!detail::circle_winding(f, Complex(0, 0), radius, floor_abs, census.boundary_winding, 1024)) {
    census.conclusive = false;
    return census;
  }
  // Census the circumscribed square; subdivision discards winding-zero boxes
  // and the final list is filtered back to the disk.  The box is offset
  // asymmetrically so that zeros at lattice-rational points (e.g. the origin)
  // do not land on subdivision edges.
  const Complex lo(-radius * 1.000731, -radius * 1.001337);
  const double side = 2 * radius * 1.001731;
  detail::subdivide(f, lo, side, floor_abs, resolution, census, 0);
  std::vector<ZeroRecord> inside;
  for (const auto& z : census.zeros)
    if (std::abs(z.location) <= radius + resolution) inside.push_back(z);
  census.zeros = std::move(inside);
  return census;
}

}  // namespace holocurve
