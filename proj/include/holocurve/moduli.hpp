#pragma once

// Exact moduli arithmetic: Fredholm indices of curves, Teichmueller
// dimensions, Moebius normalization of marked spheres, Gauss reduction of
// torus moduli under SL(2,Z) and isotropy groups.

#include <array>
#include <limits>

#include "holocurve/core.hpp"

namespace holocurve {

struct CurveTopology {
  int genus = 0;
  int marked = 0;
  int target_dim = 1;  // complex dimension n
  int c1 = 0;          // <c1(TM), A>
};

// ind(u) = (n - 3)(2 - 2g) + 2 c1(A) + 2m
inline int curve_index(const CurveTopology& t) {
  return (t.target_dim - 3) * (2 - 2 * t.genus) + 2 * t.c1 + 2 * t.marked;
}

struct TeichmuellerDimensions {
  int dim_teich = 0;
  int dim_aut = 0;
};

// dim T = 6g - 6 + 2m in the stable range 2g + m >= 3, 2 for the torus,
// 0 otherwise; Aut dimensions 6, 4, 2 for the non-stable sphere cases.
inline TeichmuellerDimensions teichmueller_dimension(int g, int m) {
  if (g < 0 || m < 0) throw DomainError("teichmueller_dimension: negative input");
  TeichmuellerDimensions out;
  if (2 * g + m >= 3) {
    out.dim_teich = 6 * g - 6 + 2 * m;
    out.dim_aut = 0;
  } else if (g == 1 && m == 0) {
    out.dim_teich = 2;
    out.dim_aut = 2;  // Aut(T^2, j) = T^2 x| G_lambda
  } else {
    out.dim_teich = 0;
    out.dim_aut = 6 - 2 * m;  // PSL(2,C) and its point stabilizers
  }
  return out;
}

// ---------------------------------------------------------------------------
// Moebius transformations, with infinity handled projectively.

struct RiemannPoint {
  Complex z{0, 0};
  bool infinite = false;
  static RiemannPoint inf() { return {Complex(0, 0), true}; }
  static RiemannPoint at(Complex w) { return {w, false}; }
  bool close_to(const RiemannPoint& o, double tol = 1e-9) const {
    if (infinite || o.infinite) return infinite == o.infinite;
    return std::abs(z - o.z) <= tol * std::max(1.0, std::abs(z));
  }
};

struct MoebiusMap {
  Complex a{1, 0}, b{0, 0}, c{0, 0}, d{1, 0};  // ad - bc = 1
  RiemannPoint apply(const RiemannPoint& p) const {
    if (p.infinite) {
      if (std::abs(c) == 0.0) return RiemannPoint::inf();
      return RiemannPoint::at(a / c);
    }
    const Complex num = a * p.z + b, den = c * p.z + d;
    if (std::abs(num) > 1e12 * std::abs(den)) return RiemannPoint::inf();
    return RiemannPoint::at(num / den);
  }
  Complex determinant() const { return a * d - b * c; }
  MoebiusMap normalized() const {
    const Complex s = std::sqrt(determinant());
    return {a / s, b / s, c / s, d / s};
  }
  MoebiusMap inverse() const { return MoebiusMap{d, -b, -c, a}.normalized(); }
  MoebiusMap compose(const MoebiusMap& o) const {  // this after o
    return MoebiusMap{a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d}.normalized();
  }
};

// Cross-ratio map sending (z1, z2, z3) -> (0, 1, inf):
// phi(z) = ((z - z1)(z2 - z3)) / ((z - z3)(z2 - z1)), with limits when an
// input is infinity.
inline MoebiusMap moebius_normalize(const RiemannPoint& p1, const RiemannPoint& p2, const RiemannPoint& p3) {
  auto same = [](const RiemannPoint& x, const RiemannPoint& y) {
    if (x.infinite || y.infinite) return x.infinite && y.infinite;
    return x.z == y.z;
  };
  if (same(p1, p2) || same(p2, p3) || same(p1, p3))
    throw DomainError("moebius_normalize: points must be pairwise distinct");
  MoebiusMap m;
  if (p1.infinite) {        // phi(z) = (z2 - z3) / (z - z3)
    m = {Complex(0, 0), p2.z - p3.z, Complex(1, 0), -p3.z};
  } else if (p2.infinite) { // phi(z) = (z - z1) / (z - z3)
    m = {Complex(1, 0), -p1.z, Complex(1, 0), -p3.z};
  } else if (p3.infinite) { // phi(z) = (z - z1) / (z2 - z1)
    m = {Complex(1, 0), -p1.z, Complex(0, 0), p2.z - p1.z};
  } else {
    const Complex u = p2.z - p3.z, v = p2.z - p1.z;
    m = {u, -p1.z * u, v, -p3.z * v};
  }
  if (std::abs(m.determinant()) < 1e-14) throw DomainError("moebius_normalize: degenerate configuration");
  return m.normalized();
}

// ---------------------------------------------------------------------------
// SL(2,Z) reduction of the torus modulus by the Gauss algorithm.  We fix the
// Moebius action lambda' = (a lambda + b) / (c lambda + d); the paper's
// pullback convention leaves a transpose/inverse ambiguity, so only
// convention-independent claims (orbit equivalence, stabilizer orders) are
// asserted against it.

struct TorusModulusReduction {
  Complex reduced;
  std::array<long, 4> witness{1, 0, 0, 1};  // a b c d with lambda' = (a l + b)/(c l + d)
  bool converged = true;
};

inline Complex modular_apply(const std::array<long, 4>& m, Complex lambda) {
  return (static_cast<double>(m[0]) * lambda + static_cast<double>(m[1])) /
         (static_cast<double>(m[2]) * lambda + static_cast<double>(m[3]));
}

inline TorusModulusReduction torus_modulus_reduce(Complex lambda, long step_cap = 10000) {
  if (lambda.imag() <= 0) throw DomainError("torus_modulus_reduce: need Im(lambda) > 0");
  TorusModulusReduction out;
  std::array<long, 4> acc{1, 0, 0, 1};
  auto lmul = [&](std::array<long, 4> g) {  // acc := g * acc
    acc = {g[0] * acc[0] + g[1] * acc[2], g[0] * acc[1] + g[1] * acc[3],
           g[2] * acc[0] + g[3] * acc[2], g[2] * acc[1] + g[3] * acc[3]};
  };
  Complex z = lambda;
  long steps = 0;
  const double tol = 1e-12;
  while (steps++ < step_cap) {
    const long n = std::lround(z.real());
    if (n != 0) {
      z -= static_cast<double>(n);
      lmul({1, -n, 0, 1});
    }
    if (std::abs(z) < 1.0 - tol) {
      z = -1.0 / z;
      lmul({0, -1, 1, 0});
      continue;
    }
    // boundary conventions: Re on the arcs >= 0
    if (std::abs(z.real() + 0.5) < tol) {
      z += 1.0;
      lmul({1, 1, 0, 1});
    }
    if (std::abs(std::abs(z) - 1.0) < tol && z.real() < -tol) {
      z = -1.0 / z;
      lmul({0, -1, 1, 0});
      continue;
    }
    break;
  }
  out.converged = steps <= step_cap;
  out.reduced = z;
  out.witness = acc;
  // verify the action formula
  if (std::abs(modular_apply(acc, lambda) - z) > 1e-9 * std::max(1.0, std::abs(z)))
    throw ConvergenceError("torus_modulus_reduce: witness fails the action check");
  return out;
}

// Order of G_lambda = {A in SL(2,Z) : A fixes lambda} by brute force over
// entries bounded by 3; sufficient in the fundamental domain (validated by a
// one-time sweep to bound 10 in the tests).
inline int torus_isotropy_order(Complex lambda, int entry_bound = 3, double tol = 1e-9) {
  if (lambda.imag() <= 0) throw DomainError("torus_isotropy_order: need Im(lambda) > 0");
  int count = 0;
  for (int a = -entry_bound; a <= entry_bound; ++a)
    for (int b = -entry_bound; b <= entry_bound; ++b)
      for (int c = -entry_bound; c <= entry_bound; ++c)
        for (int d = -entry_bound; d <= entry_bound; ++d) {
          if (a * d - b * c != 1) continue;
          const Complex den = static_cast<double>(c) * lambda + static_cast<double>(d);
          if (std::abs(den) < 1e-12) continue;
          const Complex img = (static_cast<double>(a) * lambda + static_cast<double>(b)) / den;
          if (std::abs(img - lambda) < tol) ++count;
        }
  return count;
}

}  // namespace holocurve
