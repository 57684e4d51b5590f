#pragma once

// Rational spectral basis for smooth sections of the model bundles E_k over
// the Riemann sphere.  In chart 1,
//     phi_ab(z) = z^a zbar^b / (1 + |z|^2)^N,  0 <= a <= k+N, 0 <= b <= N,
// and the chart-2 representative w^k phi_ab(1/w) = w^{k+N-a} wbar^{N-b} /
// (1 + |w|^2)^N stays in the same family, so sections are globally smooth
// and chart transitions are exact.  For k = 0 the span is the space of
// spherical harmonics of degree <= N.

#include "holocurve/core.hpp"

namespace holocurve {

struct SphereBasisSpec {
  int chern = 0;  // k
  int trunc = 0;  // N
  int max_a() const { return chern + trunc; }
  int max_b() const { return trunc; }
  int count() const { return (max_a() + 1) * (max_b() + 1); }
  int index(int a, int b) const { return a * (max_b() + 1) + b; }
};

struct SphereBasisEval {
  CVec value, dz, dzb;  // per basis function, Wirtinger derivatives
};

namespace detail {

// values and Wirtinger derivatives of z^p zbar^q (1+|z|^2)^{-N} for all
// (p, q) in the (P, Q) box
inline void monomial_table(Complex z, int max_p, int max_q, int n_weight, CMat& val, CMat& dz, CMat& dzb) {
  std::vector<Complex> zp(max_p + 2), zq(max_q + 2);
  zp[0] = Complex(1, 0);
  for (int p = 1; p < static_cast<int>(zp.size()); ++p) zp[p] = zp[p - 1] * z;
  const Complex zb = std::conj(z);
  zq[0] = Complex(1, 0);
  for (int q = 1; q < static_cast<int>(zq.size()); ++q) zq[q] = zq[q - 1] * zb;
  const double denom = 1.0 + std::norm(z);
  const double wn = std::pow(denom, -n_weight);
  const double wn1 = wn / denom;
  val.resize(max_p + 1, max_q + 1);
  dz.resize(max_p + 1, max_q + 1);
  dzb.resize(max_p + 1, max_q + 1);
  for (int p = 0; p <= max_p; ++p)
    for (int q = 0; q <= max_q; ++q) {
      val(p, q) = zp[p] * zq[q] * wn;
      dz(p, q) = (p > 0 ? static_cast<double>(p) * zp[p - 1] * zq[q] * wn : Complex(0, 0)) -
                 static_cast<double>(n_weight) * zp[p] * zq[q + 1] * wn1;
      dzb(p, q) = (q > 0 ? static_cast<double>(q) * zp[p] * zq[q - 1] * wn : Complex(0, 0)) -
                  static_cast<double>(n_weight) * zp[p + 1] * zq[q] * wn1;
    }
}

}  // namespace detail

// chart-1 values: phi_ab at z
inline SphereBasisEval sphere_basis_chart1(const SphereBasisSpec& spec, Complex z) {
  CMat val, dz, dzb;
  detail::monomial_table(z, spec.max_a(), spec.max_b(), spec.trunc, val, dz, dzb);
  SphereBasisEval out;
  out.value.resize(spec.count());
  out.dz.resize(spec.count());
  out.dzb.resize(spec.count());
  for (int a = 0; a <= spec.max_a(); ++a)
    for (int b = 0; b <= spec.max_b(); ++b) {
      const int i = spec.index(a, b);
      out.value(i) = val(a, b);
      out.dz(i) = dz(a, b);
      out.dzb(i) = dzb(a, b);
    }
  return out;
}

// chart-2 bundle representative: w^k phi_ab(1/w) evaluated at w, i.e. the
// monomial with exponents (k+N-a, N-b) in the same rational family
inline SphereBasisEval sphere_basis_chart2(const SphereBasisSpec& spec, Complex w) {
  CMat val, dz, dzb;
  detail::monomial_table(w, spec.max_a(), spec.max_b(), spec.trunc, val, dz, dzb);
  SphereBasisEval out;
  out.value.resize(spec.count());
  out.dz.resize(spec.count());
  out.dzb.resize(spec.count());
  for (int a = 0; a <= spec.max_a(); ++a)
    for (int b = 0; b <= spec.max_b(); ++b) {
      const int i = spec.index(a, b);
      const int p = spec.chern + spec.trunc - a, q = spec.trunc - b;
      out.value(i) = val(p, q);
      out.dz(i) = dz(p, q);
      out.dzb(i) = dzb(p, q);
    }
  return out;
}

// Realification of a complex (nodes x n) table into (2 nodes x 2n):
// column 2j is the Re-coefficient direction (value phi_j), column 2j+1 the
// Im-coefficient direction (value i phi_j).
inline Mat realify_table(const CMat& t) {
  Mat r(2 * t.rows(), 2 * t.cols());
  for (int i = 0; i < t.rows(); ++i)
    for (int j = 0; j < t.cols(); ++j) {
      const Complex v = t(i, j);
      r(2 * i, 2 * j) = v.real();
      r(2 * i + 1, 2 * j) = v.imag();
      r(2 * i, 2 * j + 1) = -v.imag();
      r(2 * i + 1, 2 * j + 1) = v.real();
    }
  return r;
}

// ---------------------------------------------------------------------------
// Fubini-Study exponential map on the Riemann sphere (curvature-4 round
// metric): exp_z(v) = M_z(w0 tanc|w0|), w0 = v/(1+|z|^2), with the Moebius
// isometry M_z(g) = (g + z)/(1 - zbar g).  Chart transitions are isometries,
// so the same formula serves both charts and the additive section
// parametrization stays globally smooth.

namespace detail {

inline double tanc(double rho) {  // tan(rho)/rho
  if (rho < 1e-4) {
    const double s = rho * rho;
    return 1.0 + s / 3.0 + 2.0 * s * s / 15.0;
  }
  return std::tan(rho) / rho;
}

inline double tanc_prime_s(double rho) {  // d/ds [tan(sqrt s)/sqrt s], s = rho^2
  if (rho < 1e-3) {
    const double s = rho * rho;
    return 1.0 / 3.0 + 4.0 * s / 15.0 + 17.0 * s * s / 105.0;
  }
  const double t = std::tan(rho);
  const double sec2 = 1.0 + t * t;
  return (sec2 * rho - t) / (2.0 * rho * rho * rho);
}

}  // namespace detail

struct SphereExpJet {
  Complex value;                    // exp_z(v)
  Complex d_z, d_zb, d_v, d_vb;     // total Wirtinger partials
};

inline SphereExpJet sphere_exp(Complex z, Complex v) {
  const double s1 = 1.0 + std::norm(z);
  const Complex w0 = v / s1;
  const double rho = std::abs(w0);
  const double t = detail::tanc(rho);
  const double tp = detail::tanc_prime_s(rho);
  const Complex g = w0 * t;
  const Complex den = 1.0 - std::conj(z) * g;
  const Complex den2 = den * den;
  // partials of E = (g+z)/(1 - zbar g) at fixed/through g
  const Complex e_g = s1 / den2;
  const Complex e_z_direct = 1.0 / den;
  const Complex e_zb_direct = (g + z) * g / den2;
  // g = w0 tanc(|w0|^2): dg/dw0 = t + rho^2 tp, dg/dw0bar = w0^2 tp
  const Complex g_w0 = Complex(t + rho * rho * tp, 0);
  const Complex g_w0b = w0 * w0 * tp;
  // w0 = v / s1: dw0/dv = 1/s1, dw0/dz = -v zbar / s1^2, dw0/dzb = -v z / s1^2
  const Complex w0_z = -v * std::conj(z) / (s1 * s1);
  const Complex w0_zb = -v * z / (s1 * s1);
  SphereExpJet out;
  out.value = (g + z) / den;
  out.d_v = e_g * g_w0 / s1;
  out.d_vb = e_g * g_w0b / s1;
  out.d_z = e_z_direct + e_g * (g_w0 * w0_z + g_w0b * std::conj(w0_zb));
  out.d_zb = e_zb_direct + e_g * (g_w0 * w0_zb + g_w0b * std::conj(w0_z));
  return out;
}

// inverse of exp_0: the tangent vector v with exp_0(v) = zeta
inline Complex sphere_exp0_inverse(Complex zeta) {
  const double r = std::abs(zeta);
  if (r == 0.0) return {0, 0};
  return std::atan(r) * zeta / r;
}

}  // namespace holocurve
