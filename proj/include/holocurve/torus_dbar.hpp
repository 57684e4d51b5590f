#pragma once

// Spectral Cauchy-Riemann operators D = dbar + A on the trivial bundle over
// T^2 with unit periods.  In the Fourier basis e_{kl} = exp(2 pi i (k s + l t))
// the unperturbed symbol is dbar e_{kl} = 2 pi i (k + i l) e_{kl}.

#include <map>

#include "holocurve/core.hpp"
#include "holocurve/rank.hpp"

namespace holocurve {

struct TorusSpectralFunction {
  int truncation = 0;  // |k|, |l| <= N
  int fiber_dim = 1;
  std::vector<CVec> coeff;  // (2N+1)^2 entries, fiber vectors
  bool real_valued = false;

  TorusSpectralFunction(int n_trunc, int n_fiber)
      : truncation(n_trunc), fiber_dim(n_fiber),
        coeff((2 * n_trunc + 1) * (2 * n_trunc + 1), CVec::Zero(n_fiber)) {}
  int idx(int k, int l) const {
    const int n = truncation;
    return (k + n) * (2 * n + 1) + (l + n);
  }
  CVec& at(int k, int l) { return coeff[idx(k, l)]; }
  const CVec& at(int k, int l) const { return coeff[idx(k, l)]; }
  bool in_band(int k, int l) const { return std::abs(k) <= truncation && std::abs(l) <= truncation; }
  // enforce conjugate symmetry c_{-k,-l} = conj(c_{k,l}) for real-valued data
  void enforce_real() {
    const int n = truncation;
    for (int k = -n; k <= n; ++k)
      for (int l = -n; l <= n; ++l) {
        const CVec sym = 0.5 * (at(k, l) + at(-k, -l).conjugate());
        at(k, l) = sym;
        at(-k, -l) = sym.conjugate();
      }
  }
  CVec eval(double s, double t) const {
    CVec v = CVec::Zero(fiber_dim);
    const int n = truncation;
    for (int k = -n; k <= n; ++k)
      for (int l = -n; l <= n; ++l)
        v += at(k, l) * std::exp(Complex(0, kTwoPi * (k * s + l * t)));
    return v;
  }
};

// Real-linear zeroth-order term A(s,t) u = P(s,t) u + Q(s,t) conj(u) with
// Fourier-polynomial matrix coefficients.
struct TorusZerothOrder {
  int fiber_dim = 1;
  std::map<std::pair<int, int>, CMat> p_coeff;  // complex-linear part
  std::map<std::pair<int, int>, CMat> q_coeff;  // complex-antilinear part
  int bandwidth() const {
    int b = 0;
    for (const auto& [kl, m] : p_coeff) b = std::max({b, std::abs(kl.first), std::abs(kl.second)});
    for (const auto& [kl, m] : q_coeff) b = std::max({b, std::abs(kl.first), std::abs(kl.second)});
    return b;
  }
  bool zero() const { return p_coeff.empty() && q_coeff.empty(); }
};

// Apply D = dbar + A to a spectral function (Galerkin projection onto the band).
inline TorusSpectralFunction torus_dbar_apply(const TorusSpectralFunction& u, const TorusZerothOrder& a) {
  const int n = u.truncation;
  TorusSpectralFunction out(n, u.fiber_dim);
  for (int k = -n; k <= n; ++k)
    for (int l = -n; l <= n; ++l) {
      const Complex symbol = Complex(0, kTwoPi) * Complex(k, l);  // 2 pi i (k + i l)
      out.at(k, l) += symbol * u.at(k, l);
    }
  for (const auto& [kl, m] : a.p_coeff)
    for (int k = -n; k <= n; ++k)
      for (int l = -n; l <= n; ++l) {
        const int kk = k + kl.first, ll = l + kl.second;
        if (out.in_band(kk, ll)) out.at(kk, ll) += m * u.at(k, l);
      }
  for (const auto& [kl, m] : a.q_coeff)
    for (int k = -n; k <= n; ++k)
      for (int l = -n; l <= n; ++l) {
        // conj(u) has coefficients conj(c_{-k,-l}) at (k,l)
        const int kk = -k + kl.first, ll = -l + kl.second;
        if (out.in_band(kk, ll)) out.at(kk, ll) += m * u.at(k, l).conjugate();
      }
  return out;
}

// Assemble the real matrix of D on the truncated Fourier space.  Real
// coordinates: (Re c, Im c) per mode per fiber component.
inline AssembledOperator assemble_torus_dbar(int n_trunc, int fiber_dim, const TorusZerothOrder& a) {
  if (!a.zero() && a.bandwidth() > n_trunc / 2)
    throw DomainError("assemble_torus_dbar: zeroth-order band exceeds N/2");
  const int modes = (2 * n_trunc + 1) * (2 * n_trunc + 1);
  const int dim = 2 * fiber_dim * modes;
  AssembledOperator op;
  op.matrix = Mat::Zero(dim, dim);
  op.domain_desc = "Fourier modes |k|,|l| <= " + std::to_string(n_trunc) + ", C^" + std::to_string(fiber_dim);
  op.codomain_desc = op.domain_desc;
  op.zeroth_order_desc = a.zero() ? "A = 0" : "A = P + Q conj, band " + std::to_string(a.bandwidth());
  op.complex_linear = a.q_coeff.empty();
  TorusSpectralFunction basis(n_trunc, fiber_dim);
  int col = 0;
  for (int mode = 0; mode < modes; ++mode)
    for (int f = 0; f < fiber_dim; ++f)
      for (int part = 0; part < 2; ++part) {
        basis.coeff[mode](f) = (part == 0) ? Complex(1, 0) : Complex(0, 1);
        const TorusSpectralFunction img = torus_dbar_apply(basis, a);
        for (int m2 = 0; m2 < modes; ++m2)
          for (int f2 = 0; f2 < fiber_dim; ++f2) {
            op.matrix(2 * (m2 * fiber_dim + f2), col) = img.coeff[m2](f2).real();
            op.matrix(2 * (m2 * fiber_dim + f2) + 1, col) = img.coeff[m2](f2).imag();
          }
        basis.coeff[mode](f) = Complex(0, 0);
        ++col;
      }
  return op;
}

}  // namespace holocurve
