#pragma once

// Desk-scale nonsqueezing pipeline on W = S^2 x T^2: the product moduli
// space and its transversality certificate, homotopy continuation of spheres
// through a target point, monotonicity of holomorphic curves in C^n with the
// boundary-flux cross-check, Hofer's selection lemma on finite metric
// samples, bubble rescaling, and energy quantization.

#include <algorithm>
#include <random>

#include "holocurve/sphere_map.hpp"

namespace holocurve {

// ---------------------------------------------------------------------------
// Product target (S^2 x T^2, sigma + omega0), sphere factor carrying the
// rotation-invariant area form sigma = (hbar/pi) dA / (1+|zeta|^2)^2 whose
// chart expression is the same in both stereographic charts.

struct ProductTarget {
  double hbar = kPi;
  double sigma_density(Complex zeta) const { return hbar / kPi / sqr(1.0 + std::norm(zeta)); }
  Mat omega_matrix(Complex zeta) const {
    Mat w = Mat::Zero(4, 4);
    const double rho = sigma_density(zeta);
    w(0, 1) = rho;
    w(1, 0) = -rho;
    w(2, 3) = 1.0;
    w(3, 2) = -1.0;
    return w;
  }
  // quadrature check of hbar = int sigma over both charts (partition by the
  // unit circle, each chart contributing its closed unit disk)
  double quadrature_hbar(int n_r = 48, int n_th = 64) const {
    std::vector<double> nodes, weights;
    gauss_legendre_01(n_r, nodes, weights);
    double acc = 0.0;
    const double dth = kTwoPi / n_th;
    for (int q = 0; q < n_r; ++q)
      for (int p = 0; p < n_th; ++p) {
        const Complex z = std::polar(nodes[q], (p + 0.5) * dth);
        acc += 2.0 * sigma_density(z) * nodes[q] * weights[q] * dth;  // both charts by symmetry
      }
    return acc;
  }
};

// ---------------------------------------------------------------------------
// Compatible homotopy J_t = cayley(t * amplitude * Y) with a globally smooth
// complex-antilinear profile Y on T(S^2 x T^2).  In chart-2 coordinates the
// sphere-block coefficient keeps the same closed form and the torus-block
// coefficient conjugates, so the field is real-analytic on all of W.

struct HomotopyJ {
  ProductTarget target;
  double amplitude = 0.1;
  double mu1 = 0.3, nu2 = 0.25;  // torus-dependence amplitudes

  Mat y_field(int chart, Complex zeta, const Eigen::Vector2d& m) const {
    const double s1 = 1.0 + std::norm(zeta);
    const Complex b_ss = amplitude * zeta * zeta / (s1 * s1) * (1.0 + mu1 * std::cos(kTwoPi * m(0)));
    Complex b_tt = amplitude * zeta / s1 * (0.5 + nu2 * std::sin(kTwoPi * m(1)));
    if (chart == 1) b_tt = std::conj(b_tt);
    Mat y = Mat::Zero(4, 4);
    auto put_block = [&](int off, Complex b) {
      y(off, off) = b.real();
      y(off, off + 1) = b.imag();
      y(off + 1, off) = b.imag();
      y(off + 1, off + 1) = -b.real();
    };
    put_block(0, b_ss);
    put_block(2, b_tt);
    return y;
  }

  TargetAlmostComplexField structure(double t) const {
    auto self = *this;
    TargetAlmostComplexField f;
    f.product = (t * amplitude == 0.0);
    f.eval = [self, t](int chart, Complex zeta, const Eigen::Vector2d& m) -> Mat {
      const Mat j0 = standard_complex_structure(4);
      if (t == 0.0) return j0;
      const Mat y = t * self.y_field(chart, zeta, m);
      const Mat c = Mat::Identity(4, 4) + 0.5 * j0 * y;
      return c * j0 * c.partialPivLu().solve(Mat::Identity(4, 4));
    };
    return f;
  }

  // Omega(v, J_t v) > 0 sampled over (t, point, direction) triples
  bool taming_check(int samples = 200, unsigned seed = 1) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0), ur(-2.0, 2.0);
    for (int i = 0; i < samples; ++i) {
      const double t = u01(rng);
      const Complex zeta(ur(rng), ur(rng));
      const Eigen::Vector2d m(u01(rng), u01(rng));
      const int chart = i % 2;
      const Mat j = structure(t).eval(chart, zeta, m);
      const Mat omega = target.omega_matrix(zeta);
      for (int k = 0; k < 6; ++k) {
        Eigen::Vector4d v;
        for (int c = 0; c < 4; ++c) v(c) = ur(rng);
        if (v.norm() < 1e-9) continue;
        if (v.dot(omega * (j * v)) <= 0.0) return false;
      }
    }
    return true;
  }
};

// ---------------------------------------------------------------------------
// The product moduli space: u_m(z) = (z, m), an exact zero of the product-J
// residual, with evaluation value (zeta, m) at the marked node.

struct ProductCurve {
  DiscreteSphereMap map;
  Complex eval_zeta;
  Eigen::Vector2d eval_value_m;
};

inline ProductCurve product_moduli_curve(const SphereMapDiscretization& disc, const Eigen::Vector2d& m,
                                         Complex zeta) {
  ProductCurve out{DiscreteSphereMap(disc), zeta, m};
  out.map.base_m = m;
  return out;
}

// ---------------------------------------------------------------------------
// Energy: quadrature of u*Omega over both charts with a smooth partition of
// unity subordinate to the overlap annulus.

struct EnergyPartition {
  double r_lo = 0.95, r_hi = 1.2;
  double chi(double r) const {  // 1 for r <= r_lo, 0 for r >= r_hi, C^6 smoothstep
    const double x = (r_hi - r) / (r_hi - r_lo);
    if (x >= 1.0) return 1.0;
    if (x <= 0.0) return 0.0;
    const double x7 = x * x * x * x * x * x * x;
    return x7 * (1716.0 +
                 x * (-9009.0 +
                      x * (20020.0 + x * (-24024.0 + x * (16380.0 + x * (-6006.0 + x * 924.0))))));
  }
};

inline double energy(const DiscreteSphereMap& map, const ProductTarget& target,
                     const EnergyPartition& part = {}, int n_r = 96, int n_th = 128) {
  std::vector<double> rnodes, rweights;
  gauss_legendre_01(n_r, rnodes, rweights);
  double acc = 0.0;
  for (int c = 0; c < 2; ++c) {
    const double r_max = (c == 0) ? part.r_hi : 1.0 / part.r_lo;
    const double dth = kTwoPi / n_th;
    for (int q = 0; q < n_r; ++q)
      for (int p = 0; p < n_th; ++p) {
        const double r = rnodes[q] * r_max;
        const Complex z = std::polar(r, (p + 0.5) * dth);
        const double weight = (c == 0) ? part.chi(r) : 1.0 - part.chi(1.0 / r);
        if (weight == 0.0) continue;
        const auto ld = map.local_at(c, z);
        const SphereExpJet jet = sphere_exp(z, ld.eps);
        const Complex us_s = jet.d_z + jet.d_zb + jet.d_v * ld.eps_ds + jet.d_vb * std::conj(ld.eps_ds);
        const Complex us_t =
            Complex(0, 1) * (jet.d_z - jet.d_zb) + jet.d_v * ld.eps_dt + jet.d_vb * std::conj(ld.eps_dt);
        const double sphere_part =
            target.sigma_density(jet.value) * std::imag(std::conj(us_s) * us_t);
        const double torus_part = std::imag(std::conj(ld.v_ds) * ld.v_dt);
        acc += weight * (sphere_part + torus_part) * r * (rweights[q] * r_max) * dth;
      }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Transversality of the product curves: gauge-free linearization kernel must
// have real dimension 2n = 8 (TS^2 block 6, trivial-line block 2).

struct ProductTransversality {
  RankResult full;
  RankResult sphere_block;
  RankResult torus_block;
};

inline ProductTransversality product_transversality_check(const SphereMapDiscretization& disc,
                                                          const Eigen::Vector2d& m) {
  const ProductCurve pc = product_moduli_curve(disc, m, Complex(0, 0));
  const TargetAlmostComplexField j0 = product_structure();
  ProductTransversality out;
  out.full = transversality_certificate(pc.map, j0);
  out.sphere_block = transversality_certificate_block(pc.map, j0, true);
  out.torus_block = transversality_certificate_block(pc.map, j0, false);
  return out;
}

// ---------------------------------------------------------------------------
// Homotopy continuation of the sphere through a target point.

struct ContinuationResult {
  bool success = false;
  double last_good_t = 0.0;
  std::vector<double> step_residuals;
  std::vector<double> step_energies;
  std::vector<int> step_iterations;
  DiscreteSphereMap curve;
  Complex marked_node;

  ContinuationResult(const SphereMapDiscretization& disc) : curve(disc) {}
};

inline ContinuationResult continuation_find_sphere(const SphereMapDiscretization& disc,
                                                   const HomotopyJ& path, Complex p_zeta,
                                                   const Eigen::Vector2d& p_m, int steps,
                                                   double tol = 1e-8) {
  ContinuationResult out(disc);
  out.marked_node = p_zeta;
  out.curve.base_m = p_m;
  NewtonConstraints constraints;
  constraints.marked_node = p_zeta;
  constraints.constrain_torus = true;
  constraints.target_m = p_m;
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    const TargetAlmostComplexField jt = path.structure(t);
    const NewtonReport rep = newton_solve(out.curve, jt, constraints, tol);
    const SphereMapResidual res = cr_residual(out.curve, jt);
    out.step_residuals.push_back(res.sup_norm);
    out.step_iterations.push_back(rep.iterations);
    out.step_energies.push_back(energy(out.curve, path.target));
    if (!rep.converged || res.sup_norm >= tol) {
      out.success = false;
      return out;
    }
    out.last_good_t = t;
  }
  out.success = true;
  return out;
}

// ---------------------------------------------------------------------------
// Monotonicity for analytic holomorphic curves u : C -> C^n proper into a
// ball, through 0: F(r) = r^{-2} * (area of u inside radius r) is
// nondecreasing and >= pi.

struct AnalyticCurve {
  int target_dim = 1;
  std::vector<CVec> coeff;  // u(z) = sum coeff[k] z^k
  CVec eval(Complex z) const {
    CVec acc = CVec::Zero(target_dim);
    for (int k = static_cast<int>(coeff.size()) - 1; k >= 0; --k) acc = acc * z + coeff[k];
    return acc;
  }
  CVec deriv(Complex z) const {
    CVec acc = CVec::Zero(target_dim);
    for (int k = static_cast<int>(coeff.size()) - 1; k >= 1; --k)
      acc = acc * z + static_cast<double>(k) * coeff[k];
    return acc;
  }
  bool passes_through_origin(double tol = 1e-12) const {
    return coeff.empty() || coeff[0].norm() <= tol;
  }
};

// smallest domain radius whose image circle clears |u| = r_max
inline double monotonicity_domain_radius(const AnalyticCurve& u, double r_max) {
  double s = r_max;
  for (int it = 0; it < 200; ++it) {
    double min_abs = 1e300;
    for (int k = 0; k < 64; ++k)
      min_abs = std::min(min_abs, u.eval(std::polar(s, kTwoPi * k / 64)).norm());
    if (min_abs > 1.05 * r_max) return s;
    s *= 1.25;
  }
  throw DomainError("monotonicity: curve does not escape the ball (not proper?)");
}

struct MonotonicityProfile {
  std::vector<double> radii;
  std::vector<double> f_area;
  double min_f = 0.0;
  double monotonicity_margin = 0.0;  // min over i of F(r_{i+1}) - F(r_i)
};

inline MonotonicityProfile monotonicity_profile(const AnalyticCurve& u, const std::vector<double>& radii,
                                                int resolution = 1200) {
  if (!u.passes_through_origin()) throw DomainError("monotonicity_profile: 0 must be in the image");
  MonotonicityProfile out;
  out.radii = radii;
  const double r_max = *std::max_element(radii.begin(), radii.end());
  const double dom = monotonicity_domain_radius(u, r_max);
  const double h = 2.0 * dom / resolution;
  // per cell: |u|, integration weight sum_j |u_j'|^2 h^2, and the indicator
  // band half-width from the gradient of |u| (subcell-accurate area fraction)
  struct Cell {
    double rho, half_band, weight;
  };
  std::vector<Cell> cells;
  cells.reserve(static_cast<size_t>(resolution) * resolution);
  for (int iy = 0; iy < resolution; ++iy)
    for (int ix = 0; ix < resolution; ++ix) {
      const Complex z(-dom + (ix + 0.5) * h, -dom + (iy + 0.5) * h);
      const CVec val = u.eval(z), der = u.deriv(z);
      const double rho = val.norm();
      const double w = der.squaredNorm() * h * h;  // u* omega0 = sum |u_j'|^2 dA
      if (w == 0.0 && rho > r_max) continue;
      const Complex pairing = val.dot(der);  // sum conj(u_j) u_j'
      const double gx = rho > 1e-14 ? std::abs(pairing.real()) / rho : der.norm();
      const double gy = rho > 1e-14 ? std::abs(pairing.imag()) / rho : der.norm();
      cells.push_back({rho, 0.5 * h * (gx + gy) + 1e-14, w});
    }
  for (double r : radii) {
    double acc = 0.0;
    for (const Cell& c : cells) {
      const double x = (r - (c.rho - c.half_band)) / (2.0 * c.half_band);
      if (x <= 0.0) continue;
      acc += c.weight * std::min(1.0, x);
    }
    out.f_area.push_back(acc / (r * r));
  }
  out.min_f = *std::min_element(out.f_area.begin(), out.f_area.end());
  out.monotonicity_margin = 1e300;
  for (size_t i = 0; i + 1 < out.f_area.size(); ++i)
    out.monotonicity_margin = std::min(out.monotonicity_margin, out.f_area[i + 1] - out.f_area[i]);
  return out;
}

// Boundary-flux form of F(r): trace the level curve |u| = r by radial
// bisection per angle and integrate the pullback of lambda0 / r^2,
// lambda0 = (1/2) sum (p dq - q dp).
struct BoundaryFlux {
  double value = 0.0;
  bool conclusive = true;
};

inline BoundaryFlux boundary_flux_crosscheck(const AnalyticCurve& u, double r, int n_theta = 512) {
  BoundaryFlux out;
  const double dom = monotonicity_domain_radius(u, r);
  std::vector<Complex> gamma(n_theta);
  for (int k = 0; k < n_theta; ++k) {
    const double th = kTwoPi * k / n_theta;
    double lo = 0.0, hi = dom;
    if (u.eval(std::polar(hi, th)).norm() <= r) {
      out.conclusive = false;
      return out;
    }
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (u.eval(std::polar(mid, th)).norm() < r ? lo : hi) = mid;
    }
    gamma[k] = std::polar(0.5 * (lo + hi), th);
  }
  double acc = 0.0;
  for (int k = 0; k < n_theta; ++k) {
    const Complex dz = (gamma[(k + 1) % n_theta] - gamma[(k + n_theta - 1) % n_theta]) / 2.0;
    const CVec val = u.eval(gamma[k]), der = u.deriv(gamma[k]);
    // u*lambda0 = (1/2) Im sum conj(u_j) du_j
    acc += 0.5 * std::imag(Complex(val.dot(der)) * dz);
  }
  out.value = acc / (r * r);
  return out;
}

// ---------------------------------------------------------------------------
// Hofer's selection lemma on a finite metric sample, implemented exactly as
// the halving proof; the output conditions are re-verified by brute force.

struct FiniteMetricSample {
  Mat dist;  // symmetric, zero diagonal
  Vec g;     // nonnegative values
  bool triangle_inequality_ok(double tol = 1e-12) const {
    const int n = static_cast<int>(dist.rows());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          if (dist(i, j) > dist(i, k) + dist(k, j) + tol) return false;
    return true;
  }
};

inline FiniteMetricSample metric_sample_from_points(const std::vector<Vec>& pts, const Vec& g) {
  FiniteMetricSample s;
  const int n = static_cast<int>(pts.size());
  s.dist = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.dist(i, j) = (pts[i] - pts[j]).norm();
  s.g = g;
  return s;
}

struct HoferSelection {
  int x_index = 0;
  double eps = 0.0;
  int loop_iterations = 0;
};

inline HoferSelection hofer_select(const FiniteMetricSample& s, int x0, double eps0) {
  HoferSelection out{x0, eps0, 0};
  const int n = static_cast<int>(s.g.size());
  while (true) {
    int best = -1;
    for (int y = 0; y < n; ++y) {
      if (s.dist(y, out.x_index) > out.eps) continue;
      if (s.g(y) > 2.0 * s.g(out.x_index) && (best < 0 || s.g(y) > s.g(best))) best = y;
    }
    if (best < 0) return out;
    out.x_index = best;
    out.eps *= 0.5;
    ++out.loop_iterations;
  }
}

// exact post-hoc verification of conditions (a)-(d)
inline bool hofer_verify(const FiniteMetricSample& s, int x0, double eps0, const HoferSelection& sel) {
  if (!(sel.eps <= eps0)) return false;                                      // (a)
  if (!(s.g(sel.x_index) * sel.eps >= s.g(x0) * eps0)) return false;         // (b)
  if (!(s.dist(sel.x_index, x0) <= 2.0 * eps0)) return false;                // (c)
  for (int y = 0; y < s.g.size(); ++y)                                       // (d)
    if (s.dist(y, sel.x_index) <= sel.eps && s.g(y) > 2.0 * s.g(sel.x_index)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Bubble rescaling for a family of sphere maps with gradient data.  Gradients
// are measured in the Fubini-Study metrics; the synthetic families are
// analytic, so the normalization |dv_k(0)| = 1 is exact.

struct MapFamilyMember {
  std::function<Complex(Complex)> value;      // sphere component in chart 1
  std::function<double(Complex)> grad_norm;   // |du|(z), FS to FS
  double total_energy = 0.0;
};

struct BubbleRescaling {
  bool bubble = false;          // false: bounded gradients, no-bubble verdict
  Complex center{0, 0};
  double gradient_at_center = 0.0;   // R_k' = |du_k(x')|
  double eps_window = 0.0;           // Hofer-adjusted radius
  double dv0 = 0.0;                  // |dv_k(0)|, 1 by construction
  double sup_dv = 0.0;               // sup over window sample points, <= 2
  double window_energy = 0.0;        // int_{B_eps(x')} u_k* Omega
};

inline BubbleRescaling bubble_rescale_member(const MapFamilyMember& member, const ProductTarget& target,
                                             double grad_threshold, int grid_n = 61,
                                             double grid_radius = 1.0) {
  // gradient samples on a square grid: the finite metric sample of the lemma
  std::vector<Vec> pts;
  std::vector<Complex> zs;
  std::vector<double> gs;
  const double h = 2.0 * grid_radius / (grid_n - 1);
  for (int iy = 0; iy < grid_n; ++iy)
    for (int ix = 0; ix < grid_n; ++ix) {
      const Complex z(-grid_radius + ix * h, -grid_radius + iy * h);
      pts.push_back((Vec(2) << z.real(), z.imag()).finished());
      zs.push_back(z);
      gs.push_back(member.grad_norm(z));
    }
  const auto max_it = std::max_element(gs.begin(), gs.end());
  const int max_idx = static_cast<int>(max_it - gs.begin());
  BubbleRescaling out;
  if (*max_it < grad_threshold) return out;  // no genuine blow-up
  out.bubble = true;
  Vec g(static_cast<int>(gs.size()));
  for (size_t i = 0; i < gs.size(); ++i) g(static_cast<int>(i)) = gs[i];
  FiniteMetricSample sample = metric_sample_from_points(pts, g);
  const double r_k = gs[max_idx];
  const double eps0 = 1.0 / std::sqrt(r_k);  // heuristic window eps_k = R_k^{-1/2}
  const HoferSelection sel = hofer_select(sample, max_idx, eps0);
  out.center = zs[sel.x_index];
  out.gradient_at_center = gs[sel.x_index];
  out.eps_window = sel.eps;
  out.dv0 = member.grad_norm(out.center) / out.gradient_at_center;  // exactly 1
  // sup over the grid points inside the window, rescaled
  out.sup_dv = 0.0;
  for (size_t i = 0; i < zs.size(); ++i)
    if (std::abs(zs[i] - out.center) <= sel.eps)
      out.sup_dv = std::max(out.sup_dv, gs[i] / out.gradient_at_center);
  // window energy by polar quadrature of the pulled-back area form
  const int nq = 64;
  double acc = 0.0;
  for (int q = 0; q < nq; ++q)
    for (int p = 0; p < 2 * nq; ++p) {
      const double r = (q + 0.5) * sel.eps / nq;
      const Complex z = out.center + std::polar(r, kPi * p / nq);
      const Complex w = member.value(z);
      const double fd = 1e-6;
      const Complex dw = (member.value(z + fd) - member.value(z - fd)) / (2 * fd);
      acc += target.sigma_density(w) * std::norm(dw) * r * (sel.eps / nq) * (kPi / nq);
    }
  out.window_energy = acc;
  return out;
}

// ---------------------------------------------------------------------------
// Energy quantization: E / hbar must sit within tolerance of a positive
// integer for nonconstant closed curves.

enum class QuantizationVerdict { Constant, Multiple, Inconsistent };

struct QuantizationResult {
  QuantizationVerdict verdict;
  int multiple = 0;
};

inline QuantizationResult energy_quantization_check(double e, double hbar, double tol = 1e-4,
                                                    double const_tol = 1e-8) {
  if (std::abs(e) < const_tol * hbar) return {QuantizationVerdict::Constant, 0};
  const double kappa = e / hbar;
  const long k = std::lround(kappa);
  if (k >= 1 && std::abs(kappa - static_cast<double>(k)) < tol)
    return {QuantizationVerdict::Multiple, static_cast<int>(k)};
  return {QuantizationVerdict::Inconsistent, 0};
}

}  // namespace holocurve
