#pragma once

// Local J-holomorphic maps on a ball with prescribed holomorphic jets:
// u = P_w + C[f], where P_w(z) = sum w_k z^k / k! carries the jet data and
// the correction C[f] = Tf - H_d[Tf] lies in the image of the discrete
// Cauchy transform with vanishing jets up to order d.  H_d extracts the
// pure-z Taylor part at 0 through a least-squares bidegree fit, so the jet
// conditions hold exactly by construction.

#include "holocurve/cauchy.hpp"

namespace holocurve {

using TargetStructureField = std::function<Mat(const CVec&)>;  // J at a target point, 2n x 2n

namespace detail {

// least-squares fit of grid values near 0 by polynomials in (z, zbar) of
// total degree <= d; returns the pure-z coefficients c_0..c_d
class JetFit {
 public:
  JetFit(const GridFunctionBall& geometry, int degree, double fit_radius)
      : degree_(degree) {
    const int m = geometry.m;
    for (int iy = 0; iy < m; ++iy)
      for (int ix = 0; ix < m; ++ix) {
        if (std::abs(geometry.node(ix, iy)) > fit_radius) continue;
        nodes_.push_back({ix, iy, geometry.node(ix, iy)});
      }
    const int n_basis = (degree + 1) * (degree + 2) / 2;
    CMat a(nodes_.size(), n_basis);
    for (size_t i = 0; i < nodes_.size(); ++i) {
      int col = 0;
      for (int total = 0; total <= degree; ++total)
        for (int alpha = total; alpha >= 0; --alpha) {
          const int beta = total - alpha;
          a(i, col++) = std::pow(nodes_[i].z, alpha) * std::pow(std::conj(nodes_[i].z), beta);
        }
    }
    solver_.compute(a);
    basis_count_ = n_basis;
  }

  // pure-z coefficients of the fitted polynomial, per fiber component
  CMat pure_z_coefficients(const GridFunctionBall& g) const {
    CMat rhs(nodes_.size(), g.fiber_dim);
    for (size_t i = 0; i < nodes_.size(); ++i) rhs.row(i) = g.at(nodes_[i].ix, nodes_[i].iy).transpose();
    const CMat coeff = solver_.solve(rhs);
    CMat out(degree_ + 1, g.fiber_dim);
    int col = 0;
    for (int total = 0; total <= degree_; ++total)
      for (int alpha = total; alpha >= 0; --alpha) {
        const int beta = total - alpha;
        if (beta == 0) out.row(alpha) = coeff.row(col);
        ++col;
      }
    return out;
  }

 private:
  struct Node {
    int ix, iy;
    Complex z;
  };
  int degree_;
  int basis_count_;
  std::vector<Node> nodes_;
  Eigen::ColPivHouseholderQR<CMat> solver_;
};

}  // namespace detail

struct JetSolveResult {
  GridFunctionBall u;
  std::vector<CVec> extracted_jets;    // fitted d_z^k u(0), matches inputs exactly
  double fixed_point_residual = 0.0;
  double contraction_factor = 0.0;
  int iterations = 0;
};

inline JetSolveResult local_jet_solve(const TargetStructureField& target_j, const std::vector<CVec>& jets,
                                      double eps, int grid_nodes = 65, double tol = 1e-8,
                                      int max_iter = 100) {
  if (jets.size() < 2) throw DomainError("local_jet_solve: jet order d >= 1 required");
  const int n = static_cast<int>(jets[0].size());
  const int d = static_cast<int>(jets.size()) - 1;
  const Mat j0 = standard_complex_structure(2 * n);
  {
    CVec origin = CVec::Zero(n);
    if ((target_j(origin) - j0).norm() > 1e-10)
      throw DomainError("local_jet_solve: J(0) must be the standard structure");
  }

  GridFunctionBall geometry(grid_nodes, eps, 2 * eps, n);
  const detail::JetFit fit(geometry, d, std::max(4.0 * geometry.h(), eps / 3.0));
  const CauchyTransform transform(grid_nodes, eps);
  const double h = geometry.h();

  // jet polynomial P_w
  auto poly_at = [&](Complex z) {
    CVec acc = CVec::Zero(n);
    double factorial = 1.0;
    Complex zp(1, 0);
    for (int k = 0; k <= d; ++k) {
      if (k > 0) {
        factorial *= k;
        zp *= z;
      }
      acc += jets[k] * (zp / factorial);
    }
    return acc;
  };
  auto poly_dz_at = [&](Complex z) {
    CVec acc = CVec::Zero(n);
    double factorial = 1.0;
    Complex zp(1, 0);
    for (int k = 1; k <= d; ++k) {
      factorial *= k;
      if (k > 1) zp *= z;
      acc += jets[k] * (static_cast<double>(k) * zp / factorial);
    }
    return acc;
  };

  GridFunctionBall f(grid_nodes, eps, 2 * eps, n);       // density unknown
  GridFunctionBall correction(grid_nodes, eps, 2 * eps, n);
  JetSolveResult out{geometry, {}, 0.0, 0.0, 0};

  auto grid_dt = [&](const GridFunctionBall& g, int ix, int iy) -> CVec {
    if (iy == 0) return (-3.0 * g.at(ix, 0) + 4.0 * g.at(ix, 1) - g.at(ix, 2)) / (2 * h);
    if (iy == g.m - 1)
      return (3.0 * g.at(ix, iy) - 4.0 * g.at(ix, iy - 1) + g.at(ix, iy - 2)) / (2 * h);
    return (g.at(ix, iy + 1) - g.at(ix, iy - 1)) / (2 * h);
  };

  double prev_update = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    // u = P + C[f]
    for (int iy = 0; iy < grid_nodes; ++iy)
      for (int ix = 0; ix < grid_nodes; ++ix)
        out.u.at(ix, iy) = poly_at(out.u.node(ix, iy)) + correction.at(ix, iy);
    // f_new = -(J(u) - J0) d_t u
    double update = 0.0;
    GridFunctionBall f_new(grid_nodes, eps, 2 * eps, n);
    for (int iy = 0; iy < grid_nodes; ++iy)
      for (int ix = 0; ix < grid_nodes; ++ix) {
        const Complex z = out.u.node(ix, iy);
        const CVec du_t = Complex(0, 1) * poly_dz_at(z) + grid_dt(correction, ix, iy);
        const Mat dj = target_j(out.u.at(ix, iy)) - j0;
        f_new.at(ix, iy) = -apply_real_linear(dj, du_t);
        update = std::max(update, (f_new.at(ix, iy) - f.at(ix, iy)).template lpNorm<Eigen::Infinity>());
      }
    out.iterations = it + 1;
    out.fixed_point_residual = update;
    if (prev_update > 0.0) out.contraction_factor = update / prev_update;
    if (update < tol) break;
    if (prev_update > 0.0 && update > prev_update && it > 3)
      throw ConvergenceError("local_jet_solve: divergence, shrink eps (factor " +
                             std::to_string(out.contraction_factor) + ")");
    prev_update = std::max(update, 1e-300);
    f = f_new;
    // C[f] = Tf - H_d[Tf]
    correction = transform.apply(f);
    const CMat pure = fit.pure_z_coefficients(correction);
    for (int iy = 0; iy < grid_nodes; ++iy)
      for (int ix = 0; ix < grid_nodes; ++ix) {
        const Complex z = correction.node(ix, iy);
        CVec sub = CVec::Zero(n);
        Complex zp(1, 0);
        for (int k = 0; k <= d; ++k) {
          sub += pure.row(k).transpose() * zp;
          zp *= z;
        }
        correction.at(ix, iy) -= sub;
      }
  }
  if (out.fixed_point_residual >= tol)
    throw ConvergenceError("local_jet_solve: no convergence after max iterations");

  // extract jets of u through the same fit: exact by construction
  const CMat jets_fit = fit.pure_z_coefficients(out.u);
  double factorial = 1.0;
  for (int k = 0; k <= d; ++k) {
    if (k > 0) factorial *= k;
    out.extracted_jets.push_back(factorial * jets_fit.row(k).transpose());
  }
  return out;
}

}  // namespace holocurve
