#pragma once

// Time-dependent vector fields and flows: classical RK4 with the variational
// equation for flow Jacobians, Hamiltonian vector fields, symplecticity and
// Liouville residuals, and the Moser isotopy producing Darboux charts.

#include "holocurve/core.hpp"
#include "holocurve/symplectic.hpp"

namespace holocurve {

using TimeField = std::function<Vec(double, const Vec&)>;
using TimeFieldJacobian = std::function<Mat(double, const Vec&)>;

struct FlowResult {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Mat> jacobians;
  double step = 0.0;
  std::string integrator = "rk4";
  bool truncated = false;  // trajectory left the evaluator domain
};

inline Mat fd_field_jacobian(const TimeField& f, double t, const Vec& x, double h = 1e-6) {
  const int n = static_cast<int>(x.size());
  Mat j(n, n);
  for (int k = 0; k < n; ++k) {
    Vec e = Vec::Unit(n, k);
    j.col(k) = (f(t, x + h * e) - f(t, x - h * e)) / (2.0 * h);
  }
  return j;
}

// Classical fixed-step RK4 on the augmented system (x, Phi) with
// Phi' = Df(t,x) Phi.  Error O(h^4 T).  Analytic field Jacobian optional.
inline FlowResult flow_with_jacobian(const TimeField& field, const Vec& p0, double t_final, double h,
                                     const TimeFieldJacobian& jac = nullptr, double t_start = 0.0,
                                     int store_every = 1) {
  if (h <= 0) throw DomainError("flow_with_jacobian: step must be positive");
  const int n = static_cast<int>(p0.size());
  auto djac = [&](double t, const Vec& x) { return jac ? jac(t, x) : fd_field_jacobian(field, t, x); };
  FlowResult out;
  out.step = h;
  Vec x = p0;
  Mat phi = Mat::Identity(n, n);
  double t = t_start;
  out.times.push_back(t);
  out.states.push_back(x);
  out.jacobians.push_back(phi);
  const long nsteps = static_cast<long>(std::ceil((t_final - t_start) / h - 1e-12));
  for (long s = 0; s < nsteps; ++s) {
    const double hs = std::min(h, t_final - t);
    const Vec k1 = field(t, x);
    const Mat m1 = djac(t, x) * phi;
    const Vec k2 = field(t + hs / 2, x + hs / 2 * k1);
    const Mat m2 = djac(t + hs / 2, x + hs / 2 * k1) * (phi + hs / 2 * m1);
    const Vec k3 = field(t + hs / 2, x + hs / 2 * k2);
    const Mat m3 = djac(t + hs / 2, x + hs / 2 * k2) * (phi + hs / 2 * m2);
    const Vec k4 = field(t + hs, x + hs * k3);
    const Mat m4 = djac(t + hs, x + hs * k3) * (phi + hs * m3);
    x += hs / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    phi += hs / 6.0 * (m1 + 2 * m2 + 2 * m3 + m4);
    t += hs;
    if (!x.allFinite()) {
      out.truncated = true;
      break;
    }
    if ((s + 1) % store_every == 0 || s + 1 == nsteps) {
      out.times.push_back(t);
      out.states.push_back(x);
      out.jacobians.push_back(phi);
    }
  }
  return out;
}

struct ScalarHamiltonian {
  int dim = 0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

// Unique X with omega(X,.) = -dH, i.e. X = Omega^{-1} dH.
inline Vec hamiltonian_vector_field(const ScalarHamiltonian& ham, const Mat& omega, const Vec& p) {
  if (!check_nondegenerate(omega).nondegenerate) throw DegeneracyError("hamiltonian_vector_field: omega degenerate");
  return omega.lu().solve(ham.gradient(p));
}

inline TimeField hamiltonian_field(const ScalarHamiltonian& ham, const Mat& omega) {
  Eigen::PartialPivLU<Mat> lu(omega);
  auto grad = ham.gradient;
  return [lu, grad](double, const Vec& x) -> Vec { return lu.solve(grad(x)); };
}

// max over samples of || DPhi^T Omega DPhi - Omega ||_F
inline double symplecticity_residual(const FlowResult& flow, const Mat& omega) {
  double worst = 0.0;
  for (const Mat& phi : flow.jacobians)
    worst = std::max(worst, (phi.transpose() * omega * phi - omega).norm());
  return worst;
}

// L_Y omega - omega for a constant-coefficient closed omega, via Cartan:
// L_Y omega = d(iota_Y omega).  Derivatives of Y by central differences.
inline double liouville_residual(const std::function<Vec(const Vec&)>& y, const Mat& omega,
                                 const std::vector<Vec>& samples, double h = 1e-5) {
  const int n = static_cast<int>(omega.rows());
  double worst = 0.0;
  for (const Vec& p : samples) {
    // lambda_j(x) = (Omega^T Y(x))_j; dlambda(e_i,e_j) = d_i lambda_j - d_j lambda_i
    Mat grad(n, n);  // grad(i,j) = d_i lambda_j
    for (int i = 0; i < n; ++i) {
      const Vec e = Vec::Unit(n, i);
      const Vec lp = omega.transpose() * y(p + h * e);
      const Vec lm = omega.transpose() * y(p - h * e);
      grad.row(i) = ((lp - lm) / (2.0 * h)).transpose();
    }
    const Mat dlambda = grad - grad.transpose();
    worst = std::max(worst, (dlambda - omega).norm());
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Moser isotopy: given a closed nondegenerate 2-form field omega on a ball
// about 0 with omega(0) = omega0, integrate the Moser vector field
// omega_t(Y_t, .) = -(lambda - lambda0) to produce phi_1 with phi_1^* omega = omega0.

using TwoFormField = std::function<Mat(const Vec&)>;   // antisymmetric matrix field
using OneFormField = std::function<Vec(const Vec&)>;   // covector field

// lambda0 = sum_j p_j dq_j in the interleaved convention.
inline Vec standard_primitive(const Vec& x) {
  Vec lam = Vec::Zero(x.size());
  for (int i = 0; i + 1 < x.size(); i += 2) lam(i + 1) = x(i);
  return lam;
}

// Radial homotopy primitive: lambda(x)(w) = int_0^1 t omega(t x)(x, w) dt,
// exact for polynomial forms at modest Gauss-Legendre order.
inline OneFormField radial_primitive(const TwoFormField& omega, int quad_order = 24) {
  std::vector<double> nodes, weights;
  gauss_legendre_01(quad_order, nodes, weights);
  return [omega, nodes, weights](const Vec& x) -> Vec {
    Vec lam = Vec::Zero(x.size());
    for (size_t q = 0; q < nodes.size(); ++q) {
      const double t = nodes[q];
      lam += weights[q] * t * (omega(t * x).transpose() * x);  // omega(tx)(x, .)
    }
    return lam;
  };
}

struct MoserResult {
  std::vector<Vec> points;      // sample points x
  std::vector<Vec> images;      // phi_1(x)
  std::vector<Mat> jacobians;   // D phi_1(x)
  double max_pullback_residual = 0.0;  // max_x || Dphi^T omega(phi x) Dphi - omega0 ||
  double min_pfaffian_margin = 0.0;    // min over (t, grid) of |Pf(omega_t)| / ||omega_t||^n
};

inline MoserResult moser_isotopy(const TwoFormField& omega, double radius, int steps,
                                 const std::vector<Vec>& samples,
                                 const OneFormField& primitive = nullptr) {
  if (samples.empty()) throw DomainError("moser_isotopy: no sample points");
  const int dim = static_cast<int>(samples.front().size());
  const Mat omega0 = standard_symplectic(dim);
  if ((omega(Vec::Zero(dim)) - omega0).norm() > 1e-9)
    throw DomainError("moser_isotopy: omega(0) must equal omega0");

  // Default primitive: lambda = lambda0 + radial-homotopy primitive of the
  // closed form omega - omega0, so that omega = omega0 gives lambda_dot = 0.
  OneFormField lam;
  if (primitive) {
    lam = primitive;
  } else {
    OneFormField correction = radial_primitive([omega, omega0](const Vec& x) -> Mat {
      return omega(x) - omega0;
    });
    lam = [correction](const Vec& x) -> Vec { return standard_primitive(x) + correction(x); };
  }
  // Normalize lambda(0) = lambda0(0) by adding a constant 1-form.
  const Vec shift = standard_primitive(Vec::Zero(dim)) - lam(Vec::Zero(dim));
  auto lambda_dot = [lam, shift](const Vec& x) -> Vec {
    return (lam(x) + shift) - standard_primitive(x);  // lambda - lambda0, t-independent
  };

  // Nondegeneracy margin of omega_t = t omega + (1-t) omega0 on a coarse grid.
  double margin = 1e300;
  const int n_half = dim / 2;
  for (int it = 0; it <= 4; ++it) {
    const double t = it / 4.0;
    for (const Vec& p : samples) {
      for (double scale : {0.5, 1.0}) {
        const Vec x = scale * p;
        if (x.norm() > radius + 1e-12) continue;
        const Mat wt = t * omega(x) + (1.0 - t) * omega0;
        const auto nd = check_nondegenerate(wt);
        const double smax = wt.jacobiSvd().singularValues()(0);
        margin = std::min(margin, std::abs(nd.pfaffian_value) / std::pow(smax, n_half));
        if (!nd.nondegenerate) {
          throw DegeneracyError("moser_isotopy: omega_t degenerate at t=" + std::to_string(t));
        }
      }
    }
  }

  TimeField moser_field = [omega, omega0, lambda_dot](double t, const Vec& x) -> Vec {
    const Mat wt = t * omega(x) + (1.0 - t) * omega0;
    return wt.lu().solve(lambda_dot(x));  // omega_t(Y,.) = -lambda_dot  =>  Y = wt^{-1} lambda_dot
  };

  MoserResult out;
  out.min_pfaffian_margin = margin;
  const double h = 1.0 / steps;
  for (const Vec& p : samples) {
    FlowResult fr = flow_with_jacobian(moser_field, p, 1.0, h, nullptr, 0.0, steps);
    const Vec img = fr.states.back();
    const Mat dphi = fr.jacobians.back();
    out.points.push_back(p);
    out.images.push_back(img);
    out.jacobians.push_back(dphi);
    const double res = (dphi.transpose() * omega(img) * dphi - omega0).norm();
    out.max_pullback_residual = std::max(out.max_pullback_residual, res);
  }
  return out;
}

}  // namespace holocurve
