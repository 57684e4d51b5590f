#pragma once

// Pointwise symplectic linear algebra: nondegeneracy via the Pfaffian,
// Darboux bases, compatible/tamed complex structures and the Cayley-type
// chart on the space of linear complex structures.

#include <optional>

#include "holocurve/core.hpp"

namespace holocurve {

inline bool is_antisymmetric(const Mat& a, double tol = 1e-12) {
  return (a + a.transpose()).norm() <= tol * std::max(1.0, a.norm());
}

// Pfaffian of an antisymmetric matrix by the Parlett-Reid method
// (skew-symmetric LTL^T with partial pivoting).
inline double pfaffian(Mat a) {
  const int n = static_cast<int>(a.rows());
  if (n % 2 != 0) throw DimensionError("pfaffian: odd dimension");
  if (!is_antisymmetric(a, 1e-10)) throw DomainError("pfaffian: matrix not antisymmetric");
  double pf = 1.0;
  for (int k = 0; k + 1 < n; k += 2) {
    int piv = k + 1;
    for (int i = k + 2; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (piv != k + 1) {
      a.row(piv).swap(a.row(k + 1));
      a.col(piv).swap(a.col(k + 1));
      pf = -pf;
    }
    const double pivot = a(k + 1, k);
    if (pivot == 0.0) return 0.0;
    pf *= -pivot;  // a(k,k+1) = -a(k+1,k)
    for (int i = k + 2; i < n; ++i) {
      const double mu = a(i, k) / pivot;
      if (mu != 0.0) {
        a.row(i) -= mu * a.row(k + 1);
        a.col(i) -= mu * a.col(k + 1);
      }
    }
  }
  return pf;
}

struct NondegeneracyResult {
  bool nondegenerate;
  double pfaffian_value;
};

// omega^n is a volume form iff Pf(omega) != 0; tolerance is relative to
// sigma_max^n which separates rank deficiency from roundoff at desk sizes.
inline NondegeneracyResult check_nondegenerate(const Mat& omega, double tol = 1e-10) {
  if (omega.rows() % 2 != 0) throw DimensionError("check_nondegenerate: odd dimension");
  const double pf = pfaffian(omega);
  const double smax = omega.jacobiSvd().singularValues()(0);
  const int n = static_cast<int>(omega.rows()) / 2;
  const double scale = std::pow(std::max(smax, 1e-300), n);
  return {std::abs(pf) > tol * scale, pf};
}

// Darboux basis by symplectic Gram-Schmidt.  Returns the basis matrix B with
// columns interleaved (X1,Y1,...,Xn,Yn) so that B^T Omega B = omega0 in the
// repository convention.  Tie-breaking: always seed with the first standard
// basis vector whose symplectic projection off the chosen span is nonzero.
inline Mat darboux_basis(const Mat& omega, double tol = 1e-10) {
  const int dim = static_cast<int>(omega.rows());
  if (!check_nondegenerate(omega).nondegenerate) throw DegeneracyError("darboux_basis: omega degenerate");
  std::vector<Vec> xs, ys;
  auto project = [&](Vec v) {
    for (size_t i = 0; i < xs.size(); ++i) {
      const double a = xs[i].dot(omega * v);   // Omega(X_i, v)
      const double b = ys[i].dot(omega * v);   // Omega(Y_i, v)
      v -= a * ys[i] - b * xs[i];              // kill pairings with the chosen pairs
    }
    return v;
  };
  const double scale = omega.norm();
  while (static_cast<int>(2 * xs.size()) < dim) {
    Vec x;
    bool found = false;
    for (int j = 0; j < dim && !found; ++j) {
      Vec cand = project(Vec::Unit(dim, j));
      if (cand.norm() > 1e-8) {
        x = cand;
        found = true;
      }
    }
    if (!found) throw DegeneracyError("darboux_basis: ran out of seed vectors");
    Vec y;
    found = false;
    for (int j = 0; j < dim && !found; ++j) {
      Vec cand = project(Vec::Unit(dim, j));
      const double pairing = x.dot(omega * cand);
      if (std::abs(pairing) > 1e-8 * std::max(1.0, scale * x.norm())) {
        y = cand / pairing;  // Omega(X, Y) = 1
        found = true;
      }
    }
    if (!found) throw DegeneracyError("darboux_basis: no symplectic partner found");
    xs.push_back(x);
    ys.push_back(y);
  }
  Mat b(dim, dim);
  for (int i = 0; i < dim / 2; ++i) {
    b.col(2 * i) = xs[i];
    b.col(2 * i + 1) = ys[i];
  }
  const Mat res = b.transpose() * omega * b - standard_symplectic(dim);
  if (res.norm() > tol * std::max(1.0, scale)) throw DegeneracyError("darboux_basis: pairing check failed");
  return b;
}

// J_g = A sqrt(A*A)^{-1} with omega = g(A.,.), adjoint taken in the g-inner
// product.  The square root is computed by symmetric eigendecomposition in
// the g-orthonormal frame.
inline Mat compatible_from_metric(const Mat& omega, const Mat& g) {
  const int dim = static_cast<int>(omega.rows());
  if (g.rows() != dim) throw DimensionError("compatible_from_metric: size mismatch");
  if (!check_nondegenerate(omega).nondegenerate) throw DegeneracyError("compatible_from_metric: omega degenerate");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g + g.transpose()));
  if (es.eigenvalues().minCoeff() <= 0) throw DegeneracyError("compatible_from_metric: metric not positive definite");
  const Mat s = es.operatorSqrt();
  const Mat sinv = es.operatorInverseSqrt();
  // omega(v,w) = g(Av,w)  =>  A = -G^{-1} Omega; B = S A S^{-1} is skew, and
  // B sqrt(B^T B)^{-1} is its orthogonal polar factor, taken from the SVD.
  const Mat a = -(sinv * sinv) * omega;
  const Mat b = s * a * sinv;
  Eigen::JacobiSVD<Mat> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat jn = svd.matrixU() * svd.matrixV().transpose();
  Mat j = sinv * jn * s;
  const Mat id = Mat::Identity(dim, dim);
  if ((j * j + id).norm() > 1e-10 * std::sqrt(static_cast<double>(dim))) {
    throw ConvergenceError("compatible_from_metric: J^2 != -1");
  }
  return j;
}

struct CayleyResult {
  Mat j;
  double condition;  // condition number of 1 + J0 Y / 2
};

inline bool anticommutes_with_j0(const Mat& y, double tol = 1e-10) {
  const Mat j0 = standard_complex_structure(static_cast<int>(y.rows()));
  return (y * j0 + j0 * y).norm() <= tol * std::max(1.0, y.norm());
}

// J_Y = (1 + J0 Y / 2) J0 (1 + J0 Y / 2)^{-1} for Y anticommuting with J0.
inline CayleyResult cayley_chart(const Mat& y) {
  const int dim = static_cast<int>(y.rows());
  if (!anticommutes_with_j0(y)) throw DomainError("cayley_chart: Y does not anticommute with J0");
  const Mat j0 = standard_complex_structure(dim);
  const Mat c = Mat::Identity(dim, dim) + 0.5 * j0 * y;
  const auto svd = c.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues().minCoeff();
  if (smin < 1e-12 * svd.singularValues().maxCoeff()) throw DomainError("cayley_chart: 1 + J0 Y / 2 singular");
  const Mat j = c * j0 * svd.solve(Mat::Identity(dim, dim));
  return {j, svd.singularValues().maxCoeff() / smin};
}

// Inverse chart: Y = 2 (1 - J J0)^{-1} (J - J0), valid near J0.
inline Mat cayley_chart_inverse(const Mat& j) {
  const int dim = static_cast<int>(j.rows());
  const Mat id = Mat::Identity(dim, dim);
  if ((j * j + id).norm() > 1e-8 * std::sqrt(static_cast<double>(dim)))
    throw DomainError("cayley_chart_inverse: input is not a complex structure");
  const Mat j0 = standard_complex_structure(dim);
  const Mat m = id - j * j0;
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible()) throw DomainError("cayley_chart_inverse: J outside chart domain");
  Mat y = 2.0 * lu.solve(j - j0);
  if (!anticommutes_with_j0(y, 1e-8)) throw DomainError("cayley_chart_inverse: result fails to anticommute");
  return y;
}

enum class Taming { Compatible, TameOnly, Neither };

struct TamingResult {
  Taming verdict;
  std::optional<Mat> g_j;  // symmetrized metric, present when tame
};

// tame iff the symmetric part of Omega J is positive definite; compatible iff
// additionally J^T Omega J = Omega.
inline TamingResult classify_taming(const Mat& omega, const Mat& j, double tol = 1e-10) {
  const int dim = static_cast<int>(omega.rows());
  if (!check_nondegenerate(omega).nondegenerate) throw DegeneracyError("classify_taming: omega degenerate");
  if ((j * j + Mat::Identity(dim, dim)).norm() > 1e-8 * std::sqrt(static_cast<double>(dim)))
    throw DomainError("classify_taming: J is not a complex structure");
  const Mat q = omega * j;
  const Mat sym = 0.5 * (q + q.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.eigenvalues().minCoeff() <= 0) return {Taming::Neither, std::nullopt};
  const bool invariant = (j.transpose() * omega * j - omega).norm() <= tol * std::max(1.0, omega.norm());
  return {invariant ? Taming::Compatible : Taming::TameOnly, sym};
}

// Pointwise field of linear complex structures with finite-difference step
// for derivative-based tensors.  Evaluators must be read-only.
struct AlmostComplexField {
  int dim = 0;
  std::function<Mat(const Vec&)> eval;
  double fd_step = 1e-4;
};

// N_J(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y] on the constant-vector-field
// extension of X, Y; brackets by central differences.
inline Vec nijenhuis_tensor(const AlmostComplexField& field, const Vec& p, const Vec& x, const Vec& y) {
  const double h = field.fd_step;
  auto jx = [&](const Vec& q) -> Vec { return field.eval(q) * x; };
  auto jy = [&](const Vec& q) -> Vec { return field.eval(q) * y; };
  auto dderiv = [&](const std::function<Vec(const Vec&)>& f, const Vec& dir) -> Vec {
    if (dir.norm() == 0.0) return Vec::Zero(field.dim);
    return (f(p + h * dir) - f(p - h * dir)) / (2.0 * h);
  };
  const Mat jp = field.eval(p);
  // [JX,JY] = D_{JX}(JY) - D_{JY}(JX); [JX,Y] = -D_Y(JX); [X,JY] = D_X(JY); [X,Y] = 0.
  const Vec bracket_jj = dderiv(jy, jp * x) - dderiv(jx, jp * y);
  return bracket_jj + jp * dderiv(jx, y) - jp * dderiv(jy, x);
}

}  // namespace holocurve
