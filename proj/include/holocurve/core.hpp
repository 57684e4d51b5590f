#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace holocurve {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};
struct DegeneracyError : std::runtime_error {
  explicit DegeneracyError(const std::string& msg) : std::runtime_error(msg) {}
};
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Repository-wide coordinate convention: interleaved (p1,q1,...,pn,qn).
// omega0(e_{2i}, e_{2i+1}) = 1, J0 e_{2i} = e_{2i+1}.
inline Mat standard_symplectic(int dim) {
  if (dim <= 0 || dim % 2 != 0) throw DimensionError("standard_symplectic: dim must be even positive");
  Mat w = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; i += 2) {
    w(i, i + 1) = 1.0;
    w(i + 1, i) = -1.0;
  }
  return w;
}

inline Mat standard_complex_structure(int dim) {
  if (dim <= 0 || dim % 2 != 0) throw DimensionError("standard_complex_structure: dim must be even positive");
  Mat j = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; i += 2) {
    j(i, i + 1) = -1.0;
    j(i + 1, i) = 1.0;
  }
  return j;
}

// Interleaved real coordinates <-> complex coordinates of C^n.
inline CVec real_to_complex(const Vec& x) {
  CVec z(x.size() / 2);
  for (int i = 0; i < z.size(); ++i) z(i) = Complex(x(2 * i), x(2 * i + 1));
  return z;
}

inline Vec complex_to_real(const CVec& z) {
  Vec x(2 * z.size());
  for (int i = 0; i < z.size(); ++i) {
    x(2 * i) = z(i).real();
    x(2 * i + 1) = z(i).imag();
  }
  return x;
}

inline double sqr(double x) { return x * x; }

// Gauss-Legendre nodes and weights on [0, 1], by Newton iteration on the
// Legendre recurrence.
inline void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (x + 1.0);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace holocurve
