#pragma once

// The Cauchy transform Tf(z) = (1/2pi) int f(zeta)/(z - zeta) dA on a uniform
// grid, discretized with exact per-cell integrals of the kernel 1/(2 pi zeta)
// and applied as an FFT convolution.  Throughout the unhalved convention
// dbar = d_s + i d_t is used, so dbar T f = f.

#include <unsupported/Eigen/FFT>

#include "holocurve/core.hpp"

namespace holocurve {

// Cell-centered square grid on [-L, L]^2 with an odd number of nodes per
// side, so that 0 is a node.  Values are complex fiber vectors per node.
struct GridFunctionBall {
  int m = 0;          // nodes per side (odd)
  double half_width = 1.0;
  double support_radius = 1.0;
  int fiber_dim = 1;
  std::vector<CVec> values;  // row-major, index = iy * m + ix

  GridFunctionBall() = default;
  GridFunctionBall(int nodes, double l, double support, int fiber)
      : m(nodes), half_width(l), support_radius(support), fiber_dim(fiber),
        values(static_cast<size_t>(nodes) * nodes, CVec::Zero(fiber)) {
    if (nodes % 2 == 0) throw DimensionError("GridFunctionBall: node count must be odd");
  }
  double h() const { return 2.0 * half_width / (m - 1); }
  double coord(int i) const { return -half_width + i * h(); }
  Complex node(int ix, int iy) const { return Complex(coord(ix), coord(iy)); }
  CVec& at(int ix, int iy) { return values[static_cast<size_t>(iy) * m + ix]; }
  const CVec& at(int ix, int iy) const { return values[static_cast<size_t>(iy) * m + ix]; }
  int center_index() const { return (m - 1) / 2; }

  static GridFunctionBall sample(int nodes, double l, double support, int fiber,
                                 const std::function<CVec(Complex)>& f) {
    GridFunctionBall g(nodes, l, support, fiber);
    for (int iy = 0; iy < nodes; ++iy)
      for (int ix = 0; ix < nodes; ++ix) {
        const Complex z = g.node(ix, iy);
        g.at(ix, iy) = (std::abs(z) <= support) ? f(z) : CVec::Zero(fiber);
      }
    return g;
  }
  double sup_norm() const {
    double s = 0.0;
    for (const auto& v : values) s = std::max(s, v.template lpNorm<Eigen::Infinity>());
    return s;
  }
};

namespace detail {

// G(x, y) = -i (x+iy)(Log(x+iy) - 1), an antiderivative in y of Log(x+iy).
// side selects the branch on the negative real axis (y == 0).
inline Complex log_antideriv(double x, double y, int side) {
  const Complex zeta(x, y);
  if (x == 0.0 && y == 0.0) return Complex(0, 0);  // removable limit
  Complex lg;
  if (y == 0.0 && x < 0.0)
    lg = Complex(std::log(-x), side >= 0 ? kPi : -kPi);
  else
    lg = std::log(zeta);
  return Complex(0, -1) * zeta * (lg - 1.0);
}

// int over [x0,x1] x [y0,y1] of dA / zeta, rectangle not crossing y = 0
// in its interior (split by the caller).  sign passed for the boundary branch.
inline Complex rect_inv_z_half(double x0, double x1, double y0, double y1, int side) {
  return (log_antideriv(x1, y1, side) - log_antideriv(x1, y0, side)) -
         (log_antideriv(x0, y1, side) - log_antideriv(x0, y0, side));
}

inline Complex rect_inv_z(double x0, double x1, double y0, double y1) {
  if (y0 < 0.0 && y1 > 0.0)
    return rect_inv_z_half(x0, x1, 0.0, y1, +1) + rect_inv_z_half(x0, x1, y0, 0.0, -1);
  const int side = (y0 + y1 >= 0.0) ? +1 : -1;
  return rect_inv_z_half(x0, x1, y0, y1, side);
}

// w(delta) = int over the h-cell centered at delta of dA(zeta) / (2 pi zeta);
// the centered cell vanishes by oddness of the kernel.
inline Complex kernel_cell_weight(Complex delta, double h) {
  if (delta == Complex(0, 0)) return Complex(0, 0);
  return rect_inv_z(delta.real() - h / 2, delta.real() + h / 2, delta.imag() - h / 2, delta.imag() + h / 2) /
         kTwoPi;
}

inline void fft2(std::vector<Complex>& a, int n, bool inverse) {
  Eigen::FFT<double> fft;
  std::vector<Complex> line(n), out(n);
  for (int row = 0; row < n; ++row) {
    std::copy(a.begin() + static_cast<size_t>(row) * n, a.begin() + static_cast<size_t>(row + 1) * n, line.begin());
    if (inverse) fft.inv(out, line); else fft.fwd(out, line);
    std::copy(out.begin(), out.end(), a.begin() + static_cast<size_t>(row) * n);
  }
  for (int col = 0; col < n; ++col) {
    for (int row = 0; row < n; ++row) line[row] = a[static_cast<size_t>(row) * n + col];
    if (inverse) fft.inv(out, line); else fft.fwd(out, line);
    for (int row = 0; row < n; ++row) a[static_cast<size_t>(row) * n + col] = out[row];
  }
}

}  // namespace detail

// Precomputed convolution stencil for a fixed grid geometry.
class CauchyTransform {
 public:
  CauchyTransform(int m, double half_width) : m_(m), h_(2.0 * half_width / (m - 1)) {
    n_ = 1;
    while (n_ < 2 * m_) n_ *= 2;
    kernel_hat_.assign(static_cast<size_t>(n_) * n_, Complex(0, 0));
    for (int dy = -(m_ - 1); dy <= m_ - 1; ++dy)
      for (int dx = -(m_ - 1); dx <= m_ - 1; ++dx) {
        const Complex w = detail::kernel_cell_weight(Complex(dx * h_, dy * h_), h_);
        const int ix = (dx + n_) % n_;
        const int iy = (dy + n_) % n_;
        kernel_hat_[static_cast<size_t>(iy) * n_ + ix] = w;
      }
    detail::fft2(kernel_hat_, n_, false);
  }

  GridFunctionBall apply(const GridFunctionBall& f) const {
    if (f.m != m_) throw DimensionError("CauchyTransform: grid mismatch");
    GridFunctionBall out(f.m, f.half_width, f.half_width, f.fiber_dim);
    std::vector<Complex> buf(static_cast<size_t>(n_) * n_);
    for (int c = 0; c < f.fiber_dim; ++c) {
      std::fill(buf.begin(), buf.end(), Complex(0, 0));
      for (int iy = 0; iy < m_; ++iy)
        for (int ix = 0; ix < m_; ++ix)
          buf[static_cast<size_t>(iy) * n_ + ix] = f.at(ix, iy)(c);
      detail::fft2(buf, n_, false);
      for (size_t i = 0; i < buf.size(); ++i) buf[i] *= kernel_hat_[i];
      detail::fft2(buf, n_, true);
      for (int iy = 0; iy < m_; ++iy)
        for (int ix = 0; ix < m_; ++ix)
          out.at(ix, iy)(c) = buf[static_cast<size_t>(iy) * n_ + ix];
    }
    return out;
  }

  int grid_nodes() const { return m_; }

 private:
  int m_;
  double h_;
  int n_;
  std::vector<Complex> kernel_hat_;
};

inline GridFunctionBall cauchy_transform(const GridFunctionBall& f) {
  return CauchyTransform(f.m, f.half_width).apply(f);
}

// Independent oracle for tests: polar desingularization around the target,
// trapezoid in angle x midpoint in radius, bilinear interpolation of f.
inline CVec cauchy_transform_polar(const GridFunctionBall& f, Complex z, int n_theta = 256, int n_r = 256) {
  const double h = f.h();
  auto interp = [&](Complex w) -> CVec {
    const double gx = (w.real() + f.half_width) / h;
    const double gy = (w.imag() + f.half_width) / h;
    const int ix = static_cast<int>(std::floor(gx));
    const int iy = static_cast<int>(std::floor(gy));
    if (ix < 0 || iy < 0 || ix + 1 >= f.m || iy + 1 >= f.m) return CVec::Zero(f.fiber_dim);
    const double ax = gx - ix, ay = gy - iy;
    return (1 - ax) * (1 - ay) * f.at(ix, iy) + ax * (1 - ay) * f.at(ix + 1, iy) +
           (1 - ax) * ay * f.at(ix, iy + 1) + ax * ay * f.at(ix + 1, iy + 1);
  };
  // Tf(z) = -(1/2pi) int f(z + r e^{i th}) e^{-i th} dr dth
  const double rmax = std::abs(z) + f.support_radius + h;
  CVec acc = CVec::Zero(f.fiber_dim);
  const double dr = rmax / n_r, dth = kTwoPi / n_theta;
  for (int it = 0; it < n_theta; ++it) {
    const double th = it * dth;
    const Complex phase = std::exp(Complex(0, -th));
    const Complex dir = std::exp(Complex(0, th));
    CVec radial = CVec::Zero(f.fiber_dim);
    for (int ir = 0; ir < n_r; ++ir) {
      const double r = (ir + 0.5) * dr;
      radial += interp(z + r * dir);
    }
    acc += phase * radial;
  }
  return -acc * dr * dth / kTwoPi;
}

// Central-difference dbar = d_s + i d_t on interior nodes.
inline GridFunctionBall dbar_fd(const GridFunctionBall& u) {
  GridFunctionBall out(u.m, u.half_width, u.half_width, u.fiber_dim);
  const double h = u.h();
  for (int iy = 1; iy + 1 < u.m; ++iy)
    for (int ix = 1; ix + 1 < u.m; ++ix) {
      const CVec ds = (u.at(ix + 1, iy) - u.at(ix - 1, iy)) / (2 * h);
      const CVec dt = (u.at(ix, iy + 1) - u.at(ix, iy - 1)) / (2 * h);
      out.at(ix, iy) = ds + Complex(0, 1) * dt;
    }
  return out;
}

// max norm of dbar u - f over interior nodes restricted to |z| <= radius.
inline double dbar_residual(const GridFunctionBall& u, const GridFunctionBall& f, double radius) {
  const GridFunctionBall du = dbar_fd(u);
  double worst = 0.0;
  for (int iy = 1; iy + 1 < u.m; ++iy)
    for (int ix = 1; ix + 1 < u.m; ++ix) {
      if (std::abs(u.node(ix, iy)) > radius) continue;
      worst = std::max(worst, (du.at(ix, iy) - f.at(ix, iy)).template lpNorm<Eigen::Infinity>());
    }
  return worst;
}

struct ConjugateNorms {
  double norm_del;      // || d u ||_L2, d = d_s - i d_t
  double norm_delbar;   // || dbar u ||_L2
  double relative_gap;
};

// || d u ||_{L2} = || dbar u ||_{L2} for compactly supported u; central
// differences satisfy the identity exactly by discrete summation by parts.
inline ConjugateNorms conjugate_norm_identity(const GridFunctionBall& u) {
  if (u.support_radius + 2 * u.h() >= u.half_width)
    throw DomainError("conjugate_norm_identity: support must stay clear of the boundary");
  const double h = u.h();
  double acc_del = 0.0, acc_delbar = 0.0;
  for (int iy = 1; iy + 1 < u.m; ++iy)
    for (int ix = 1; ix + 1 < u.m; ++ix) {
      const CVec ds = (u.at(ix + 1, iy) - u.at(ix - 1, iy)) / (2 * h);
      const CVec dt = (u.at(ix, iy + 1) - u.at(ix, iy - 1)) / (2 * h);
      acc_del += (ds - Complex(0, 1) * dt).squaredNorm();
      acc_delbar += (ds + Complex(0, 1) * dt).squaredNorm();
    }
  ConjugateNorms out;
  out.norm_del = std::sqrt(acc_del * h * h);
  out.norm_delbar = std::sqrt(acc_delbar * h * h);
  out.relative_gap = std::abs(out.norm_del - out.norm_delbar) / std::max(out.norm_delbar, 1e-300);
  return out;
}

// ---------------------------------------------------------------------------
// Local existence solve: dbar u + A u = 0, u(0) = u0, by the contraction
// u <- u0 + (T(-chi_eps A u) - T(-chi_eps A u)(0)) on B_eps.

struct LocalSolveResult {
  GridFunctionBall u;
  double fixed_point_residual = 0.0;  // discrete sup norm of the last update
  double contraction_factor = 0.0;
  int iterations = 0;
};

using MatrixField = std::function<Mat(Complex)>;  // real 2n x 2n acting on C^n as R^{2n}

inline CVec apply_real_linear(const Mat& a, const CVec& v) {
  return real_to_complex((a * complex_to_real(v)).eval());
}

inline LocalSolveResult solve_linear_cr_ivp(const MatrixField& a_field, const CVec& u0, double eps,
                                            int grid_nodes = 97, double tol = 1e-8, int max_iter = 200) {
  const int n = static_cast<int>(u0.size());
  const double half_width = eps;  // grid spans the solve ball exactly
  GridFunctionBall u(grid_nodes, half_width, eps, n);
  for (auto& v : u.values) v = u0;
  CauchyTransform transform(grid_nodes, half_width);
  const int c0 = u.center_index();
  LocalSolveResult out{u, 0.0, 0.0, 0};
  double prev_update = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    GridFunctionBall rhs(grid_nodes, half_width, eps, n);
    for (int iy = 0; iy < grid_nodes; ++iy)
      for (int ix = 0; ix < grid_nodes; ++ix) {
        const Complex z = rhs.node(ix, iy);
        if (std::abs(z) <= eps) rhs.at(ix, iy) = -apply_real_linear(a_field(z), out.u.at(ix, iy));
      }
    GridFunctionBall t = transform.apply(rhs);
    const CVec t0 = t.at(c0, c0);
    double update = 0.0;
    for (int iy = 0; iy < grid_nodes; ++iy)
      for (int ix = 0; ix < grid_nodes; ++ix) {
        const CVec next = u0 + t.at(ix, iy) - t0;
        update = std::max(update, (next - out.u.at(ix, iy)).template lpNorm<Eigen::Infinity>());
        out.u.at(ix, iy) = next;
      }
    out.iterations = it + 1;
    out.fixed_point_residual = update;
    if (prev_update > 0.0) out.contraction_factor = update / prev_update;
    if (update < tol) return out;
    if (prev_update > 0.0 && update > prev_update && it > 3)
      throw ConvergenceError("solve_linear_cr_ivp: contraction failure, shrink eps (factor " +
                             std::to_string(out.contraction_factor) + ")");
    prev_update = std::max(update, 1e-300);
  }
  throw ConvergenceError("solve_linear_cr_ivp: no convergence after max iterations");
}

}  // namespace holocurve
