#pragma once

// Contact geometry on T^3 = (R/Z)^3 with coordinates (theta, phi, eta):
// the forms alpha_N = cos(2 pi N eta) dtheta + sin(2 pi N eta) dphi, Reeb
// dynamics and orbit homology classes, and the Gray stability isotopy for
// contact families.

#include <numeric>

#include "holocurve/core.hpp"
#include "holocurve/flows.hpp"

namespace holocurve {

// A 1-form family on T^3 with analytic coefficients, time derivative and
// spatial exterior derivative.  dalpha is returned as the antisymmetric
// matrix D with dalpha(e_i, e_j) = D_ij.
struct ContactFamilyT3 {
  std::function<Vec(double, const Vec&)> alpha;
  std::function<Vec(double, const Vec&)> alpha_dot;
  std::function<Mat(double, const Vec&)> dalpha;
};

struct ContactFormT3 {
  int n_twist = 1;
  Vec alpha(const Vec& x) const {
    Vec a(3);
    a << std::cos(kTwoPi * n_twist * x(2)), std::sin(kTwoPi * n_twist * x(2)), 0.0;
    return a;
  }
  Mat dalpha(const Vec& x) const {
    // d alpha_N = -2 pi N sin(2 pi N eta) deta ^ dtheta + 2 pi N cos(...) deta ^ dphi
    const double c = kTwoPi * n_twist;
    Mat d = Mat::Zero(3, 3);
    d(2, 0) = -c * std::sin(c * x(2));
    d(0, 2) = -d(2, 0);
    d(2, 1) = c * std::cos(c * x(2));
    d(1, 2) = -d(2, 1);
    return d;
  }
  ContactFamilyT3 constant_family() const {
    auto self = *this;
    return {[self](double, const Vec& x) { return self.alpha(x); },
            [](double, const Vec&) { return Vec::Zero(3); },
            [self](double, const Vec& x) { return self.dalpha(x); }};
  }
};

// Kernel vector of a 3x3 antisymmetric matrix D = [[0,a,b],[-a,0,c],[-b,-c,0]]
// is (c,-b,a); the contact condition alpha ^ dalpha != 0 is exactly
// alpha(kernel) != 0.
inline Vec reeb_field_from(const Vec& alpha, const Mat& dalpha) {
  Vec k(3);
  k << dalpha(1, 2), -dalpha(0, 2), dalpha(0, 1);
  const double pairing = alpha.dot(k);
  if (std::abs(pairing) < 1e-12 * std::max(1.0, k.norm()))
    throw DegeneracyError("reeb_field: contact condition fails (alpha ^ dalpha = 0)");
  return k / pairing;
}

inline Vec reeb_field(const ContactFormT3& form, const Vec& p) {
  return reeb_field_from(form.alpha(p), form.dalpha(p));
}

// ---------------------------------------------------------------------------
// Gray stability: phi_t^* alpha_t = f_t alpha_0 with Y_t in ker(alpha_t)
// solving dalpha_t(Y_t, .) = -alpha_dot_t + g_t alpha_t and
// g_t = alpha_dot_t(X_{alpha_t}).

inline Vec gray_vector_field(const ContactFamilyT3& fam, double t, const Vec& x) {
  const Vec a = fam.alpha(t, x);
  const Vec adot = fam.alpha_dot(t, x);
  const Mat d = fam.dalpha(t, x);
  const Vec reeb = reeb_field_from(a, d);
  const double g = adot.dot(reeb);
  const Vec beta = -adot + g * a;
  // iota_Y dalpha = -D Y as a covector; solve [-D; a^T] Y = [beta; 0].
  Mat lhs(4, 3);
  lhs.topRows(3) = -d;
  lhs.row(3) = a.transpose();
  Vec rhs(4);
  rhs.head(3) = beta;
  rhs(3) = 0.0;
  const Vec y = lhs.colPivHouseholderQr().solve(rhs);
  if ((lhs * y - rhs).norm() > 1e-8 * std::max(1.0, beta.norm()))
    throw DegeneracyError("gray_isotopy: pointwise system inconsistent (contact failure?)");
  return y;
}

struct GrayResult {
  std::vector<double> times;                 // reported t values
  std::vector<std::vector<Vec>> images;      // phi_t(x) per time per sample
  std::vector<std::vector<Mat>> jacobians;   // D phi_t(x)
  std::vector<std::vector<double>> conformal;  // f_t(x) = exp(int g)
  double max_form_residual = 0.0;    // || phi_t^* alpha_t - f_t alpha_0 ||
  double max_kernel_residual = 0.0;  // || (phi_t^* alpha_t) ^ alpha_0 ||
};

inline GrayResult gray_isotopy(const ContactFamilyT3& fam, const std::vector<Vec>& samples,
                               const std::vector<double>& report_times, int steps_per_unit = 64) {
  GrayResult out;
  out.times = report_times;
  out.images.resize(report_times.size());
  out.jacobians.resize(report_times.size());
  out.conformal.resize(report_times.size());

  // Augmented state (x, log f); Jacobian tracked for the x-block only.
  for (const Vec& p : samples) {
    Vec state(4);
    state.head(3) = p;
    state(3) = 0.0;
    Mat phi = Mat::Identity(3, 3);
    double t = 0.0;
    size_t next_report = 0;
    auto field = [&fam](double tt, const Vec& s) -> Vec {
      const Vec x = s.head(3);
      Vec ds(4);
      ds.head(3) = gray_vector_field(fam, tt, x);
      const Vec a = fam.alpha(tt, x);
      const Mat d = fam.dalpha(tt, x);
      ds(3) = fam.alpha_dot(tt, x).dot(reeb_field_from(a, d));  // d/dt log f = g_t(phi_t)
      return ds;
    };
    auto xjac = [&](double tt, const Vec& x) -> Mat {
      Mat j(3, 3);
      const double h = 1e-6;
      for (int k = 0; k < 3; ++k) {
        const Vec e = Vec::Unit(3, k);
        j.col(k) = (gray_vector_field(fam, tt, x + h * e) - gray_vector_field(fam, tt, x - h * e)) / (2 * h);
      }
      return j;
    };
    const double t_end = *std::max_element(report_times.begin(), report_times.end());
    const double h = 1.0 / steps_per_unit;
    const long nsteps = static_cast<long>(std::ceil(t_end / h - 1e-12));
    auto maybe_report = [&]() {
      while (next_report < report_times.size() && t >= report_times[next_report] - 1e-12) {
        out.images[next_report].push_back(state.head(3));
        out.jacobians[next_report].push_back(phi);
        out.conformal[next_report].push_back(std::exp(state(3)));
        ++next_report;
      }
    };
    maybe_report();
    for (long s = 0; s < nsteps; ++s) {
      const double hs = std::min(h, t_end - t);
      const Vec k1 = field(t, state);
      const Mat m1 = xjac(t, state.head(3)) * phi;
      const Vec s2 = state + hs / 2 * k1;
      const Vec k2 = field(t + hs / 2, s2);
      const Mat m2 = xjac(t + hs / 2, s2.head(3)) * (phi + hs / 2 * m1);
      const Vec s3 = state + hs / 2 * k2;
      const Vec k3 = field(t + hs / 2, s3);
      const Mat m3 = xjac(t + hs / 2, s3.head(3)) * (phi + hs / 2 * m2);
      const Vec s4 = state + hs * k3;
      const Vec k4 = field(t + hs, s4);
      const Mat m4 = xjac(t + hs, s4.head(3)) * (phi + hs * m3);
      state += hs / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      phi += hs / 6.0 * (m1 + 2 * m2 + 2 * m3 + m4);
      t += hs;
      maybe_report();
    }
  }

  // Residuals: for each reported time and sample, compare phi_t^* alpha_t
  // against f_t alpha_0 and test ker preservation via the wedge norm.
  for (size_t it = 0; it < report_times.size(); ++it) {
    const double t = report_times[it];
    for (size_t ip = 0; ip < samples.size(); ++ip) {
      const Vec a0 = fam.alpha(0.0, samples[ip]);
      const Vec pulled = out.jacobians[it][ip].transpose() * fam.alpha(t, out.images[it][ip]);
      const double f = out.conformal[it][ip];
      out.max_form_residual = std::max(out.max_form_residual, (pulled - f * a0).norm());
      const Mat wedge = pulled * a0.transpose() - a0 * pulled.transpose();
      out.max_kernel_residual = std::max(out.max_kernel_residual, wedge.norm());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reeb orbits of alpha_N: eta is constant, (theta, phi) translate with
// velocity (cos(2 pi N eta), sin(2 pi N eta)).  Closure is decided by a
// continued-fraction rationality test on the rotation vector.

struct OrbitClass {
  bool closed = false;
  Eigen::Vector3i homology = Eigen::Vector3i::Zero();  // class in H_1(T^3) = Z^3
  Vec rotation = Vec::Zero(3);                         // rotation vector of the flow
  std::vector<Vec> trajectory;
};

// Rationality test via continued fractions: accept a convergent p/q with
// q <= qmax only when |x - p/q| < tol/q, so that well-approximable
// irrationals are not misclassified while every true rational with
// denominator up to the cap passes at roundoff accuracy.
inline bool rational_approx(double x, double tol, long qmax, long& p_out, long& q_out) {
  long p0 = 1, q0 = 0, p1 = static_cast<long>(std::floor(x)), q1 = 1;
  double frac = x - std::floor(x);
  for (int it = 0; it < 64; ++it) {
    if (std::abs(x - static_cast<double>(p1) / q1) < tol / static_cast<double>(q1)) {
      p_out = p1;
      q_out = q1;
      return true;
    }
    if (frac == 0.0) break;
    const double inv = 1.0 / frac;
    const long a = static_cast<long>(std::floor(inv));
    frac = inv - std::floor(inv);
    const long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > qmax || q2 <= 0) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  return false;
}

inline OrbitClass reeb_orbit_class(const ContactFormT3& form, const Vec& p0, double t_final,
                                   double h = 1.0 / 64, double tol = 1e-9, long qmax = 1000000) {
  OrbitClass out;
  TimeField field = [&form](double, const Vec& x) { return reeb_field(form, x); };
  FlowResult fr = flow_with_jacobian(field, p0, t_final, h, nullptr, 0.0, 8);
  out.trajectory = fr.states;
  out.rotation = (fr.states.back() - p0) / t_final;
  const double c = out.rotation(0), s = out.rotation(1);
  // vertical/horizontal special cases, then the slope rationality test
  long a = 0, b = 0;
  if (std::abs(c) < tol && std::abs(s) < tol) return out;  // stationary: cannot happen for alpha_N
  if (std::abs(s) <= tol * std::max(1.0, std::abs(c))) {
    a = c > 0 ? 1 : -1;
    b = 0;
  } else if (std::abs(c) <= tol * std::max(1.0, std::abs(s))) {
    a = 0;
    b = s > 0 ? 1 : -1;
  } else {
    long p = 0, q = 0;
    if (!rational_approx(s / c, tol, qmax, p, q)) return out;  // non-closed
    const long g = std::gcd(std::abs(p), std::abs(q));
    a = q / g;
    b = p / g;
    if (a * c + b * s < 0) {  // orient along the flow
      a = -a;
      b = -b;
    }
  }
  out.closed = true;
  out.homology << static_cast<int>(a), static_cast<int>(b), 0;
  return out;
}

}  // namespace holocurve
