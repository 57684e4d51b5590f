#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "holocurve/flows.hpp"

using namespace holocurve;

namespace {

ScalarHamiltonian harmonic_oscillator() {
  ScalarHamiltonian h;
  h.dim = 2;
  h.value = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
  h.gradient = [](const Vec& x) { return x; };
  return h;
}

ScalarHamiltonian quadratic_hamiltonian(const Mat& q) {
  ScalarHamiltonian h;
  h.dim = static_cast<int>(q.rows());
  h.value = [q](const Vec& x) { return 0.5 * x.dot(q * x); };
  h.gradient = [q](const Vec& x) -> Vec { return q * x; };
  return h;
}

}  // namespace

TEST_CASE("hamiltonian_vector_field: coordinate formula, constants, residual") {
  const Mat omega0 = standard_symplectic(2);
  Vec p(2);
  p << 1.0, 0.0;
  // H = (p^2 + q^2)/2 at (1,0): X_H = p d_q - q d_p evaluated -> (0, 1)
  const Vec x = hamiltonian_vector_field(harmonic_oscillator(), omega0, p);
  REQUIRE((x - (Vec(2) << 0.0, 1.0).finished()).norm() < 1e-14);

  ScalarHamiltonian c;
  c.dim = 2;
  c.value = [](const Vec&) { return 3.0; };
  c.gradient = [](const Vec& q) { return Vec::Zero(q.size()); };
  REQUIRE(hamiltonian_vector_field(c, omega0, p).norm() == 0.0);

  std::mt19937_64 rng(17);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4;
    Mat m(n, n), q(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        m(i, j) = dist(rng);
        q(i, j) = dist(rng);
      }
    const Mat omega = 0.5 * (m - m.transpose());
    if (!check_nondegenerate(omega).nondegenerate) continue;
    const Mat qs = 0.5 * (q + q.transpose());
    Vec pt(n);
    for (int i = 0; i < n; ++i) pt(i) = dist(rng);
    const Vec xh = hamiltonian_vector_field(quadratic_hamiltonian(qs), omega, pt);
    // residual of omega(X, .) + dH = 0 is  -Omega X + dH... as covector: Omega^T X + dH
    REQUIRE((omega.transpose() * xh + qs * pt).norm() < 1e-12 * std::max(1.0, (qs * pt).norm()));
  }
}

TEST_CASE("flow_with_jacobian: zero field, harmonic period, linear field exponential") {
  const Vec p0 = (Vec(2) << 0.7, -0.2).finished();
  TimeField zero = [](double, const Vec& x) { return Vec::Zero(x.size()); };
  const FlowResult fr0 = flow_with_jacobian(zero, p0, 1.0, 0.1);
  REQUIRE((fr0.states.back() - p0).norm() == 0.0);
  REQUIRE((fr0.jacobians.back() - Mat::Identity(2, 2)).norm() == 0.0);

  const Mat omega0 = standard_symplectic(2);
  const TimeField ham = hamiltonian_field(harmonic_oscillator(), omega0);
  const FlowResult orbit = flow_with_jacobian(ham, p0, kTwoPi, 1e-3, nullptr, 0.0, 100);
  REQUIRE((orbit.states.back() - p0).norm() < 1e-6);
  for (const Mat& j : orbit.jacobians) REQUIRE(j.determinant() > 0.0);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist;
  Mat a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = dist(rng);
  TimeField lin = [a](double, const Vec& x) -> Vec { return a * x; };
  TimeFieldJacobian lin_jac = [a](double, const Vec&) { return a; };
  const FlowResult fr = flow_with_jacobian(lin, Vec::Ones(3), 1.0, 1e-3, lin_jac, 0.0, 1000);
  const Mat expected = a.exp();
  REQUIRE((fr.jacobians.back() - expected).norm() < 1e-8);
}

TEST_CASE("symplecticity residual: identity, hamiltonian, non-hamiltonian") {
  const Mat omega0 = standard_symplectic(2);
  TimeField zero = [](double, const Vec& x) { return Vec::Zero(x.size()); };
  const FlowResult fr0 = flow_with_jacobian(zero, Vec::Zero(2), 1.0, 0.25);
  REQUIRE(symplecticity_residual(fr0, omega0) == 0.0);

  const TimeField ham = hamiltonian_field(harmonic_oscillator(), omega0);
  const FlowResult orbit = flow_with_jacobian(ham, (Vec(2) << 1.0, 0.0).finished(), 10.0, 1e-3, nullptr, 0.0, 500);
  REQUIRE(symplecticity_residual(orbit, omega0) < 1e-8);

  // x d_x on R^2: Jacobian diag(e^t, 1), pullback defect grows like |e^t - 1|
  TimeField expand = [](double, const Vec& x) -> Vec { return (Vec(2) << x(0), 0.0).finished(); };
  const double t_end = 1.0;
  const FlowResult fe = flow_with_jacobian(expand, (Vec(2) << 1.0, 1.0).finished(), t_end, 1e-3, nullptr, 0.0, 1000);
  const double expected = std::sqrt(2.0) * std::abs(std::exp(t_end) - 1.0);
  REQUIRE(symplecticity_residual(fe, omega0) == Catch::Approx(expected).epsilon(1e-6));
}

TEST_CASE("energy conservation and fourth-order convergence") {
  const Mat omega0 = standard_symplectic(2);
  const ScalarHamiltonian h = harmonic_oscillator();
  const TimeField ham = hamiltonian_field(h, omega0);
  const Vec p0 = (Vec(2) << 1.0, 0.0).finished();
  auto run = [&](double step) { return flow_with_jacobian(ham, p0, 10.0, step, nullptr, 0.0, 1000000); };
  auto drift = [&](const FlowResult& fr) {
    double worst = 0.0;
    for (const Vec& x : fr.states) worst = std::max(worst, std::abs(h.value(x) - h.value(p0)));
    return worst;
  };
  // at h = 1e-3 both defects sit far below 1e-8
  const FlowResult fine = run(1e-3);
  REQUIRE(drift(fine) < 1e-8);
  REQUIRE(symplecticity_residual(fine, omega0) < 1e-8);
  // fourth-order convergence measured where truncation dominates roundoff
  const double r1 = symplecticity_residual(run(0.05), omega0);
  const double r2 = symplecticity_residual(run(0.025), omega0);
  REQUIRE(r1 / r2 > 12.0);
}

TEST_CASE("liouville residual: radial field, zero field, radial plus hamiltonian") {
  const Mat omega0 = standard_symplectic(4);
  std::vector<Vec> samples;
  std::mt19937_64 rng(41);
  std::normal_distribution<double> dist(0.0, 0.5);
  for (int i = 0; i < 10; ++i) {
    Vec p(4);
    for (int k = 0; k < 4; ++k) p(k) = dist(rng);
    samples.push_back(p);
  }
  auto radial = [](const Vec& x) -> Vec { return 0.5 * x; };
  REQUIRE(liouville_residual(radial, omega0, samples) < 1e-10);

  auto zero = [](const Vec& x) -> Vec { return Vec::Zero(x.size()); };
  REQUIRE(liouville_residual(zero, omega0, samples) == Catch::Approx(omega0.norm()));

  Mat q(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) q(i, j) = dist(rng);
  const Mat qs = 0.5 * (q + q.transpose());
  Eigen::PartialPivLU<Mat> lu(omega0);
  auto combo = [&, qs](const Vec& x) -> Vec { return 0.5 * x + lu.solve(qs * x); };
  REQUIRE(liouville_residual(combo, omega0, samples) < 1e-8);
}

TEST_CASE("moser isotopy: identity case, radial weight on R^2, cubic perturbation on R^4") {
  // omega = omega0 -> phi_1 = identity
  TwoFormField flat = [](const Vec&) { return standard_symplectic(2); };
  std::vector<Vec> samples2;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) samples2.push_back((Vec(2) << 0.08 * i, 0.08 * j).finished());
  const MoserResult trivial = moser_isotopy(flat, 0.2, 32, samples2);
  for (size_t i = 0; i < trivial.points.size(); ++i)
    REQUIRE((trivial.images[i] - trivial.points[i]).norm() < 1e-12);

  // omega = (1 + x^2 + y^2) dx ^ dy on radius 0.2
  TwoFormField weighted = [](const Vec& x) {
    return ((1.0 + x.squaredNorm()) * standard_symplectic(2)).eval();
  };
  const MoserResult m2 = moser_isotopy(weighted, 0.2, 64, samples2);
  REQUIRE(m2.max_pullback_residual < 1e-6);
  // phi_1(0) = 0 by construction
  for (size_t i = 0; i < m2.points.size(); ++i)
    if (m2.points[i].norm() == 0.0) REQUIRE(m2.images[i].norm() < 1e-14);

  // independent oracle: pull back with finite-difference Jacobians
  {
    TimeField field = [&](double t, const Vec& x) -> Vec {
      const Mat wt = t * weighted(x) + (1.0 - t) * standard_symplectic(2);
      const OneFormField prim = radial_primitive(weighted);
      return wt.lu().solve(prim(x) - standard_primitive(x));
    };
    const Vec p = (Vec(2) << 0.1, -0.06).finished();
    auto flow_to_one = [&](const Vec& start) {
      return flow_with_jacobian(field, start, 1.0, 1.0 / 64).states.back();
    };
    const double fd = 1e-6;
    Mat dphi(2, 2);
    for (int k = 0; k < 2; ++k) {
      const Vec e = Vec::Unit(2, k);
      dphi.col(k) = (flow_to_one(p + fd * e) - flow_to_one(p - fd * e)) / (2 * fd);
    }
    const Vec img = flow_to_one(p);
    const Mat pullback = dphi.transpose() * weighted(img) * dphi;
    REQUIRE((pullback - standard_symplectic(2)).norm() < 1e-5);
  }

  // omega0 + d(small cubic 1-form) on R^4, radius 0.1
  // beta = c * x0^2 x1 dx2  =>  dbeta = 2 c x0 x1 dx0 ^ dx2 + c x0^2 dx1 ^ dx2
  const double c = 0.8;
  TwoFormField cubic = [c](const Vec& x) {
    Mat w = standard_symplectic(4);
    w(0, 2) += 2 * c * x(0) * x(1);
    w(2, 0) -= 2 * c * x(0) * x(1);
    w(1, 2) += c * x(0) * x(0);
    w(2, 1) -= c * x(0) * x(0);
    return w;
  };
  std::vector<Vec> samples4;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-0.07, 0.07);
  for (int i = 0; i < 20; ++i) {
    Vec p(4);
    for (int k = 0; k < 4; ++k) p(k) = u(rng);
    samples4.push_back(p);
  }
  samples4.push_back(Vec::Zero(4));
  const MoserResult m4 = moser_isotopy(cubic, 0.1, 64, samples4);
  REQUIRE(m4.max_pullback_residual < 1e-6);

  // a user-supplied analytic primitive produces its own valid Darboux chart
  // (primitives differing by an exact form give different isotopies)
  OneFormField analytic = [c](const Vec& x) -> Vec {
    Vec lam = standard_primitive(x);
    lam(2) += c * x(0) * x(0) * x(1);
    return lam;
  };
  const MoserResult m4b = moser_isotopy(cubic, 0.1, 64, samples4, analytic);
  REQUIRE(m4b.max_pullback_residual < 1e-6);

  // degenerate omega_t must be reported as an obstruction
  TwoFormField collapsing = [](const Vec& x) {
    return ((1.0 - 2.0 * x.squaredNorm()) * standard_symplectic(2)).eval();
  };
  std::vector<Vec> far = {(Vec(2) << 0.5, 0.5).finished()};
  REQUIRE_THROWS_AS(moser_isotopy(collapsing, 0.8, 16, far), DegeneracyError);
}
