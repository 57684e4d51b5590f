#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "holocurve/symplectic.hpp"

using namespace holocurve;

namespace {

Mat random_matrix(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = dist(rng);
  return m;
}

Mat random_antisymmetric(std::mt19937_64& rng, int n) {
  const Mat m = random_matrix(rng, n);
  return 0.5 * (m - m.transpose());
}

Mat random_anticommuting(std::mt19937_64& rng, int n, double scale) {
  // project a random matrix onto the anticommutant of J0
  const Mat j0 = standard_complex_structure(n);
  const Mat m = random_matrix(rng, n, scale);
  return 0.5 * (m + j0 * m * j0);  // Y J0 = -J0 Y
}

}  // namespace

TEST_CASE("pfaffian matches sqrt(det) and transforms correctly") {
  std::mt19937_64 rng(11);
  REQUIRE(pfaffian(standard_symplectic(2)) == Catch::Approx(1.0));
  REQUIRE(pfaffian(standard_symplectic(6)) == Catch::Approx(1.0));
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 * (1 + static_cast<int>(rng() % 3));
    const Mat a = random_antisymmetric(rng, n);
    const double pf = pfaffian(a);
    REQUIRE(pf * pf == Catch::Approx(a.determinant()).margin(1e-8));
    const Mat b = random_matrix(rng, n);
    REQUIRE(pfaffian((b.transpose() * a * b).eval()) ==
            Catch::Approx(b.determinant() * pf).margin(1e-8 * std::max(1.0, std::abs(pf))));
  }
}

TEST_CASE("check_nondegenerate on standard, zero, and engineered-singular forms") {
  const auto std4 = check_nondegenerate(standard_symplectic(4));
  REQUIRE(std4.nondegenerate);
  REQUIRE(std4.pfaffian_value == Catch::Approx(1.0));

  const auto zero2 = check_nondegenerate(Mat::Zero(2, 2));
  REQUIRE_FALSE(zero2.nondegenerate);
  REQUIRE(zero2.pfaffian_value == 0.0);

  // Omega = B^T Omega0 B with singular B has the null vector of B in its kernel
  std::mt19937_64 rng(7);
  Mat b = random_matrix(rng, 4);
  const Vec null_dir = Vec::Unit(4, 2) + Vec::Unit(4, 0);
  b.col(2) = b.col(0);  // rank deficiency: B (e2 - e0) = 0 direction
  const Mat omega = b.transpose() * standard_symplectic(4) * b;
  REQUIRE_FALSE(check_nondegenerate(omega).nondegenerate);
  const Vec nv = Vec::Unit(4, 2) - Vec::Unit(4, 0);
  REQUIRE((omega * nv).norm() < 1e-12);
  (void)null_dir;

  REQUIRE_THROWS_AS(check_nondegenerate(Mat::Zero(3, 3)), DimensionError);
}

TEST_CASE("darboux basis: standard form, scaled form, random nondegenerate") {
  // standard omega0 -> coordinate basis
  const Mat b0 = darboux_basis(standard_symplectic(4));
  REQUIRE((b0 - Mat::Identity(4, 4)).norm() < 1e-10);

  // omega = 2 omega0 on R^2 -> (e1, e2/2)
  const Mat b1 = darboux_basis((2.0 * standard_symplectic(2)).eval());
  REQUIRE((b1.col(0) - Vec::Unit(2, 0)).norm() < 1e-12);
  REQUIRE((b1.col(1) - 0.5 * Vec::Unit(2, 1)).norm() < 1e-12);

  std::mt19937_64 rng(23);
  for (int dim : {2, 4, 6}) {
    for (int trial = 0; trial < 100; ++trial) {
      Mat omega = random_antisymmetric(rng, dim);
      if (!check_nondegenerate(omega).nondegenerate) continue;
      const Mat basis = darboux_basis(omega);
      REQUIRE((basis.transpose() * omega * basis - standard_symplectic(dim)).norm() < 1e-9);
    }
  }

  REQUIRE_THROWS_AS(darboux_basis(Mat::Zero(2, 2)), DegeneracyError);
}

TEST_CASE("compatible_from_metric: standard triple, retraction, anisotropic metric") {
  const int n = 4;
  const Mat omega0 = standard_symplectic(n);
  const Mat j0 = standard_complex_structure(n);

  REQUIRE((compatible_from_metric(omega0, Mat::Identity(n, n)) - j0).norm() < 1e-12);

  // retraction: g = omega0(. , J .) for compatible J recovers J
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat y = random_anticommuting(rng, n, 0.1);
    const Mat j = cayley_chart(y).j;
    const auto cls = classify_taming(omega0, j);
    if (cls.verdict != Taming::Compatible) continue;  // cayley J_Y is omega0-compatible near J0
    const Mat g = *cls.g_j;
    REQUIRE((compatible_from_metric(omega0, g) - j).norm() < 1e-10);
  }

  // g = diag(4, 1) on R^2
  Mat g2 = Mat::Identity(2, 2);
  g2(0, 0) = 4.0;
  const Mat j = compatible_from_metric(standard_symplectic(2), g2);
  REQUIRE((j * j + Mat::Identity(2, 2)).norm() < 1e-10);
  const Mat q = standard_symplectic(2) * j;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (q + q.transpose()));
  REQUIRE(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("compatible_from_metric property sweep") {
  std::mt19937_64 rng(99);
  for (int dim : {2, 4, 6}) {
    for (int trial = 0; trial < 30; ++trial) {
      Mat omega = random_antisymmetric(rng, dim);
      if (!check_nondegenerate(omega).nondegenerate) continue;
      Mat g = random_matrix(rng, dim);
      g = g * g.transpose() + 0.3 * Mat::Identity(dim, dim);
      const Mat j = compatible_from_metric(omega, g);
      REQUIRE((j * j + Mat::Identity(dim, dim)).norm() < 1e-10);
      const Mat q = omega * j;
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (q + q.transpose()));
      REQUIRE(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("cayley chart: center, round trip, rejected input") {
  const int n = 4;
  REQUIRE((cayley_chart(Mat::Zero(n, n)).j - standard_complex_structure(n)).norm() < 1e-14);

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat y = random_anticommuting(rng, n, 0.12);
    if (y.norm() >= 0.5) continue;
    const auto res = cayley_chart(y);
    REQUIRE((res.j * res.j + Mat::Identity(n, n)).norm() < 1e-11);
    const Mat y_back = cayley_chart_inverse(res.j);
    REQUIRE((y - y_back).norm() < 1e-10);
  }

  Mat bad = Mat::Zero(n, n);
  bad(0, 0) = 1.0;  // commutes, does not anticommute
  REQUIRE_THROWS_AS(cayley_chart(bad), DomainError);
}

TEST_CASE("classify_taming: compatible, tame-only, neither") {
  const int n = 4;
  const Mat omega0 = standard_symplectic(n);
  const Mat j0 = standard_complex_structure(n);

  REQUIRE(classify_taming(omega0, j0).verdict == Taming::Compatible);
  REQUIRE(classify_taming(omega0, (-j0).eval()).verdict == Taming::Neither);

  // conjugate J0 by a small non-symplectic map: stays tame, loses invariance
  std::mt19937_64 rng(13);
  bool found_tame_only = false;
  for (int trial = 0; trial < 50 && !found_tame_only; ++trial) {
    const Mat s = Mat::Identity(n, n) + 0.12 * random_matrix(rng, n);
    const Mat j = s * j0 * s.inverse();
    if ((j * j + Mat::Identity(n, n)).norm() > 1e-9) continue;
    const auto cls = classify_taming(omega0, j);
    if (cls.verdict == Taming::TameOnly) {
      found_tame_only = true;
      const double defect = (j.transpose() * omega0 * j - omega0).norm();
      REQUIRE(defect > 1e-10);  // J-invariance genuinely fails
      REQUIRE(cls.g_j.has_value());
    }
  }
  REQUIRE(found_tame_only);
}

TEST_CASE("nijenhuis tensor: dimension two, constant field, and R^4 convergence") {
  // any J field on R^2 gives N_J = 0 within O(h^2)
  std::mt19937_64 rng(301);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = 0.2 + 0.05 * static_cast<double>(trial);
    AlmostComplexField field;
    field.dim = 2;
    field.fd_step = 1e-4;
    field.eval = [a](const Vec& p) {
      Mat y(2, 2);
      const double s = a * std::sin(p(0)) * std::cos(2 * p(1));
      const double c = a * std::cos(p(0) + p(1));
      y << s, c, c, -s;  // anticommutes with J0 on R^2
      return cayley_chart(y).j;
    };
    Vec p(2), x(2), y(2);
    p << 0.3, -0.2;
    x << 1.0, 0.4;
    y << -0.3, 0.8;
    REQUIRE(nijenhuis_tensor(field, p, x, y).norm() < 1e-6);
  }

  // constant field on R^4: exactly zero
  AlmostComplexField constant_field;
  constant_field.dim = 4;
  constant_field.eval = [](const Vec&) { return standard_complex_structure(4); };
  Vec p(4), x(4), yv(4);
  p << 0.1, 0.2, -0.3, 0.4;
  x << 1, 0, 2, -1;
  yv << 0, 1, 1, 1;
  REQUIRE(nijenhuis_tensor(constant_field, p, x, yv).norm() == 0.0);

  // nonlinear J on R^4: nonzero, with second-order convergence under halving h
  auto make_field = [](double h) {
    AlmostComplexField f;
    f.dim = 4;
    f.fd_step = h;
    f.eval = [](const Vec& q) {
      Mat y = Mat::Zero(4, 4);
      const double u = 0.3 * std::sin(q(0) + 2 * q(3)) + 0.2 * q(1) * q(2);
      const double v = 0.25 * std::cos(q(2)) * q(0);
      // block structure anticommuting with J0 (2x2 complex-antilinear blocks)
      y.block(0, 0, 2, 2) << u, v, v, -u;
      y.block(2, 2, 2, 2) << v, -u, -u, -v;
      y.block(0, 2, 2, 2) << 0.1 * u, 0.2 * v, 0.2 * v, -0.1 * u;
      y.block(2, 0, 2, 2) = y.block(0, 2, 2, 2);
      return cayley_chart(y).j;
    };
    return f;
  };
  const Vec n1 = nijenhuis_tensor(make_field(1e-3), p, x, yv);
  const Vec n2 = nijenhuis_tensor(make_field(5e-4), p, x, yv);
  const Vec n3 = nijenhuis_tensor(make_field(2.5e-4), p, x, yv);
  REQUIRE(n1.norm() > 1e-2);
  // Richardson: error(h) ~ C h^2, so successive differences shrink ~4x
  const double d12 = (n1 - n2).norm();
  const double d23 = (n2 - n3).norm();
  REQUIRE(d23 < d12 / 2.5);

  // antisymmetry and bilinearity within FD tolerance
  const AlmostComplexField f = make_field(1e-4);
  const Vec nxy = nijenhuis_tensor(f, p, x, yv);
  const Vec nyx = nijenhuis_tensor(f, p, yv, x);
  REQUIRE((nxy + nyx).norm() < 1e-5 * std::max(1.0, nxy.norm()));
  const Vec nsx = nijenhuis_tensor(f, p, (2.5 * x).eval(), yv);
  REQUIRE((nsx - 2.5 * nxy).norm() < 1e-5 * std::max(1.0, nxy.norm()));
}
