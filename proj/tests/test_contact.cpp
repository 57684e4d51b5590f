#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "holocurve/contact.hpp"

using namespace holocurve;

namespace {

Vec t3_point(double th, double ph, double eta) { return (Vec(3) << th, ph, eta).finished(); }

// alpha_t = (psi_t^{-1})^* alpha_N for the Legendrian translation flow
// psi_t(th, ph, eta) = (th - t sin(2 pi N eta), ph + t cos(2 pi N eta), eta):
// alpha_t = cos dtheta + sin dphi + 2 pi N t deta, alpha_dot = 2 pi N deta.
ContactFamilyT3 pulled_back_family(int n) {
  const double c = kTwoPi * n;
  ContactFamilyT3 fam;
  fam.alpha = [c](double t, const Vec& x) {
    return (Vec(3) << std::cos(c * x(2)), std::sin(c * x(2)), c * t).finished();
  };
  fam.alpha_dot = [c](double, const Vec&) { return (Vec(3) << 0.0, 0.0, c).finished(); };
  fam.dalpha = [c](double, const Vec& x) {
    Mat d = Mat::Zero(3, 3);
    d(2, 0) = -c * std::sin(c * x(2));
    d(0, 2) = -d(2, 0);
    d(2, 1) = c * std::cos(c * x(2));
    d(1, 2) = -d(2, 1);
    return d;
  };
  return fam;
}

std::vector<Vec> grid_samples(int per_axis) {
  std::vector<Vec> pts;
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j)
      for (int k = 0; k < per_axis; ++k)
        pts.push_back(t3_point(static_cast<double>(i) / per_axis, static_cast<double>(j) / per_axis,
                               static_cast<double>(k) / per_axis));
  return pts;
}

}  // namespace

TEST_CASE("reeb field of alpha_N matches the symbolic solve") {
  // alpha_1 at eta = 0 -> d_theta; alpha_N at eta = 1/(4N) -> d_phi
  ContactFormT3 a1{1};
  REQUIRE((reeb_field(a1, t3_point(0.3, 0.9, 0.0)) - Vec::Unit(3, 0)).norm() < 1e-14);
  for (int n : {1, 2, 3}) {
    ContactFormT3 an{n};
    REQUIRE((reeb_field(an, t3_point(0.1, 0.2, 1.0 / (4 * n))) - Vec::Unit(3, 1)).norm() < 1e-12);
    // pointwise defining identities on random points
    std::mt19937_64 rng(5 + n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const Vec p = t3_point(u(rng), u(rng), u(rng));
      const Vec x = reeb_field(an, p);
      REQUIRE(std::abs(an.alpha(p).dot(x) - 1.0) < 1e-12);
      REQUIRE((x.transpose() * an.dalpha(p)).norm() < 1e-12);
      // closed form cos, sin, 0
      const Vec expect = (Vec(3) << std::cos(kTwoPi * n * p(2)), std::sin(kTwoPi * n * p(2)), 0.0).finished();
      REQUIRE((x - expect).norm() < 1e-12);
    }
  }

  // non-contact form dtheta: dalpha = 0, degenerate
  ContactFamilyT3 flat;
  flat.alpha = [](double, const Vec&) { return (Vec(3) << 1.0, 0.0, 0.0).finished(); };
  flat.dalpha = [](double, const Vec&) { return Mat::Zero(3, 3); };
  REQUIRE_THROWS_AS(reeb_field_from(flat.alpha(0, t3_point(0, 0, 0)), flat.dalpha(0, t3_point(0, 0, 0))),
                    DegeneracyError);
}

TEST_CASE("gray isotopy: constant family is the identity") {
  ContactFormT3 a2{2};
  const auto fam = a2.constant_family();
  std::vector<Vec> samples = grid_samples(4);
  const GrayResult res = gray_isotopy(fam, samples, {0.5, 1.0}, 16);
  for (size_t it = 0; it < res.times.size(); ++it)
    for (size_t ip = 0; ip < samples.size(); ++ip) {
      REQUIRE((res.images[it][ip] - samples[ip]).norm() < 1e-12);
      REQUIRE(res.conformal[it][ip] == Catch::Approx(1.0));
    }
  REQUIRE(res.max_form_residual < 1e-12);
}

TEST_CASE("gray isotopy recovers a known contact isotopy") {
  const int n = 1;
  const auto fam = pulled_back_family(n);
  std::vector<Vec> samples = grid_samples(3);
  const GrayResult res = gray_isotopy(fam, samples, {0.25, 0.5, 1.0}, 64);
  const double c = kTwoPi * n;
  for (size_t it = 0; it < res.times.size(); ++it) {
    const double t = res.times[it];
    for (size_t ip = 0; ip < samples.size(); ++ip) {
      const Vec& p = samples[ip];
      const Vec expected = t3_point(p(0) - t * std::sin(c * p(2)), p(1) + t * std::cos(c * p(2)), p(2));
      REQUIRE((res.images[it][ip] - expected).norm() < 1e-5);
      REQUIRE(std::abs(res.conformal[it][ip] - 1.0) < 1e-6);
    }
  }
  REQUIRE(res.max_form_residual < 1e-6);
  REQUIRE(res.max_kernel_residual < 1e-6);
}

TEST_CASE("gray isotopy for an interpolated perturbation keeps the kernel") {
  // linear interpolation from alpha_1 to a C0-small perturbation keeping contact
  const double c = kTwoPi;
  ContactFamilyT3 fam;
  const double amp = 0.08;
  fam.alpha = [c, amp](double t, const Vec& x) {
    return (Vec(3) << std::cos(c * x(2)) + t * amp * std::sin(c * x(1)),
            std::sin(c * x(2)) + t * amp * std::cos(c * x(0)), 0.0)
        .finished();
  };
  fam.alpha_dot = [c, amp](double, const Vec& x) {
    return (Vec(3) << amp * std::sin(c * x(1)), amp * std::cos(c * x(0)), 0.0).finished();
  };
  fam.dalpha = [c, amp](double t, const Vec& x) {
    Mat d = Mat::Zero(3, 3);
    d(2, 0) = -c * std::sin(c * x(2));
    d(2, 1) = c * std::cos(c * x(2));
    d(1, 0) = t * amp * c * std::cos(c * x(1));   // d(sin(c x1)) wedge dtheta component
    d(0, 1) = -d(1, 0);
    d(0, 2) = -d(2, 0);
    d(1, 2) = -d(2, 1);
    // perturbation of the dphi coefficient: d(t amp cos(c x0)) ^ dphi
    d(0, 1) += -t * amp * c * std::sin(c * x(0));
    d(1, 0) -= -t * amp * c * std::sin(c * x(0));
    return d;
  };
  std::vector<Vec> samples = grid_samples(3);
  const GrayResult res = gray_isotopy(fam, samples, {1.0}, 64);
  REQUIRE(res.max_form_residual < 1e-6);
  REQUIRE(res.max_kernel_residual < 1e-6);
}

TEST_CASE("reeb orbit classes on (T^3, alpha_N)") {
  ContactFormT3 a1{1};
  // eta = 0: closed with class (1, 0, 0)
  const OrbitClass c0 = reeb_orbit_class(a1, t3_point(0.2, 0.7, 0.0), 3.0);
  REQUIRE(c0.closed);
  REQUIRE(c0.homology == Eigen::Vector3i(1, 0, 0));

  // eta with tan(2 pi eta) irrational: not closed, rotation vector reported
  const OrbitClass c1 = reeb_orbit_class(a1, t3_point(0.0, 0.0, 0.137), 2.0);
  REQUIRE_FALSE(c1.closed);
  REQUIRE(std::abs(c1.rotation(0) - std::cos(kTwoPi * 0.137)) < 1e-9);
  REQUIRE(std::abs(c1.rotation(1) - std::sin(kTwoPi * 0.137)) < 1e-9);

  // sweep: every closed orbit found has nonzero homology class
  for (int n : {1, 2, 3}) {
    ContactFormT3 an{n};
    int closed_found = 0;
    const int g = 8;  // coarse sweep in the unit test; acceptance runs 32^3
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j)
        for (int k = 0; k < g; ++k) {
          const OrbitClass oc =
              reeb_orbit_class(an, t3_point(static_cast<double>(i) / g, static_cast<double>(j) / g,
                                            static_cast<double>(k) / g),
                               1.0, 1.0 / 32);
          if (oc.closed) {
            ++closed_found;
            REQUIRE(oc.homology.squaredNorm() > 0);
          }
        }
    REQUIRE(closed_found > 0);
  }
}
