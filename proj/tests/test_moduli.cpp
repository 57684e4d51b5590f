#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "holocurve/moduli.hpp"

using namespace holocurve;

TEST_CASE("curve index: worked values and parity") {
  // virdim of the one-marked-point sphere space in class A0: 2n
  for (int n = 1; n <= 6; ++n) REQUIRE(curve_index({0, 1, n, 2}) == 2 * n);
  // k-fold covers of a rigid sphere in complex dimension 4: 2 - 2k
  for (int k = 1; k <= 5; ++k) REQUIRE(curve_index({0, 0, 4, -k}) == 2 - 2 * k);
  // genus-2 product-type curve with c1(A) = chi(Sigma): (n-1) chi = -2 at n = 2
  REQUIRE(curve_index({2, 0, 2, -2}) == -2);

  for (int g = 0; g <= 5; ++g)
    for (int m = 0; m <= 5; ++m)
      for (int c1 = -10; c1 <= 10; ++c1)
        for (int n = 1; n <= 4; ++n) REQUIRE(curve_index({g, m, n, c1}) % 2 == 0);
}

TEST_CASE("teichmueller dimensions and the index relation") {
  REQUIRE(teichmueller_dimension(0, 4).dim_teich == 2);
  REQUIRE(teichmueller_dimension(1, 0).dim_teich == 2);
  REQUIRE(teichmueller_dimension(2, 0).dim_teich == 6);
  REQUIRE(teichmueller_dimension(0, 0).dim_aut == 6);
  REQUIRE(teichmueller_dimension(0, 1).dim_aut == 4);
  REQUIRE(teichmueller_dimension(0, 2).dim_aut == 2);
  for (int g = 0; g <= 4; ++g)
    for (int m = 0; m <= 6; ++m) {
      const auto d = teichmueller_dimension(g, m);
      REQUIRE(d.dim_teich - d.dim_aut == 6 * g - 6 + 2 * m);
    }
}

TEST_CASE("moebius normalization: identity, inversion, random triples") {
  const auto id = moebius_normalize(RiemannPoint::at({0, 0}), RiemannPoint::at({1, 0}), RiemannPoint::inf());
  REQUIRE(std::abs(id.apply(RiemannPoint::at({0.3, 0.4})).z - Complex(0.3, 0.4)) < 1e-14);

  // (inf, 1, 0) -> z |-> 1/z
  const auto inv = moebius_normalize(RiemannPoint::inf(), RiemannPoint::at({1, 0}), RiemannPoint::at({0, 0}));
  REQUIRE(std::abs(inv.apply(RiemannPoint::at({2, 0})).z - Complex(0.5, 0)) < 1e-14);
  REQUIRE(inv.apply(RiemannPoint::at({0, 0})).infinite);

  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const RiemannPoint p1 = RiemannPoint::at({u(rng), u(rng)});
    const RiemannPoint p2 = RiemannPoint::at({u(rng), u(rng)});
    const RiemannPoint p3 = (trial % 7 == 0) ? RiemannPoint::inf() : RiemannPoint::at({u(rng), u(rng)});
    if (std::abs(p1.z - p2.z) < 1e-3) continue;
    if (!p3.infinite && (std::abs(p1.z - p3.z) < 1e-3 || std::abs(p2.z - p3.z) < 1e-3)) continue;
    const auto m = moebius_normalize(p1, p2, p3);
    REQUIRE(std::abs(m.determinant() - Complex(1, 0)) < 1e-12);
    REQUIRE(std::abs(m.apply(p1).z) < 1e-10);
    REQUIRE(std::abs(m.apply(p2).z - Complex(1, 0)) < 1e-10);
    REQUIRE(m.apply(p3).infinite);
  }

  REQUIRE_THROWS_AS(
      moebius_normalize(RiemannPoint::at({1, 0}), RiemannPoint::at({1, 0}), RiemannPoint::inf()),
      DomainError);
}

TEST_CASE("torus modulus reduction") {
  const auto fixed = torus_modulus_reduce(Complex(0, 1));
  REQUIRE(std::abs(fixed.reduced - Complex(0, 1)) < 1e-14);
  REQUIRE(fixed.witness == std::array<long, 4>{1, 0, 0, 1});

  const auto shifted = torus_modulus_reduce(Complex(2, 1));
  REQUIRE(std::abs(shifted.reduced - Complex(0, 1)) < 1e-12);
  REQUIRE(shifted.witness == std::array<long, 4>{1, -2, 0, 1});

  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> ure(-5.0, 5.0), uim(0.01, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Complex lambda(ure(rng), uim(rng));
    const auto red = torus_modulus_reduce(lambda);
    REQUIRE(red.converged);
    REQUIRE(std::abs(red.reduced.real()) <= 0.5 + 1e-9);
    REQUIRE(std::abs(red.reduced) >= 1.0 - 1e-9);
    REQUIRE(std::abs(modular_apply(red.witness, lambda) - red.reduced) < 1e-9);
    // idempotence with identity witness
    const auto again = torus_modulus_reduce(red.reduced);
    REQUIRE(std::abs(again.reduced - red.reduced) < 1e-12);
    REQUIRE(again.witness == std::array<long, 4>{1, 0, 0, 1});
  }
}

TEST_CASE("torus isotropy orders: generic 2, i -> 4, e^{i pi/3} -> 6") {
  REQUIRE(torus_isotropy_order(Complex(0.3, 1.7)) == 2);
  REQUIRE(torus_isotropy_order(Complex(0, 1)) == 4);
  const Complex omega = std::polar(1.0, kPi / 3.0);
  REQUIRE(torus_isotropy_order(omega) == 6);

  // one-time validation: entry bound 3 agrees with bound 10 at the key moduli
  for (Complex lambda : {Complex(0.3, 1.7), Complex(0, 1), omega, Complex(0.5, std::sqrt(3.0) / 2)}) {
    REQUIRE(torus_isotropy_order(lambda, 3) == torus_isotropy_order(lambda, 10));
  }

  // modular invariance: stabilizer order is constant along SL(2,Z) orbits
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> small(-2, 2);
  for (Complex lambda : {Complex(0, 1), omega, Complex(0.21, 1.3)}) {
    for (int trial = 0; trial < 10; ++trial) {
      long a = small(rng), b = small(rng), c = small(rng), d;
      // complete (a, b, c) to det 1 when possible
      bool ok = false;
      for (d = -3; d <= 3; ++d)
        if (a * d - b * c == 1) {
          ok = true;
          break;
        }
      if (!ok) continue;
      const Complex moved = modular_apply({a, b, c, d}, lambda);
      if (moved.imag() <= 1e-6) continue;
      const auto red = torus_modulus_reduce(moved);
      REQUIRE(torus_isotropy_order(red.reduced) == torus_isotropy_order(lambda));
    }
  }
}
