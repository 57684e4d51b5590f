#pragma once

// Model holomorphic line bundles E_k over S^2 with transition g_k(z) = z^{-k}
// (exact kernel/cokernel arithmetic), the disk operator with totally real
// boundary condition of Maslov index mu, and the line-bundle transversality
// criteria.

#include "holocurve/core.hpp"
#include "holocurve/rank.hpp"

namespace holocurve {

// Sections of E_k: chart-1 function f, chart-2 representative z^k f(1/z).
// For polynomial f the gluing is exact and smoothness over chart 2 holds
// iff deg f <= k.
struct SphereBundleSection {
  int chern = 0;
  CVec poly;  // chart-1 coefficients f(z) = sum poly[m] z^m
  bool smooth_over_chart2() const {
    for (int m = static_cast<int>(poly.size()) - 1; m > chern; --m)
      if (poly(m) != Complex(0, 0)) return false;
    return true;
  }
  Complex eval_chart1(Complex z) const {
    Complex acc(0, 0);
    for (int m = static_cast<int>(poly.size()) - 1; m >= 0; --m) acc = acc * z + poly(m);
    return acc;
  }
  // g(w) = w^k f(1/w), polynomial exactly when deg f <= k
  Complex eval_chart2(Complex w) const {
    Complex acc(0, 0);
    for (int m = 0; m < poly.size(); ++m) acc += poly(m) * std::pow(w, chern - m);
    return acc;
  }
};

struct SphereKernelResult {
  int chern = 0;
  int dim_ker = 0;    // real dimension
  int dim_coker = 0;  // via the dual rule c1 -> -c1 - 2
  int index = 0;      // 2 + 2k always
  std::vector<SphereBundleSection> kernel_basis;  // monomials 1..z^k (complex span)
};

// Holomorphic sections of E_k are polynomials of degree <= k (empty for
// k < 0); the cokernel comes from the adjoint bundle rule c1(E^) = -c1 - 2.
inline SphereKernelResult sphere_bundle_kernel(int k) {
  SphereKernelResult out;
  out.chern = k;
  out.dim_ker = std::max(0, 2 + 2 * k);
  out.dim_coker = std::max(0, -2 - 2 * k);
  out.index = 2 + 2 * k;
  for (int m = 0; m <= k; ++m) {
    SphereBundleSection s;
    s.chern = k;
    s.poly = CVec::Zero(m + 1);
    s.poly(m) = Complex(1, 0);
    out.kernel_basis.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Disk operator with boundary line field ell_mu(theta) = e^{i mu theta / 2} R
// (the line turns through mu half-turns around the boundary; for odd mu the
// frame is anti-periodic and lives on the doubled cover).
//
// Discretization: domain = polynomials sum c_{ab} z^a zbar^b with
// 0 <= a <= N + mu, 0 <= b <= N.  With this asymmetric box the boundary
// frequency band F = [-N, N+mu] is carried bijectively onto itself by the
// pairing nu <-> mu - nu, so the boundary condition is represented exactly:
//   E_nu = conj(E_{mu-nu}),  E_nu := sum_{a-b=nu} c_{ab}.
// dbar(z^a zbar^b) = 2 b z^a zbar^{b-1}; boundary rows are appended to the
// operator matrix as real-linear equations.

struct DiskMaslovLayout {
  int mu = 0;
  int n_a = 0, n_b = 0;  // exponent bounds
  int n_cols() const { return (n_a + 1) * (n_b + 1); }
  int col(int a, int b) const { return a * (n_b + 1) + b; }
};

inline AssembledOperator assemble_disk_maslov(int mu, int n_trunc) {
  if (std::abs(mu) > n_trunc) throw DomainError("assemble_disk_maslov: need |mu| <= N");
  DiskMaslovLayout lay{mu, n_trunc + mu, n_trunc};
  const int cols = lay.n_cols();
  const int dbar_rows = (lay.n_a + 1) * lay.n_b;          // image exponents b <= N-1
  const int band = lay.n_a + lay.n_b + 1;                 // boundary frequencies
  const int bc_rows = band;                               // one real row per paired frequency slot
  AssembledOperator op;
  op.matrix = Mat::Zero(2 * dbar_rows + bc_rows, 2 * cols);
  op.domain_desc = "z^a zbar^b, a <= " + std::to_string(lay.n_a) + ", b <= " + std::to_string(lay.n_b);
  op.codomain_desc = "dbar image + boundary rows, mu = " + std::to_string(mu);
  op.zeroth_order_desc = "A = 0, ell_mu boundary condition";

  auto put_complex = [&](int row2, int col_c, Complex w) {
    // complex equation rows (Re, Im), complex unknown columns (Re, Im)
    op.matrix(row2, 2 * col_c) += w.real();
    op.matrix(row2, 2 * col_c + 1) += -w.imag();
    op.matrix(row2 + 1, 2 * col_c) += w.imag();
    op.matrix(row2 + 1, 2 * col_c + 1) += w.real();
  };

  // dbar block
  for (int a = 0; a <= lay.n_a; ++a)
    for (int b = 1; b <= lay.n_b; ++b) {
      const int r = a * lay.n_b + (b - 1);
      put_complex(2 * r, lay.col(a, b), Complex(2.0 * b, 0));
    }

  // boundary rows: iterate frequencies nu in [-N, N+mu]; the partner mu - nu
  // stays in band by construction of the asymmetric box.
  int row = 2 * dbar_rows;
  for (int nu = -lay.n_b; nu <= lay.n_a; ++nu) {
    const int partner = mu - nu;
    if (partner < -lay.n_b || partner > lay.n_a)
      throw DomainError("assemble_disk_maslov: internal band error");
    if (nu > partner) continue;  // handle each unordered pair once
    if (nu == partner) {
      // Im E_nu = 0: one real row
      for (int a = 0; a <= lay.n_a; ++a) {
        const int b = a - nu;
        if (b < 0 || b > lay.n_b) continue;
        const int c = lay.col(a, b);
        op.matrix(row, 2 * c + 1) += 1.0;  // Im part
      }
      row += 1;
    } else {
      // E_nu - conj(E_partner) = 0: two real rows
      for (int a = 0; a <= lay.n_a; ++a) {
        const int b = a - nu;
        if (b < 0 || b > lay.n_b) continue;
        const int c = lay.col(a, b);
        op.matrix(row, 2 * c) += 1.0;      // Re E_nu
        op.matrix(row + 1, 2 * c + 1) += 1.0;  // Im E_nu
      }
      for (int a = 0; a <= lay.n_a; ++a) {
        const int b = a - partner;
        if (b < 0 || b > lay.n_b) continue;
        const int c = lay.col(a, b);
        op.matrix(row, 2 * c) += -1.0;     // -Re E_partner
        op.matrix(row + 1, 2 * c + 1) += 1.0;  // +Im E_partner (conjugate)
      }
      row += 2;
    }
  }
  if (row != op.matrix.rows()) throw DomainError("assemble_disk_maslov: row count mismatch");
  return op;
}

// ---------------------------------------------------------------------------
// Line-bundle transversality criteria (n = 1 only):
//   c1(E) < 0          =>  D injective
//   c1(E) > -chi(Sigma) =>  D surjective
// with the equivalent index forms ind < chi => injective, ind > -chi => surjective.

enum class Transversality { Injective, Surjective, Isomorphism, Indeterminate };

struct TransversalityPrediction {
  Transversality verdict = Transversality::Indeterminate;
  bool injective = false;
  bool surjective = false;
  int index = 0;
};

inline TransversalityPrediction transversality_predict(int rank, int c1, int chi) {
  if (rank != 1) throw DomainError("transversality_predict: criteria are line-bundle statements (n = 1)");
  TransversalityPrediction out;
  out.index = chi + 2 * c1;  // n chi + 2 c1 with n = 1
  out.injective = c1 < 0;                    // equivalently ind < chi
  out.surjective = c1 > -chi;                // equivalently ind > -chi, or ind > c1
  if (out.injective && out.surjective) out.verdict = Transversality::Isomorphism;
  else if (out.injective) out.verdict = Transversality::Injective;
  else if (out.surjective) out.verdict = Transversality::Surjective;
  return out;
}

}  // namespace holocurve
