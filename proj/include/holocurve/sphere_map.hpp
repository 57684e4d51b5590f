#pragma once

// Gauge-fixed two-chart collocation for maps S^2 -> S^2 x T^2 and the
// nonlinear Cauchy-Riemann machinery on them: residuals, semi-analytic
// linearization (exact in the spectral basis, finite differences only in the
// pointwise closed-form residual), damped Gauss-Newton with anchor
// conditions eliminated exactly, and the gauge-free transversality
// certificate at the product curves u_m(z) = (z, m).

#include "holocurve/rank.hpp"
#include "holocurve/sphere_basis.hpp"

namespace holocurve {

// Almost complex structure on the product target S^2 x T^2, presented per
// sphere chart as a real 4x4 matrix on coordinates (Re zeta, Im zeta, m1, m2).
struct TargetAlmostComplexField {
  // eval(chart, zeta, m) -> J with J^2 = -1
  std::function<Mat(int, Complex, const Eigen::Vector2d&)> eval;
  double fd_step = 1e-5;  // target-direction derivative step
  bool product = true;    // exactly the split structure i + J_M

  Mat directional_derivative(int chart, Complex zeta, const Eigen::Vector2d& m, const Eigen::Vector4d& dir) const {
    const Eigen::Vector4d d = dir * fd_step;
    const Mat jp = eval(chart, zeta + Complex(d(0), d(1)), m + d.tail<2>());
    const Mat jm = eval(chart, zeta - Complex(d(0), d(1)), m - d.tail<2>());
    return (jp - jm) / (2.0 * fd_step);
  }
};

inline TargetAlmostComplexField product_structure() {
  TargetAlmostComplexField f;
  f.eval = [](int, Complex, const Eigen::Vector2d&) { return standard_complex_structure(4); };
  f.product = true;
  return f;
}

// ---------------------------------------------------------------------------
// Discretization geometry: polar collocation nodes on both charts up to the
// overlap radius, with precomputed basis tables.  The eps tables hold the
// tangent representation per chart (chart 2 carries the -w^2 transition
// factor), so a single coefficient vector describes the section globally.

struct SphereMapDiscretization {
  int trunc = 8;
  double r_overlap = 1.2;
  int n_radii = 0, n_angles = 0;
  SphereBasisSpec eps_spec;  // E_2 = TS^2
  SphereBasisSpec v_spec;    // E_0 scalars

  struct ChartTable {
    std::vector<Complex> nodes;
    std::vector<double> weights;  // r dr dth
    CMat eps_val, eps_ds, eps_dt;  // nodes x n_eps, tangent rep, d_s / d_t
    CMat v_val, v_ds, v_dt;
  };
  ChartTable chart[2];

  int n_eps() const { return eps_spec.count(); }
  int n_v() const { return v_spec.count(); }
  int n_real_unknowns() const { return 2 * (n_eps() + n_v()); }
  int nodes_per_chart() const { return static_cast<int>(chart[0].nodes.size()); }

  explicit SphereMapDiscretization(int n_trunc, int radii = -1, int angles = -1) : trunc(n_trunc) {
    eps_spec = {2, n_trunc};
    v_spec = {0, n_trunc};
    n_radii = radii > 0 ? radii : n_trunc + 2;
    n_angles = angles > 0 ? angles : 2 * n_trunc + 6;
    for (int c = 0; c < 2; ++c) {
      auto& tab = chart[c];
      const double dr = r_overlap / n_radii, dth = kTwoPi / n_angles;
      for (int q = 0; q < n_radii; ++q)
        for (int p = 0; p < n_angles; ++p) {
          const double r = (q + 0.5) * dr;
          tab.nodes.push_back(std::polar(r, (p + 0.5) * dth));
          tab.weights.push_back(r * dr * dth);
        }
      const int nn = static_cast<int>(tab.nodes.size());
      tab.eps_val.resize(nn, eps_spec.count());
      tab.eps_ds.resize(nn, eps_spec.count());
      tab.eps_dt.resize(nn, eps_spec.count());
      tab.v_val.resize(nn, v_spec.count());
      tab.v_ds.resize(nn, v_spec.count());
      tab.v_dt.resize(nn, v_spec.count());
      const Complex iu(0, 1);
      for (int i = 0; i < nn; ++i) {
        const SphereBasisEval ee =
            (c == 0) ? sphere_basis_chart1(eps_spec, tab.nodes[i]) : sphere_basis_chart2(eps_spec, tab.nodes[i]);
        const SphereBasisEval ve =
            (c == 0) ? sphere_basis_chart1(v_spec, tab.nodes[i]) : sphere_basis_chart2(v_spec, tab.nodes[i]);
        const double sign = (c == 0) ? 1.0 : -1.0;  // tangent transition D(1/z) = -w^2
        tab.eps_val.row(i) = sign * ee.value.transpose();
        tab.eps_ds.row(i) = sign * (ee.dz + ee.dzb).transpose();
        tab.eps_dt.row(i) = sign * (iu * (ee.dz - ee.dzb)).transpose();
        tab.v_val.row(i) = ve.value.transpose();
        tab.v_ds.row(i) = (ve.dz + ve.dzb).transpose();
        tab.v_dt.row(i) = (iu * (ve.dz - ve.dzb)).transpose();
      }
    }
  }

  // linear functionals (real rows on the realified unknowns) anchoring the
  // Moebius gauge: eps vanishes at the marked node, at 1 and at infinity
  // (the latter via the chart-2 representative at 0).
  Mat anchor_rows(Complex marked_node) const {
    const int cols = n_real_unknowns();
    std::vector<Vec> rows;
    auto eval_row = [&](int c, Complex z) {
      const SphereBasisEval ee = (c == 0) ? sphere_basis_chart1(eps_spec, z) : sphere_basis_chart2(eps_spec, z);
      Vec re = Vec::Zero(cols), im = Vec::Zero(cols);
      for (int j = 0; j < eps_spec.count(); ++j) {
        const Complex v = (c == 0 ? 1.0 : -1.0) * ee.value(j);
        re(2 * j) = v.real();
        re(2 * j + 1) = -v.imag();
        im(2 * j) = v.imag();
        im(2 * j + 1) = v.real();
      }
      rows.push_back(re);
      rows.push_back(im);
    };
    eval_row(0, marked_node);    // eps(marked) = 0
    eval_row(0, Complex(1, 0));  // eps(1) = 0
    eval_row(1, Complex(0, 0));  // eps-hat(0) = 0 (anchor at infinity)
    Mat c(rows.size(), cols);
    for (size_t i = 0; i < rows.size(); ++i) c.row(i) = rows[i].transpose();
    return c;
  }
};

struct DiscreteSphereMap {
  const SphereMapDiscretization* disc = nullptr;
  CVec eps_coeff;  // E_2 coefficients
  CVec v_coeff;    // E_0 coefficients (torus lift, complex = R^2)
  Eigen::Vector2d base_m = Eigen::Vector2d::Zero();

  explicit DiscreteSphereMap(const SphereMapDiscretization& d)
      : disc(&d), eps_coeff(CVec::Zero(d.n_eps())), v_coeff(CVec::Zero(d.n_v())) {}

  Vec pack() const {
    Vec x(disc->n_real_unknowns());
    for (int j = 0; j < eps_coeff.size(); ++j) {
      x(2 * j) = eps_coeff(j).real();
      x(2 * j + 1) = eps_coeff(j).imag();
    }
    const int off = 2 * static_cast<int>(eps_coeff.size());
    for (int j = 0; j < v_coeff.size(); ++j) {
      x(off + 2 * j) = v_coeff(j).real();
      x(off + 2 * j + 1) = v_coeff(j).imag();
    }
    return x;
  }
  void unpack(const Vec& x) {
    for (int j = 0; j < eps_coeff.size(); ++j) eps_coeff(j) = Complex(x(2 * j), x(2 * j + 1));
    const int off = 2 * static_cast<int>(eps_coeff.size());
    for (int j = 0; j < v_coeff.size(); ++j) v_coeff(j) = Complex(x(off + 2 * j), x(off + 2 * j + 1));
  }

  // pointwise data of the map at a chart coordinate (off the node tables)
  struct LocalData {
    Complex eps, eps_ds, eps_dt;  // tangent rep in the chart
    Complex v, v_ds, v_dt;
  };
  LocalData local_at(int c, Complex z) const {
    const SphereBasisEval ee =
        (c == 0) ? sphere_basis_chart1(disc->eps_spec, z) : sphere_basis_chart2(disc->eps_spec, z);
    const SphereBasisEval ve =
        (c == 0) ? sphere_basis_chart1(disc->v_spec, z) : sphere_basis_chart2(disc->v_spec, z);
    const double sign = (c == 0) ? 1.0 : -1.0;
    const Complex iu(0, 1);
    LocalData out;
    out.eps = sign * (ee.value.transpose() * eps_coeff)(0);
    out.eps_ds = sign * ((ee.dz + ee.dzb).transpose() * eps_coeff)(0);
    out.eps_dt = sign * ((iu * (ee.dz - ee.dzb)).transpose() * eps_coeff)(0);
    out.v = (ve.value.transpose() * v_coeff)(0);
    out.v_ds = ((ve.dz + ve.dzb).transpose() * v_coeff)(0);
    out.v_dt = ((iu * (ve.dz - ve.dzb)).transpose() * v_coeff)(0);
    return out;
  }

  // value of the map at a chart coordinate: (sphere chart coord, torus point)
  std::pair<Complex, Eigen::Vector2d> value_at(int c, Complex z) const {
    const LocalData ld = local_at(c, z);
    const Complex us = sphere_exp(z, ld.eps).value;
    return {us, base_m + Eigen::Vector2d(ld.v.real(), ld.v.imag())};
  }
};

// ---------------------------------------------------------------------------
// Pointwise residual of d_s u + J(u) d_t u at a chart point from the local
// data; shared by the nonlinear evaluation and the semi-analytic Jacobian.

inline Eigen::Vector4d sphere_map_node_residual(const TargetAlmostComplexField& target, int c, Complex z,
                                                const Eigen::Vector2d& base_m,
                                                const DiscreteSphereMap::LocalData& ld) {
  const SphereExpJet jet = sphere_exp(z, ld.eps);
  // d_s u_S = E_z + E_zb + E_v eps_s + E_vb conj(eps_s); likewise for d_t
  const Complex us_s = jet.d_z + jet.d_zb + jet.d_v * ld.eps_ds + jet.d_vb * std::conj(ld.eps_ds);
  const Complex us_t =
      Complex(0, 1) * (jet.d_z - jet.d_zb) + jet.d_v * ld.eps_dt + jet.d_vb * std::conj(ld.eps_dt);
  const Eigen::Vector2d m = base_m + Eigen::Vector2d(ld.v.real(), ld.v.imag());
  const Mat j = target.eval(c, jet.value, m);
  Eigen::Vector4d du_s, du_t;
  du_s << us_s.real(), us_s.imag(), ld.v_ds.real(), ld.v_ds.imag();
  du_t << us_t.real(), us_t.imag(), ld.v_dt.real(), ld.v_dt.imag();
  return du_s + j * du_t;
}

struct SphereMapResidual {
  std::vector<Eigen::Vector4d> per_node[2];
  double sup_norm = 0.0;
};

inline SphereMapResidual cr_residual(const DiscreteSphereMap& map, const TargetAlmostComplexField& target) {
  SphereMapResidual out;
  const auto& disc = *map.disc;
  for (int c = 0; c < 2; ++c) {
    const auto& tab = disc.chart[c];
    const int nn = static_cast<int>(tab.nodes.size());
    out.per_node[c].resize(nn);
    for (int i = 0; i < nn; ++i) {
      DiscreteSphereMap::LocalData ld;
      ld.eps = (tab.eps_val.row(i) * map.eps_coeff)(0);
      ld.eps_ds = (tab.eps_ds.row(i) * map.eps_coeff)(0);
      ld.eps_dt = (tab.eps_dt.row(i) * map.eps_coeff)(0);
      ld.v = (tab.v_val.row(i) * map.v_coeff)(0);
      ld.v_ds = (tab.v_ds.row(i) * map.v_coeff)(0);
      ld.v_dt = (tab.v_dt.row(i) * map.v_coeff)(0);
      out.per_node[c][i] = sphere_map_node_residual(target, c, tab.nodes[i], map.base_m, ld);
      out.sup_norm = std::max(out.sup_norm, out.per_node[c][i].lpNorm<Eigen::Infinity>());
    }
  }
  return out;
}

// chart-overlap compatibility: the two charts' values of the map compared on
// the annulus; exact for the global basis up to roundoff.
inline double chart_compatibility_residual(const DiscreteSphereMap& map) {
  double worst = 0.0;
  const auto& disc = *map.disc;
  for (const Complex& w : disc.chart[1].nodes) {
    const double r = std::abs(w);
    if (r < 1.0 / disc.r_overlap || r > 1.0) continue;
    const auto [us2, m2] = map.value_at(1, w);
    const auto [us1, m1] = map.value_at(0, 1.0 / w);
    if (std::abs(us1) < 3.0) {  // compare in chart 2 of the target
      worst = std::max(worst, std::abs(1.0 / us1 - us2));
      worst = std::max(worst, (m1 - m2).norm());
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Semi-analytic Jacobian: rows are weighted node residuals, columns the
// realified spectral coefficients.  Per node the residual depends on the 12
// real local inputs; that small Jacobian is computed by central differences
// of the closed-form node residual and composed with the exact basis tables.

namespace detail {

inline Eigen::Matrix<double, 4, 12> node_input_jacobian(const TargetAlmostComplexField& target, int c,
                                                        Complex z, const Eigen::Vector2d& base_m,
                                                        const DiscreteSphereMap::LocalData& ld,
                                                        double h = 3e-6) {
  Eigen::Matrix<double, 4, 12> out;
  auto perturb = [&](int slot, double delta) {
    DiscreteSphereMap::LocalData d = ld;
    Complex* fields[6] = {&d.eps, &d.eps_ds, &d.eps_dt, &d.v, &d.v_ds, &d.v_dt};
    Complex& f = *fields[slot / 2];
    f += (slot % 2 == 0) ? Complex(delta, 0) : Complex(0, delta);
    return sphere_map_node_residual(target, c, z, base_m, d);
  };
  for (int slot = 0; slot < 12; ++slot)
    out.col(slot) = (perturb(slot, h) - perturb(slot, -h)) / (2.0 * h);
  return out;
}

}  // namespace detail

struct AssembledLinearization {
  Mat matrix;          // weighted rows: sqrt(node weight) * residual derivative
  Vec residual;        // weighted residual at the expansion point
  double sup_residual = 0.0;
};

inline AssembledLinearization linearized_operator(const DiscreteSphereMap& map,
                                                  const TargetAlmostComplexField& target) {
  const auto& disc = *map.disc;
  const int n_unknowns = disc.n_real_unknowns();
  const int rows = 8 * disc.nodes_per_chart();
  AssembledLinearization out;
  out.matrix = Mat::Zero(rows, n_unknowns);
  out.residual = Vec::Zero(rows);
  const int ne = disc.n_eps();
  for (int c = 0; c < 2; ++c) {
    const auto& tab = disc.chart[c];
    const int nn = static_cast<int>(tab.nodes.size());
    for (int i = 0; i < nn; ++i) {
      DiscreteSphereMap::LocalData ld;
      ld.eps = (tab.eps_val.row(i) * map.eps_coeff)(0);
      ld.eps_ds = (tab.eps_ds.row(i) * map.eps_coeff)(0);
      ld.eps_dt = (tab.eps_dt.row(i) * map.eps_coeff)(0);
      ld.v = (tab.v_val.row(i) * map.v_coeff)(0);
      ld.v_ds = (tab.v_ds.row(i) * map.v_coeff)(0);
      ld.v_dt = (tab.v_dt.row(i) * map.v_coeff)(0);
      const Eigen::Vector4d res = sphere_map_node_residual(target, c, tab.nodes[i], map.base_m, ld);
      out.sup_residual = std::max(out.sup_residual, res.lpNorm<Eigen::Infinity>());
      const auto a = detail::node_input_jacobian(target, c, tab.nodes[i], map.base_m, ld);
      const double sw = std::sqrt(tab.weights[i]);
      const int r0 = 4 * (c * nn + i);
      out.residual.segment<4>(r0) = sw * res;
      // eps columns
      for (int j = 0; j < ne; ++j) {
        const Complex bv = tab.eps_val(i, j), bs = tab.eps_ds(i, j), bt = tab.eps_dt(i, j);
        Eigen::Matrix<double, 12, 1> in_re = Eigen::Matrix<double, 12, 1>::Zero();
        Eigen::Matrix<double, 12, 1> in_im = Eigen::Matrix<double, 12, 1>::Zero();
        in_re << bv.real(), bv.imag(), bs.real(), bs.imag(), bt.real(), bt.imag(), 0, 0, 0, 0, 0, 0;
        const Complex ibv = Complex(0, 1) * bv, ibs = Complex(0, 1) * bs, ibt = Complex(0, 1) * bt;
        in_im << ibv.real(), ibv.imag(), ibs.real(), ibs.imag(), ibt.real(), ibt.imag(), 0, 0, 0, 0, 0, 0;
        out.matrix.block<4, 1>(r0, 2 * j) = sw * (a * in_re);
        out.matrix.block<4, 1>(r0, 2 * j + 1) = sw * (a * in_im);
      }
      // v columns
      for (int j = 0; j < disc.n_v(); ++j) {
        const Complex bv = tab.v_val(i, j), bs = tab.v_ds(i, j), bt = tab.v_dt(i, j);
        Eigen::Matrix<double, 12, 1> in_re = Eigen::Matrix<double, 12, 1>::Zero();
        Eigen::Matrix<double, 12, 1> in_im = Eigen::Matrix<double, 12, 1>::Zero();
        in_re << 0, 0, 0, 0, 0, 0, bv.real(), bv.imag(), bs.real(), bs.imag(), bt.real(), bt.imag();
        const Complex ibv = Complex(0, 1) * bv, ibs = Complex(0, 1) * bs, ibt = Complex(0, 1) * bt;
        in_im << 0, 0, 0, 0, 0, 0, ibv.real(), ibv.imag(), ibs.real(), ibs.imag(), ibt.real(), ibt.imag();
        out.matrix.block<4, 1>(r0, 2 * (ne + j)) = sw * (a * in_re);
        out.matrix.block<4, 1>(r0, 2 * (ne + j) + 1) = sw * (a * in_im);
      }
    }
  }
  return out;
}

// finite-difference directional derivative of the weighted residual, the
// cross-validation oracle for the assembled matrix
inline Vec fd_residual_derivative(const DiscreteSphereMap& map, const TargetAlmostComplexField& target,
                                  const Vec& direction, double h = 1e-5) {
  DiscreteSphereMap plus = map, minus = map;
  plus.unpack((map.pack() + h * direction).eval());
  minus.unpack((map.pack() - h * direction).eval());
  auto weighted = [&](const DiscreteSphereMap& mm) {
    const SphereMapResidual r = cr_residual(mm, target);
    const auto& disc = *map.disc;
    Vec v(8 * disc.nodes_per_chart());
    for (int c = 0; c < 2; ++c)
      for (size_t i = 0; i < r.per_node[c].size(); ++i)
        v.segment<4>(4 * (c * disc.nodes_per_chart() + static_cast<int>(i))) =
            std::sqrt(disc.chart[c].weights[i]) * r.per_node[c][i];
    return v;
  };
  return (weighted(plus) - weighted(minus)) / (2.0 * h);
}

// ---------------------------------------------------------------------------
// Function-space preconditioner: QR of the weighted basis evaluation matrix,
// so singular values of the preconditioned operator measure the action per
// unit L^2 norm of the perturbation rather than per coefficient.

struct SpherePreconditioner {
  Mat r_inv;  // block upper-triangular inverse factor
  explicit SpherePreconditioner(const SphereMapDiscretization& disc) {
    const int nn = disc.nodes_per_chart();
    auto block = [&](bool eps) {
      CMat m(2 * nn, eps ? disc.n_eps() : disc.n_v());
      for (int c = 0; c < 2; ++c)
        for (int i = 0; i < nn; ++i)
          m.row(c * nn + i) =
              std::sqrt(disc.chart[c].weights[i]) * (eps ? disc.chart[c].eps_val.row(i) : disc.chart[c].v_val.row(i));
      Eigen::HouseholderQR<CMat> qr(m);
      CMat r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
      return r;
    };
    const CMat re = block(true), rv = block(false);
    const int ne = disc.n_eps(), nv = disc.n_v();
    Mat big = Mat::Zero(2 * (ne + nv), 2 * (ne + nv));
    big.topLeftCorner(2 * ne, 2 * ne) = realify_table(re);
    big.bottomRightCorner(2 * nv, 2 * nv) = realify_table(rv);
    r_inv = big.inverse();
  }
};

// Gauge-free linearization at a map, preconditioned; kernel dimension and
// spectral gap certify transversality.  Cokernel is not read off the SVD of
// the overdetermined collocation system.
inline RankResult transversality_certificate(const DiscreteSphereMap& map,
                                             const TargetAlmostComplexField& target,
                                             double rel_threshold = 1e-8) {
  const AssembledLinearization lin = linearized_operator(map, target);
  const SpherePreconditioner pre(*map.disc);
  AssembledOperator op;
  op.matrix = lin.matrix * pre.r_inv;
  op.coker_rule = CokernelRule::AdjointBundle;
  op.coker_override = 0;
  op.domain_desc = "sphere-map perturbations (eps, v)";
  op.codomain_desc = "weighted collocation residuals";
  return kernel_cokernel_dims(op, rel_threshold);
}

// restriction to the eps- or v-block, for the block-diagonal structure at u_m
inline RankResult transversality_certificate_block(const DiscreteSphereMap& map,
                                                   const TargetAlmostComplexField& target, bool eps_block,
                                                   double rel_threshold = 1e-8) {
  const AssembledLinearization lin = linearized_operator(map, target);
  const SpherePreconditioner pre(*map.disc);
  const Mat pm = lin.matrix * pre.r_inv;
  const int ne2 = 2 * map.disc->n_eps();
  AssembledOperator op;
  op.matrix = eps_block ? pm.leftCols(ne2) : pm.rightCols(pm.cols() - ne2);
  op.coker_rule = CokernelRule::AdjointBundle;
  return kernel_cokernel_dims(op, rel_threshold);
}

// ---------------------------------------------------------------------------
// Damped Gauss-Newton with exactly-eliminated linear constraints.

// The marked node doubles as the first gauge anchor; a through-point
// condition places it at the sphere coordinate of the target point and pins
// the torus component there, so the curve passes through p at the marked
// node while the product solution remains the exact starting point.
struct NewtonConstraints {
  Complex marked_node{0, 0};
  bool constrain_torus = false;
  Eigen::Vector2d target_m = Eigen::Vector2d::Zero();
};

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_history;
  double condition_estimate = 0.0;
  double gauge_residual = 0.0;
  bool converged = false;
};

inline NewtonReport newton_solve(DiscreteSphereMap& map, const TargetAlmostComplexField& target,
                                 const NewtonConstraints& constraints = {}, double tol = 1e-8,
                                 int max_iter = 50) {
  const auto& disc = *map.disc;
  // constraint rows C x = rhs
  Mat c_rows = disc.anchor_rows(constraints.marked_node);
  Vec rhs = Vec::Zero(c_rows.rows());
  if (constraints.constrain_torus) {
    // u_T(marked) = target_m  <=>  v(marked) = target_m - base_m (2 rows)
    const int cols = disc.n_real_unknowns();
    Mat extra = Mat::Zero(2, cols);
    const SphereBasisEval ve = sphere_basis_chart1(disc.v_spec, constraints.marked_node);
    const int off = 2 * disc.n_eps();
    for (int j = 0; j < disc.n_v(); ++j) {
      extra(0, off + 2 * j) = ve.value(j).real();
      extra(0, off + 2 * j + 1) = -ve.value(j).imag();
      extra(1, off + 2 * j) = ve.value(j).imag();
      extra(1, off + 2 * j + 1) = ve.value(j).real();
    }
    Vec extra_rhs(2);
    extra_rhs << constraints.target_m(0) - map.base_m(0), constraints.target_m(1) - map.base_m(1);
    Mat joined(c_rows.rows() + 2, c_rows.cols());
    joined << c_rows, extra;
    Vec joined_rhs(rhs.size() + 2);
    joined_rhs << rhs, extra_rhs;
    c_rows = joined;
    rhs = joined_rhs;
  }
  const Mat z = nullspace_basis(c_rows);
  const Vec x_particular = c_rows.colPivHouseholderQr().solve(rhs);

  // start from the projection of the current map onto the constraint set
  Vec x = map.pack();
  Vec y = z.transpose() * (x - x_particular);
  x = x_particular + z * y;
  map.unpack(x);

  NewtonReport report;
  SphereMapResidual res = cr_residual(map, target);
  report.residual_history.push_back(res.sup_norm);
  for (int it = 0; it < max_iter; ++it) {
    if (res.sup_norm < tol) {
      report.converged = true;
      break;
    }
    const AssembledLinearization lin = linearized_operator(map, target);
    const Mat jz = lin.matrix * z;
    Eigen::ColPivHouseholderQR<Mat> qr(jz);
    const Vec dy = qr.solve(-lin.residual);
    {
      const Vec diag = qr.matrixR().diagonal().cwiseAbs();
      report.condition_estimate = diag.maxCoeff() / std::max(diag.minCoeff(), 1e-300);
    }
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 20; ++halving) {
      DiscreteSphereMap trial = map;
      trial.unpack((x_particular + z * (y + step * dy)).eval());
      const SphereMapResidual tr = cr_residual(trial, target);
      if (tr.sup_norm < res.sup_norm) {
        y += step * dy;
        map = trial;
        res = tr;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    report.iterations = it + 1;
    report.residual_history.push_back(res.sup_norm);
    if (!accepted) break;
  }
  if (res.sup_norm < tol) report.converged = true;
  report.gauge_residual = (c_rows * map.pack() - rhs).lpNorm<Eigen::Infinity>();
  return report;
}

}  // namespace holocurve
