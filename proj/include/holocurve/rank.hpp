#pragma once

// Numerical rank of assembled real-linear operators via SVD with a
// mandatory spectral-gap certificate.  Kernel dimensions are headline
// claims; they are certified, never guessed.

#include <limits>

#include "holocurve/core.hpp"

namespace holocurve {

enum class CokernelRule {
  FromSvd,        // square Galerkin systems: coker = corank of the matrix
  AdjointBundle,  // collocation systems: coker from the dual bundle rule
};

struct AssembledOperator {
  Mat matrix;
  std::string domain_desc;
  std::string codomain_desc;
  std::string zeroth_order_desc = "A = 0";
  bool complex_linear = false;
  CokernelRule coker_rule = CokernelRule::FromSvd;
  int coker_override = 0;  // used with AdjointBundle
  mutable std::vector<double> svd_cache;
  const std::vector<double>& singular_values() const {
    if (svd_cache.empty() && matrix.size() > 0) {
      Eigen::BDCSVD<Mat> svd(matrix);
      svd_cache.assign(svd.singularValues().data(), svd.singularValues().data() + svd.singularValues().size());
    }
    return svd_cache;
  }
};

struct RankResult {
  int dim_ker = 0;
  int dim_coker = 0;
  int index = 0;
  double gap = std::numeric_limits<double>::infinity();
  bool reliable = true;
};

inline RankResult kernel_cokernel_dims(const AssembledOperator& op, double rel_threshold = 1e-8,
                                       double gap_requirement = 1e3) {
  const auto& sv = op.singular_values();
  RankResult out;
  if (sv.empty()) return out;
  const double smax = sv.front();
  if (smax == 0.0) {  // zero operator
    out.dim_ker = static_cast<int>(op.matrix.cols());
    out.dim_coker = static_cast<int>(op.matrix.rows());
    out.index = out.dim_ker - out.dim_coker;
    return out;
  }
  const double cut = rel_threshold * smax;
  int rank = 0;
  double smallest_keep = smax, largest_drop = 0.0;
  for (double s : sv) {
    if (s >= cut) {
      ++rank;
      smallest_keep = s;
    } else {
      largest_drop = std::max(largest_drop, s);
    }
  }
  out.dim_ker = static_cast<int>(op.matrix.cols()) - rank;
  out.dim_coker = (op.coker_rule == CokernelRule::FromSvd)
                      ? static_cast<int>(op.matrix.rows()) - rank
                      : op.coker_override;
  out.index = out.dim_ker - out.dim_coker;
  out.gap = (largest_drop > 0.0) ? smallest_keep / largest_drop : smallest_keep / cut;
  out.reliable = out.gap >= gap_requirement;
  return out;
}

// Orthonormal basis of the null space of a constraint matrix C (rows are
// real-linear constraints); used to impose gauge/anchor conditions exactly.
inline Mat nullspace_basis(const Mat& c, double tol = 1e-12) {
  if (c.rows() == 0) return Mat::Identity(c.cols(), c.cols());
  Eigen::JacobiSVD<Mat> svd(c, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++rank;
  return svd.matrixV().rightCols(c.cols() - rank);
}

}  // namespace holocurve
