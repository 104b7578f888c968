#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace fkq {

/// Upper bound on every spatial dimension, lattice rank and embedding
/// dimension handled by the library. Small dense objects live on the stack.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using IVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

/// A configuration u : domain -> R^d, stored slot-by-slot in the order of
/// the IndexDomain it belongs to.
using Configuration = std::vector<Vec>;

inline Vec to_vec(const IVec& i) { return i.cast<double>(); }

/// Lexicographic order on coordinates; used for every deterministic tie-break.
inline bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return true;
    if (b[k] < a[k]) return false;
  }
  return false;
}

inline bool lex_less(const IVec& a, const IVec& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return true;
    if (b[k] < a[k]) return false;
  }
  return false;
}

/// Operator 2-norm of a small matrix.
inline double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

inline double sup_norm(const Configuration& a, const Configuration& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, (a[i] - b[i]).norm());
  return worst;
}

}  // namespace fkq
