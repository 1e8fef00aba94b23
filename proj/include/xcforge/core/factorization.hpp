#pragma once

#include "xcforge/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace xcforge {

struct NonnegFactorization {
  Matrix T;
  Matrix U;
  std::vector<std::string> provenance;  // one tag per factor column

  Eigen::Index r() const { return T.cols(); }
};

struct FactorReport {
  double max_abs_err = 0.0;
  double rel_err = 0.0;  // max_abs_err / (1 + max|M|)
  long long r = 0;
  bool nonnegative = true;
  bool pass = false;
};

inline FactorReport verify_factorization(const Matrix& M, const NonnegFactorization& F, double tol) {
  if (F.T.cols() != F.U.rows() || F.T.rows() != M.rows() || F.U.cols() != M.cols())
    throw Error(ErrorCode::ShapeMismatch, "factor shapes do not match the matrix");
  FactorReport rep;
  rep.r = F.T.cols();
  rep.nonnegative = (F.T.size() == 0 || F.T.minCoeff() >= 0.0) && (F.U.size() == 0 || F.U.minCoeff() >= 0.0);
  const double mmax = M.size() ? M.cwiseAbs().maxCoeff() : 0.0;
  if (M.size()) {
    Matrix R = M;
    if (rep.r > 0) R.noalias() -= F.T * F.U;
    rep.max_abs_err = R.cwiseAbs().maxCoeff();
  }
  rep.rel_err = rep.max_abs_err / (1.0 + mmax);
  rep.pass = rep.nonnegative && rep.max_abs_err <= tol * (1.0 + mmax);
  return rep;
}

// A factorization stored as a sum of blocks, each living on a row subset and a column subset.
// Used where the dense T would not fit in memory.
struct FactorGroup {
  std::vector<int> rows;
  std::vector<int> cols;
  Matrix T;  // rows.size() x r_g
  Matrix U;  // r_g x cols.size()
  std::string tag;
};

struct BlockFactorization {
  Eigen::Index num_rows = 0;
  Eigen::Index num_cols = 0;
  std::vector<FactorGroup> groups;

  long long r() const {
    long long s = 0;
    for (const auto& g : groups) s += g.T.cols();
    return s;
  }

  NonnegFactorization to_dense() const {
    NonnegFactorization F;
    F.T = Matrix::Zero(num_rows, r());
    F.U = Matrix::Zero(r(), num_cols);
    Eigen::Index off = 0;
    for (const auto& g : groups) {
      for (Eigen::Index k = 0; k < g.T.cols(); ++k) {
        for (std::size_t i = 0; i < g.rows.size(); ++i) F.T(g.rows[i], off + k) = g.T(static_cast<Eigen::Index>(i), k);
        for (std::size_t j = 0; j < g.cols.size(); ++j) F.U(off + k, g.cols[j]) = g.U(k, static_cast<Eigen::Index>(j));
        F.provenance.push_back(g.tag);
      }
      off += g.T.cols();
    }
    return F;
  }
};

// Drops factor columns that contribute nothing and clamps round-off negatives.
inline void prune_and_clamp(Matrix& T, Matrix& U) {
  T = T.cwiseMax(0.0);
  U = U.cwiseMax(0.0);
  std::vector<Eigen::Index> keep;
  if (T.rows() > 0 && U.cols() > 0)
    for (Eigen::Index k = 0; k < T.cols(); ++k)
      if (T.col(k).maxCoeff() > 0.0 && U.row(k).maxCoeff() > 0.0) keep.push_back(k);
  if (keep.size() == static_cast<std::size_t>(T.cols())) return;
  Matrix T2(T.rows(), static_cast<Eigen::Index>(keep.size()));
  Matrix U2(static_cast<Eigen::Index>(keep.size()), U.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    T2.col(static_cast<Eigen::Index>(i)) = T.col(keep[i]);
    U2.row(static_cast<Eigen::Index>(i)) = U.row(keep[i]);
  }
  T = std::move(T2);
  U = std::move(U2);
}

}  // namespace xcforge
