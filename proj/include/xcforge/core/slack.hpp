#pragma once

#include "xcforge/core/types.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace xcforge {

struct SlackMatrix {
  Matrix entries;
  std::vector<int> row_index;
  std::vector<int> col_index;
};

// b_f - a_f.v with the tol_geom clamp
inline double clamped_slack(const Hyperplane& h, const Point& v) {
  const double s = h.slack(v);
  if (s < -tol_geom)
    throw Error(ErrorCode::NegativeSlack, "vertex violates facet by " + std::to_string(-s));
  return s <= tol_geom ? 0.0 : s;
}

inline SlackMatrix slack_block(const Polytope& P, const std::vector<int>& rows,
                               const std::vector<int>& cols) {
  SlackMatrix S;
  S.row_index = rows;
  S.col_index = cols;
  S.entries.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows.size(); ++i)
      S.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          clamped_slack(P.facets[cols[j]].plane, P.vertices[rows[i]]);
  return S;
}

inline SlackMatrix slack_matrix(const Polytope& P) {
  std::vector<int> rows(P.num_vertices()), cols(P.num_facets());
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  return slack_block(P, rows, cols);
}

inline int numerical_rank(const Matrix& M, double rel_tol = 1e-9) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

}  // namespace xcforge
