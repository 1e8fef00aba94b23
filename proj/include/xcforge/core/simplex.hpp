#pragma once

#include <cmath>
#include <vector>

namespace xcforge {

// Phase-one simplex for {x >= 0 : A x = b} with Bland's rule. Dense tableau,
// buffers are reused between calls so small repeated solves stay cheap.
class Phase1Simplex {
 public:
  explicit Phase1Simplex(double tol = 1e-10) : tol_(tol) {}

  // A is row-major m x n. On success x (size n) holds a basic feasible point.
  bool solve(const double* A, const double* b, int m, int n, double* x) {
    const int w = n + m + 1;
    tab_.assign(static_cast<std::size_t>(m) * w, 0.0);
    obj_.assign(w, 0.0);
    basis_.resize(m);
    for (int i = 0; i < m; ++i) {
      const double sg = b[i] < 0.0 ? -1.0 : 1.0;
      double* row = &tab_[static_cast<std::size_t>(i) * w];
      for (int j = 0; j < n; ++j) row[j] = sg * A[static_cast<std::size_t>(i) * n + j];
      row[n + i] = 1.0;
      row[w - 1] = sg * b[i];
      basis_[i] = n + i;
      for (int j = 0; j < n; ++j) obj_[j] += row[j];
      obj_[w - 1] += row[w - 1];
    }
    const int max_iter = 50 * (m + n) + 100;
    for (int it = 0; it < max_iter; ++it) {
      int e = -1;
      for (int j = 0; j < n + m; ++j)
        if (obj_[j] > tol_) {
          e = j;
          break;
        }
      if (e < 0) break;
      int l = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i) {
        const double a = tab_[static_cast<std::size_t>(i) * w + e];
        if (a <= tol_) continue;
        const double ratio = tab_[static_cast<std::size_t>(i) * w + w - 1] / a;
        if (l < 0 || ratio < best - tol_ || (std::abs(ratio - best) <= tol_ && basis_[i] < basis_[l])) {
          l = i;
          best = ratio;
        }
      }
      if (l < 0) break;
      pivot(l, e, m, w);
    }
    for (int j = 0; j < n; ++j) x[j] = 0.0;
    double art = 0.0;
    for (int i = 0; i < m; ++i) {
      const double v = tab_[static_cast<std::size_t>(i) * w + w - 1];
      if (basis_[i] < n) x[basis_[i]] = std::max(0.0, v);
      else art += std::abs(v);
    }
    double scale = 1.0;
    for (int i = 0; i < m; ++i) scale += std::abs(b[i]);
    return art <= tol_ * scale;
  }

 private:
  void pivot(int l, int e, int m, int w) {
    double* pr = &tab_[static_cast<std::size_t>(l) * w];
    const double p = pr[e];
    for (int j = 0; j < w; ++j) pr[j] /= p;
    pr[e] = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i == l) continue;
      double* row = &tab_[static_cast<std::size_t>(i) * w];
      const double f = row[e];
      if (f == 0.0) continue;
      for (int j = 0; j < w; ++j) row[j] -= f * pr[j];
      row[e] = 0.0;
    }
    const double f = obj_[e];
    for (int j = 0; j < w; ++j) obj_[j] -= f * pr[j];
    obj_[e] = 0.0;
    basis_[l] = e;
  }

  double tol_;
  std::vector<double> tab_;
  std::vector<double> obj_;
  std::vector<int> basis_;
};

}  // namespace xcforge
