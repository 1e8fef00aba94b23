#pragma once

#include "xcforge/core/exact_rank.hpp"
#include "xcforge/core/io.hpp"
#include "xcforge/core/simplex.hpp"
#include "xcforge/core/slack.hpp"
#include "xcforge/core/types.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace xcforge {

using BigFloat = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256>>;

// f(k) = prod_{q in Q} (k - q)^2 for k = 0..r, with m = ceil(sqrt r) and Q the multiples of m in 0..r
struct SeparationProfile {
  int r = 0;
  int m = 0;
  std::vector<int> Q;
  std::vector<BigInt> f;
  bool degenerate = false;  // r < 4

  // entry of the 2^r x 2^r matrix at rows a, columns b (bit vectors)
  const BigInt& entry(std::uint64_t a, std::uint64_t b) const { return f[static_cast<std::size_t>(std::popcount(a & b))]; }
};

inline int ceil_sqrt(int r) {
  int m = static_cast<int>(std::sqrt(static_cast<double>(r)));
  while (m * m < r) ++m;
  while (m > 0 && (m - 1) * (m - 1) >= r) --m;
  return m;
}

inline SeparationProfile entry_profile(int r) {
  if (r < 1) throw Error(ErrorCode::BadR, "r must be positive");
  SeparationProfile p;
  p.r = r;
  p.m = ceil_sqrt(r);
  for (int q = 0; q <= r; q += p.m) p.Q.push_back(q);
  for (int k = 0; k <= r; ++k) {
    BigInt v = 1;
    for (int q : p.Q) v *= BigInt((k - q) * (k - q));
    p.f.push_back(v);
  }
  p.degenerate = r < 4;
  return p;
}

inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

inline BigInt pow_big(int base, int e) {
  BigInt x = 1;
  for (int i = 0; i < e; ++i) x *= base;
  return x;
}

// pairs (a, b) with f(a.b) != 0; a.b = k for C(r,k) 3^(r-k) pairs
inline BigInt support_count(int r) {
  const auto p = entry_profile(r);
  BigInt zeros = 0;
  for (int k = 0; k <= r; ++k)
    if (k % p.m == 0) zeros += binomial(r, k) * pow_big(3, r - k);
  return pow_big(4, r) - zeros;
}

// all 4^r pairs, r <= 12
inline BigInt support_count_enumerate(int r) {
  if (r > 12) throw Error(ErrorCode::TooLarge, "enumeration limited to r <= 12");
  const auto p = entry_profile(r);
  const std::uint64_t n = std::uint64_t{1} << r;
  std::uint64_t c = 0;
  for (std::uint64_t a = 0; a < n; ++a)
    for (std::uint64_t b = 0; b < n; ++b) c += p.entry(a, b) != 0;
  return BigInt(c);
}

// full matrix, r <= 10
inline BigMatrix separation_matrix(int r) {
  if (r > 10) throw Error(ErrorCode::TooLarge, "matrix limited to r <= 10");
  const auto p = entry_profile(r);
  const std::uint64_t n = std::uint64_t{1} << r;
  BigMatrix M(n, std::vector<BigInt>(n));
  for (std::uint64_t a = 0; a < n; ++a)
    for (std::uint64_t b = 0; b < n; ++b) M[a][b] = p.entry(a, b);
  return M;
}

// coefficients of f as a polynomial in k, lowest degree first
inline std::vector<BigInt> profile_polynomial(const SeparationProfile& p) {
  std::vector<BigInt> c = {1};
  for (int q : p.Q)
    for (int rep = 0; rep < 2; ++rep) {
      std::vector<BigInt> d(c.size() + 1, 0);
      for (std::size_t i = 0; i < c.size(); ++i) {
        d[i + 1] += c[i];
        d[i] -= c[i] * q;
      }
      c = std::move(d);
    }
  return c;
}

// gamma_l with f(a.b) = sum_l gamma_l e_l(a*b) on 0/1 vectors, e_l the elementary symmetric
// polynomial; k^j = sum_l S(j,l) l! e_l with S the Stirling numbers of the second kind
inline std::vector<BigInt> multilinear_coefficients(const SeparationProfile& p) {
  const auto c = profile_polynomial(p);
  const int D = static_cast<int>(c.size()) - 1;
  std::vector<std::vector<BigInt>> S(D + 1, std::vector<BigInt>(D + 1, 0));
  S[0][0] = 1;
  for (int j = 1; j <= D; ++j)
    for (int l = 1; l <= j; ++l) S[j][l] = BigInt(l) * S[j - 1][l] + S[j - 1][l - 1];
  std::vector<BigInt> gamma(D + 1, 0);
  BigInt fact = 1;
  for (int l = 0; l <= D; ++l) {
    if (l > 0) fact *= l;
    BigInt g = 0;
    for (int j = l; j <= D; ++j) g += c[j] * S[j][l];
    gamma[l] = g * fact;
  }
  return gamma;
}

struct RankResult {
  BigInt rank_exact;
  BigInt rank_upper;                       // (r+1)^(2|Q|)
  std::optional<std::size_t> elimination;  // route (a), small r only
  BigInt multilinear;                      // route (b)
};

inline BigInt rank_multilinear(int r) {
  const auto p = entry_profile(r);
  const auto gamma = multilinear_coefficients(p);
  BigInt rank = 0;
  for (int l = 0; l <= std::min<int>(r, static_cast<int>(gamma.size()) - 1); ++l)
    if (gamma[l] != 0) rank += binomial(r, l);
  return rank;
}

inline std::size_t rank_elimination(int r) {
  if (r > 8) throw Error(ErrorCode::TooLarge, "elimination route limited to r <= 8");
  return exact_rank(separation_matrix(r));
}

inline RankResult rank_of_M(int r, int max_elimination_r = 8) {
  const auto p = entry_profile(r);
  RankResult res;
  res.multilinear = rank_multilinear(r);
  res.rank_exact = res.multilinear;
  res.rank_upper = pow_big(r + 1, 2 * static_cast<int>(p.Q.size()));
  if (r <= std::min(8, max_elimination_r)) {
    res.elimination = rank_elimination(r);
    if (BigInt(*res.elimination) != res.multilinear)
      throw Error(ErrorCode::RouteMismatch, "elimination rank " + std::to_string(*res.elimination) + " vs multilinear " +
                                                res.multilinear.str());
  }
  return res;
}

inline BigFloat binary_entropy(const BigFloat& x) {
  using boost::multiprecision::log2;
  if (x <= 0 || x >= 1) return BigFloat(0);
  return -x * log2(x) - (1 - x) * log2(1 - x);
}

struct BoundChain {
  int r = 0;
  int s = 0;
  BigInt support_count;
  BigFloat rectangle_log2;  // r + s + H(s/r) r
  double rectangle_mantissa = 0.0;  // rectangle bound = mantissa * 2^exponent, mantissa in [1, 2)
  long rectangle_exponent = 0;
  BigInt nnr_lower;
  BigInt rank_exact;
  BigInt rank_upper;
  double ratio_log2 = 0.0;
  bool degenerate = false;
};

inline BoundChain nnr_lower_bound(int r, int max_elimination_r = 8) {
  if (r < 4) throw Error(ErrorCode::BadR, "the rectangle bound needs r >= 4");
  using boost::multiprecision::floor;
  using boost::multiprecision::log2;
  using boost::multiprecision::pow;
  const auto p = entry_profile(r);
  BoundChain b;
  b.r = r;
  b.s = p.m - 1;
  b.degenerate = p.degenerate;
  b.support_count = support_count(r);
  b.rectangle_log2 = BigFloat(r + b.s) + binary_entropy(BigFloat(b.s) / r) * r;
  const BigFloat e = floor(b.rectangle_log2);
  b.rectangle_exponent = e.convert_to<long>();
  b.rectangle_mantissa = pow(BigFloat(2), b.rectangle_log2 - e).convert_to<double>();
  // bound nudged up by one part in 2^200 so the floor cannot round in our favour
  const BigFloat bound = pow(BigFloat(2), b.rectangle_log2) * (1 + pow(BigFloat(2), -200));
  const BigFloat q = floor(BigFloat(b.support_count) / bound);
  b.nnr_lower = std::max(BigInt(1), q.convert_to<BigInt>());
  const auto rk = rank_of_M(r, max_elimination_r);
  b.rank_exact = rk.rank_exact;
  b.rank_upper = rk.rank_upper;
  b.ratio_log2 = (log2(BigFloat(b.nnr_lower)) - log2(BigFloat(b.rank_exact))).convert_to<double>();
  return b;
}

struct RatioReport {
  std::vector<BoundChain> rows;
  bool increasing = true;  // ratio_log2 / r strictly increasing along rows
};

inline RatioReport ratio_report(const std::vector<int>& rs, int max_elimination_r = 8) {
  RatioReport rep;
  for (int r : rs) rep.rows.push_back(nnr_lower_bound(r, max_elimination_r));
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (!(rep.rows[i].ratio_log2 / rep.rows[i].r > rep.rows[i - 1].ratio_log2 / rep.rows[i - 1].r)) rep.increasing = false;
  return rep;
}

inline json bound_chain_to_json(const BoundChain& b) {
  return json{{"r", b.r},
              {"n", pow_big(2, b.r).str()},
              {"s", b.s},
              {"rank_exact", b.rank_exact.str()},
              {"rank_upper", b.rank_upper.str()},
              {"support", b.support_count.str()},
              {"rectangle_log2", b.rectangle_log2.convert_to<double>()},
              {"rectangle_mantissa", b.rectangle_mantissa},
              {"rectangle_exponent", b.rectangle_exponent},
              {"nnr_lower", b.nnr_lower.str()},
              {"ratio_log2", b.ratio_log2},
              {"degenerate", b.degenerate}};
}

// ---- matrix to polytope ----

struct MatrixPolytope {
  Polytope P;         // chart coordinates y with x = origin + basis y
  SlackMatrix slack;  // rows = vertex coordinate vectors x, columns = the n constraints x_i >= 0
  Matrix normalized;  // input rows scaled to sum 1
  Point origin;
  Matrix basis;        // n x dim, orthonormal columns
  Matrix weights;      // rows x vertices, convex weights reproducing each normalized row
  double residual = 0.0;  // max over rows of |weights V - row|
};

inline MatrixPolytope matrix_to_polytope(const Matrix& M, int max_n = 10) {
  const Eigen::Index rows = M.rows(), n = M.cols();
  if (n > max_n) throw Error(ErrorCode::TooLarge, std::to_string(n) + " columns exceed the limit " + std::to_string(max_n));
  if (rows == 0 || n == 0) throw Error(ErrorCode::ShapeMismatch, "empty matrix");
  if (M.minCoeff() < 0.0) throw Error(ErrorCode::NegativeSlack, "matrix must be nonnegative");
  MatrixPolytope out;
  out.normalized = M;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double s = M.row(i).sum();
    if (!(s > 0.0)) throw Error(ErrorCode::ZeroRow, "row " + std::to_string(i) + " is zero");
    out.normalized.row(i) /= s;
  }
  const Matrix& X = out.normalized;
  out.origin = X.row(0).transpose();
  Matrix D(n, rows - 1);
  for (Eigen::Index i = 1; i < rows; ++i) D.col(i - 1) = (X.row(i) - X.row(0)).transpose();
  // rows live in the simplex, so an absolute cut on the singular values
  int k = 0;
  out.basis = Matrix::Zero(n, 0);
  if (rows > 1) {
    Eigen::JacobiSVD<Matrix> svd(D, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    while (k < sv.size() && sv(k) > 1e-10) ++k;
    out.basis = svd.matrixU().leftCols(k);
  }
  const Matrix& B = out.basis;
  // vertices: k active constraints x_j = 0 with a nonsingular system
  std::vector<Eigen::VectorXd> verts;  // in x coordinates
  auto add = [&](Eigen::VectorXd x) {
    if (x.minCoeff() < -1e-10) return;
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(x(j)) <= 1e-12) x(j) = 0.0;
    for (const auto& v : verts)
      if ((v - x).cwiseAbs().maxCoeff() <= 1e-9) return;
    verts.push_back(x);
  };
  if (k == 0) {
    add(out.origin);
  } else {
    std::vector<int> J(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) J[i] = i;
    while (true) {
      Matrix A(k, k);
      Eigen::VectorXd rhs(k);
      for (int i = 0; i < k; ++i) {
        A.row(i) = B.row(J[i]);
        rhs(i) = -out.origin(J[i]);
      }
      Eigen::FullPivLU<Matrix> lu(A);
      if (lu.rank() == k) add(out.origin + B * lu.solve(rhs));
      int i = k - 1;
      while (i >= 0 && J[i] == static_cast<int>(n) - k + i) --i;
      if (i < 0) break;
      ++J[i];
      for (int t = i + 1; t < k; ++t) J[t] = J[t - 1] + 1;
    }
  }
  std::sort(verts.begin(), verts.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size(), std::greater<>());
  });
  const auto nv = static_cast<Eigen::Index>(verts.size());
  out.slack.entries.resize(nv, n);
  for (Eigen::Index v = 0; v < nv; ++v) out.slack.entries.row(v) = verts[v].transpose();
  for (Eigen::Index v = 0; v < nv; ++v) out.slack.row_index.push_back(static_cast<int>(v));
  for (Eigen::Index j = 0; j < n; ++j) out.slack.col_index.push_back(static_cast<int>(j));

  out.P.dim = k;
  for (const auto& x : verts) out.P.vertices.push_back(B.transpose() * (x - out.origin));
  // facets: constraints whose tight vertices span a (k-1)-flat, duplicates dropped
  std::vector<std::vector<int>> seen;
  for (Eigen::Index j = 0; j < n && k > 0; ++j) {
    std::vector<int> tight;
    for (Eigen::Index v = 0; v < nv; ++v)
      if (verts[v](j) <= 1e-9) tight.push_back(static_cast<int>(v));
    if (tight.empty() || static_cast<Eigen::Index>(tight.size()) == nv) continue;
    Matrix H(static_cast<Eigen::Index>(tight.size()), k + 1);
    for (std::size_t t = 0; t < tight.size(); ++t) {
      H(static_cast<Eigen::Index>(t), 0) = 1.0;
      H.row(static_cast<Eigen::Index>(t)).tail(k) = out.P.vertices[tight[t]].transpose();
    }
    if (numerical_rank(H, 1e-9) < k) continue;
    if (std::find(seen.begin(), seen.end(), tight) != seen.end()) continue;
    seen.push_back(tight);
    const Point nrm = -B.row(j).transpose();
    out.P.facets.push_back(Facet{Hyperplane{nrm, out.origin(j)}, tight});
  }

  // each normalized row as a convex combination of the vertices
  out.weights = Matrix::Zero(rows, nv);
  Phase1Simplex lp(1e-11);
  const int lm = static_cast<int>(n) + 1, ln = static_cast<int>(nv);
  std::vector<double> A(static_cast<std::size_t>(lm) * ln), b(lm), lam(ln);
  for (int j = 0; j < static_cast<int>(n); ++j)
    for (int v = 0; v < ln; ++v) A[static_cast<std::size_t>(j) * ln + v] = verts[v](j);
  for (int v = 0; v < ln; ++v) A[static_cast<std::size_t>(n) * ln + v] = 1.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (int j = 0; j < static_cast<int>(n); ++j) b[j] = X(i, j);
    b[n] = 1.0;
    if (!lp.solve(A.data(), b.data(), lm, ln, lam.data()))
      throw Error(ErrorCode::PreconditionViolated, "row " + std::to_string(i) + " is not a convex combination of the vertices");
    for (int v = 0; v < ln; ++v) out.weights(i, v) = lam[v];
  }
  out.residual = (out.weights * out.slack.entries - X).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace xcforge
