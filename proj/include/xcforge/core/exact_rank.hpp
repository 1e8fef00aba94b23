#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <utility>
#include <vector>

namespace xcforge {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;
using BigMatrix = std::vector<std::vector<BigInt>>;

// Fraction-free (Bareiss) elimination; every intermediate division is exact.
inline std::size_t exact_rank(BigMatrix A) {
  const std::size_t m = A.size();
  if (m == 0) return 0;
  const std::size_t n = A[0].size();
  BigInt prev = 1;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < m; ++col) {
    std::size_t piv = rank;
    while (piv < m && A[piv][col] == 0) ++piv;
    if (piv == m) continue;
    std::swap(A[piv], A[rank]);
    for (std::size_t i = rank + 1; i < m; ++i) {
      for (std::size_t j = col + 1; j < n; ++j) {
        A[i][j] = A[rank][col] * A[i][j] - A[i][col] * A[rank][j];
        A[i][j] /= prev;
      }
      A[i][col] = 0;
    }
    prev = A[rank][col];
    ++rank;
  }
  return rank;
}

inline std::size_t exact_rank(const std::vector<std::vector<BigRational>>& R) {
  BigMatrix A;
  A.reserve(R.size());
  for (const auto& row : R) {
    BigInt l = 1;
    for (const auto& x : row) l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(x));
    std::vector<BigInt> out;
    out.reserve(row.size());
    for (const auto& x : row) out.push_back(boost::multiprecision::numerator(x) * (l / boost::multiprecision::denominator(x)));
    A.push_back(std::move(out));
  }
  return exact_rank(std::move(A));
}

}  // namespace xcforge
