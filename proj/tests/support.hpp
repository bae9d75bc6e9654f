#pragma once

// Seeded generators and small helpers shared by the test binaries.

#include <cmath>
#include <cstdint>
#include <random>

#include "bwt/linalg.hpp"

namespace bwt::test {

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Matrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) x(i, j) = normal(rng);
  return x;
}

inline Matrix random_orthogonal(Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(n, n, rng));
  Matrix q = qr.householderQ();
  return q;
}

// Q diag(d) Q^T with d log-uniform in [0.1, 10] on the first `rank` entries.
inline Matrix random_psd(Index n, Index rank, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(std::log(0.1), std::log(10.0));
  Vector d = Vector::Zero(n);
  for (Index i = 0; i < rank; ++i) d(i) = std::exp(u(rng));
  const Matrix q = random_orthogonal(n, rng);
  return symmetrize(q * d.asDiagonal() * q.transpose());
}

inline Index uniform_int(Index lo, Index hi, std::mt19937_64& rng) {
  std::uniform_int_distribution<Index> d(lo, hi);
  return d(rng);
}

// A PSD pair with rank(A) >= rank(B); roughly a third of the pairs have
// range(B) inside range(A) so that B/A = 0.
struct Pair {
  Matrix a, b;
};

inline Pair random_reachable_pair(std::mt19937_64& rng, Index max_n = 6) {
  const Index n = uniform_int(2, max_n, rng);
  const Index ra = uniform_int(1, n, rng);
  const Index rb = uniform_int(0, ra, rng);
  Pair p;
  p.a = random_psd(n, ra, rng);
  if (uniform_int(0, 2, rng) == 0 && rb > 0) {
    const CovMatrix ac(p.a);
    const Matrix q1 = ac.spectrum().range_basis();
    const Matrix f = q1 * gaussian(ra, rb, rng);
    p.b = symmetrize(f * f.transpose());
  } else {
    p.b = random_psd(n, rb, rng);
  }
  return p;
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace bwt::test
