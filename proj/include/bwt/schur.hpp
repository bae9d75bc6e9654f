#pragma once

#include <utility>

#include "bwt/linalg.hpp"

namespace bwt {

// Tolerance for quantities built from two factorizations (Schur complements,
// transport residuals). A Schur complement counts as zero when its spectral
// norm is at most tol_map * (1 + ||B||).
inline constexpr double kDefaultTolMap = 1e-8;

// Coordinates of a second matrix B in the orthogonal split range(A) + null(A).
struct BlockView {
  Matrix q1;  // n x r, eigenvectors of A for the nonzero eigenvalues (descending)
  Matrix q2;  // n x (n-r)
  Matrix a11; // r x r, diagonal and positive
  Matrix b11, b12, b21, b22;

  Index dim() const { return q1.rows(); }
  Index rank() const { return q1.cols(); }

  // [q1 q2]
  Matrix basis() const;
  // Maps a matrix given in block coordinates back to the ambient space.
  Matrix embed(const Matrix& blocks) const;
  // Embeds an (n-r) x (n-r) matrix acting on null(A).
  Matrix embed_null(const Matrix& m22) const;
};

struct SchurResult {
  Matrix value;        // n x n, zero on range(A)
  Matrix value_block;  // (n-r) x (n-r), in q2 coordinates
  Index rank = 0;
  double path_residual = 0.0;
  double norm = 0.0;   // spectral norm of the value
  double zero_threshold = 0.0;

  bool is_zero() const { return norm <= zero_threshold; }
};

BlockView block_decompose(const CovMatrix& a, const Matrix& b);

// B/A by the defining pseudoinverse formula, cross-checked against
// B^{1/2} P B^{1/2} restricted to null(A), where P projects onto
// null(G^T B^{1/2}).
SchurResult schur_complement(const CovMatrix& a, const CovMatrix& b, double tol_map = kDefaultTolMap);

// B/A computed from a Green factor block g11 = q1^T G of A:
// b22 - (C^{+/2} g11^T b12)^T (C^{+/2} g11^T b12) with C = g11^T b11 g11.
// `scale` is the eigenvalue scale used to threshold C.
Matrix schur_green_form(const BlockView& bv, const Matrix& g11, double tol_rel, double scale);

// (rank(B/A), rank(B) - rank(G^T B G)).
std::pair<Index, Index> schur_rank_identity(const CovMatrix& a, const CovMatrix& b, const GreenFactor& g,
                                            double tol_map = kDefaultTolMap);

// dim(range(B) intersect null(A)) via principal angles: singular values of
// Q_B^T Q_2 at or above 1 - 1e-8 count as zero angles.
Index intersection_dim(const CovMatrix& a, const CovMatrix& b);

// Rank of a PSD matrix computed from data, with an absolute threshold.
Index rank_above(const Matrix& symmetric, double threshold);

}  // namespace bwt
