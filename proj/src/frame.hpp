#pragma once

// Block quantities shared by the transport and geodesic code. Everything is
// expressed in the (q1, q2) coordinates of block_decompose(a, b) with the
// diagonal Green factor G11 = diag(sqrt(lambda)).

#include "bwt/linalg.hpp"
#include "bwt/schur.hpp"

namespace bwt::detail {

struct TransportFrame {
  BlockView bv;
  Vector sqrt_lambda;      // diagonal of G11
  Matrix g11, g11_inv;
  SpectralDecomp c_spec;   // C = G11^T B11 G11
  Matrix c_half, c_pinv_half, c_pinv_three_half;
  Matrix m21_base;         // B21 G11 C^{+/2}
  Matrix s;                // B/A in q2 coordinates
  SpectralDecomp s_spec;   // thresholded at zero_tol
  Matrix s_half;
  Matrix z;                // ONB of null(C), r x (r - rank C)
  double b_norm = 0.0;
  double zero_tol = 0.0;   // tol_map * (1 + ||B||)
  double tol_map = 0.0;

  Index n() const { return bv.dim(); }
  Index r() const { return bv.rank(); }
  Index rank_s() const { return s_spec.rank; }
  bool schur_zero() const { return rank_s() == 0; }
};

TransportFrame make_frame(const CovMatrix& a, const CovMatrix& b, double tol_map);

// Deterministic U12 = Z_k W_k^T pairing null(C) with the top eigenvectors of
// B/A. Throws Unreachable when null(C) is too small.
Matrix deterministic_u12(const TransportFrame& f);

}  // namespace bwt::detail
