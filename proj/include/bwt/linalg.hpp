#pragma once

#include <Eigen/Dense>

#include "bwt/errors.hpp"

namespace bwt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Relative rank / PSD threshold. An eigenvalue counts as nonzero when it
// exceeds tol_rel * lambda_max.
inline constexpr double kDefaultTolRel = 1e-10;

// Symmetric eigendecomposition with descending eigenvalues. Each eigenvector
// has its largest-magnitude component (first one on ties) made positive.
struct SpectralDecomp {
  Vector eigvals;
  Matrix eigvecs;
  Index rank = 0;

  // Eigenvalue cut-off used to compute `rank`.
  double threshold = 0.0;

  Matrix range_basis() const { return eigvecs.leftCols(rank); }
  Matrix null_basis() const { return eigvecs.rightCols(eigvecs.cols() - rank); }
};

// Symmetric positive semidefinite matrix. Construction validates symmetry and
// clamps negative eigenvalues that fall within tolerance; the spectrum is
// computed once and carried along.
class CovMatrix {
 public:
  // `reference_scale` lets callers that build a matrix from computed data
  // (e.g. a Schur complement that should vanish) measure the PSD tolerance
  // against a larger scale than the matrix's own lambda_max.
  explicit CovMatrix(const Matrix& data, double tol_rel = kDefaultTolRel,
                     double reference_scale = 0.0);

  const Matrix& data() const { return data_; }
  Index dim() const { return data_.rows(); }
  double tol_rel() const { return tol_rel_; }
  const SpectralDecomp& spectrum() const { return spectrum_; }

  double trace() const { return data_.trace(); }
  double lambda_max() const;
  Index rank() const { return spectrum_.rank; }

 private:
  Matrix data_;
  double tol_rel_;
  SpectralDecomp spectrum_;
};

enum class PsdFunction { Sqrt, Pinv, PinvSqrt };

enum class GreenMethod { Spectral, PivotedCholesky };

// G with G G^T = A. `g` may be trimmed (n x r) or square (n x n).
struct GreenFactor {
  Matrix g;
  Index parent_dim = 0;

  // Zero-padded n x n version.
  Matrix square() const;
};

// Decomposes any symmetric matrix (not necessarily PSD). `threshold` is the
// absolute cut-off applied to |eigenvalue| for the rank count; a negative
// value selects tol_rel * max|eigenvalue|.
SpectralDecomp symmetric_eigen(const Matrix& m, double tol_rel = kDefaultTolRel,
                               double threshold = -1.0);

SpectralDecomp spectral_decompose(const CovMatrix& a);

Matrix psd_function(const CovMatrix& a, PsdFunction f);

// Applies f to the eigenvalues above `decomp.threshold`; the rest map to 0.
Matrix psd_function(const SpectralDecomp& decomp, PsdFunction f);

Index numeric_rank(const CovMatrix& a);

// Rank of an arbitrary matrix: singular values above tol_rel * sigma_max.
Index matrix_rank(const Matrix& m, double tol_rel = kDefaultTolRel);

GreenFactor green_factor(const CovMatrix& a, GreenMethod method = GreenMethod::Spectral);

// Returns the square Green factor G2 of a2 with g1^T G2 symmetric PSD.
GreenFactor align_green(const GreenFactor& g1, const CovMatrix& a2);

// Raw form used by the barycenter sweep: `reference` is any n x k matrix,
// `sqrt_a2` the PSD square root of the target. Returns G2 (n x n) with
// G2 G2^T = a2 and reference^T G2 PSD.
Matrix align_to(const Matrix& reference, const Matrix& sqrt_a2);

// tr((A^{1/2} B A^{1/2})^{1/2}).
double trace_fidelity(const CovMatrix& a, const CovMatrix& b);

// tr((G^T B G)^{1/2}) for an arbitrary Green factor G of A. Equals the above.
double trace_fidelity(const GreenFactor& g, const CovMatrix& b);

// Helpers shared across modules.
Matrix symmetrize(const Matrix& m);
double min_eigenvalue(const Matrix& symmetric);
double spectral_norm(const Matrix& m);
void require_same_dim(const CovMatrix& a, const CovMatrix& b, const char* what);

}  // namespace bwt
