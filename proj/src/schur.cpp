#include "bwt/schur.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bwt {

Matrix BlockView::basis() const {
  Matrix q(dim(), dim());
  q << q1, q2;
  return q;
}

Matrix BlockView::embed(const Matrix& blocks) const {
  const Matrix q = basis();
  return q * blocks * q.transpose();
}

Matrix BlockView::embed_null(const Matrix& m22) const { return q2 * m22 * q2.transpose(); }

Index rank_above(const Matrix& symmetric, double threshold) {
  if (symmetric.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(symmetric), Eigen::EigenvaluesOnly);
  return static_cast<Index>((es.eigenvalues().array() > threshold).count());
}

BlockView block_decompose(const CovMatrix& a, const Matrix& b) {
  if (b.rows() != a.dim() || b.cols() != a.dim())
    throw InvalidInput("block_decompose: dimension mismatch");
  const SpectralDecomp& spec = a.spectrum();
  BlockView bv;
  bv.q1 = spec.range_basis();
  bv.q2 = spec.null_basis();
  bv.a11 = symmetrize(bv.q1.transpose() * a.data() * bv.q1);
  bv.b11 = bv.q1.transpose() * b * bv.q1;
  bv.b12 = bv.q1.transpose() * b * bv.q2;
  bv.b21 = bv.q2.transpose() * b * bv.q1;
  bv.b22 = bv.q2.transpose() * b * bv.q2;
  return bv;
}

Matrix schur_green_form(const BlockView& bv, const Matrix& g11, double tol_rel, double scale) {
  const Matrix c = symmetrize(g11.transpose() * bv.b11 * g11);
  const SpectralDecomp cs = symmetric_eigen(c, tol_rel, tol_rel * scale);
  const Matrix x = psd_function(cs, PsdFunction::PinvSqrt) * g11.transpose() * bv.b12;
  return symmetrize(bv.b22 - x.transpose() * x);
}

SchurResult schur_complement(const CovMatrix& a, const CovMatrix& b, double tol_map) {
  require_same_dim(a, b, "schur_complement");
  const Index n = a.dim();
  const BlockView bv = block_decompose(a, b.data());
  const Index r = bv.rank();
  const double tol = std::max(a.tol_rel(), b.tol_rel());
  const double lb = std::max(b.lambda_max(), 0.0);
  const double la = std::max(a.lambda_max(), 0.0);

  SchurResult out;
  out.zero_threshold = tol_map * (1.0 + lb);
  if (r == n) {
    out.value = Matrix::Zero(n, n);
    out.value_block = Matrix(0, 0);
    return out;
  }

  // Defining formula.
  const SpectralDecomp b11s = symmetric_eigen(symmetrize(bv.b11), tol, tol * lb);
  const Matrix x = psd_function(b11s, PsdFunction::PinvSqrt) * bv.b12;
  const Matrix s1 = symmetrize(bv.b22 - x.transpose() * x);

  // Projection route.
  const Matrix rb = psd_function(b, PsdFunction::Sqrt);
  const GreenFactor g = green_factor(a);
  Matrix proj = Matrix::Identity(n, n);
  if (g.g.cols() > 0) {
    const Matrix k = g.g.transpose() * rb;
    Eigen::BDCSVD<Matrix> svd(k, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double cut = tol * std::sqrt(la) * std::sqrt(lb);
    Index rk = 0;
    for (Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cut) ++rk;
    const Matrix v = svd.matrixV().leftCols(rk);
    proj -= v * v.transpose();
  }
  const Matrix s2 = symmetrize(bv.q2.transpose() * rb * proj * rb * bv.q2);

  out.path_residual = (s1 - s2).cwiseAbs().maxCoeff();
  const double bnorm = lb;
  if (out.path_residual > 1e-7 * (1.0 + bnorm))
    throw NumericalInconsistency("schur_complement: computation paths disagree by " +
                                 std::to_string(out.path_residual));
  out.value_block = s1;
  out.value = bv.embed_null(s1);
  out.norm = spectral_norm(s1);
  out.rank = rank_above(s1, out.zero_threshold);
  return out;
}

std::pair<Index, Index> schur_rank_identity(const CovMatrix& a, const CovMatrix& b, const GreenFactor& g,
                                            double tol_map) {
  require_same_dim(a, b, "schur_rank_identity");
  if (g.g.rows() != a.dim()) throw InvalidInput("schur_rank_identity: Green factor dimension mismatch");
  const SchurResult s = schur_complement(a, b, tol_map);
  const double gn = spectral_norm(g.g);
  const double tol = b.tol_rel();
  const Matrix gbg = symmetrize(g.g.transpose() * b.data() * g.g);
  const Index rk_gbg = rank_above(gbg, tol * gn * gn * std::max(b.lambda_max(), 0.0));
  return {s.rank, b.rank() - rk_gbg};
}

Index intersection_dim(const CovMatrix& a, const CovMatrix& b) {
  require_same_dim(a, b, "intersection_dim");
  const Matrix qb = b.spectrum().range_basis();
  const Matrix q2 = a.spectrum().null_basis();
  if (qb.cols() == 0 || q2.cols() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(qb.transpose() * q2);
  return static_cast<Index>((svd.singularValues().array() >= 1.0 - 1e-8).count());
}

}  // namespace bwt
