#include "bwt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace bwt {

namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void fix_signs(Matrix& vecs) {
  for (Index j = 0; j < vecs.cols(); ++j) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < vecs.rows(); ++i) {
      const double v = std::abs(vecs(i, j));
      if (v > best_abs) {
        best_abs = v;
        best = i;
      }
    }
    if (vecs.rows() > 0 && vecs(best, j) < 0.0) vecs.col(j) *= -1.0;
  }
}

// Lexicographic order on (shape, entries). Used to evaluate symmetric
// functions of two matrices in a fixed argument order.
bool lex_less(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows()) return x.rows() < y.rows();
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i)
      if (x(i, j) != y(i, j)) return x(i, j) < y(i, j);
  return false;
}

}  // namespace

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double min_eigenvalue(const Matrix& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(symmetric), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

void require_same_dim(const CovMatrix& a, const CovMatrix& b, const char* what) {
  if (a.dim() != b.dim())
    throw InvalidInput(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                       " vs " + std::to_string(b.dim()) + ")");
}

SpectralDecomp symmetric_eigen(const Matrix& m, double tol_rel, double threshold) {
  SpectralDecomp out;
  const Index n = m.rows();
  if (n == 0) {
    out.eigvals = Vector(0);
    out.eigvecs = Matrix(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw NumericalInconsistency("symmetric eigensolver failed");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const Vector& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return ev(i) > ev(j); });

  out.eigvals.resize(n);
  out.eigvecs.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.eigvals(k) = ev(order[static_cast<std::size_t>(k)]);
    out.eigvecs.col(k) = es.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  fix_signs(out.eigvecs);

  if (threshold < 0.0) threshold = tol_rel * out.eigvals.cwiseAbs().maxCoeff();
  out.threshold = threshold;
  out.rank = 0;
  for (Index k = 0; k < n; ++k)
    if (out.eigvals(k) > threshold) ++out.rank;
  return out;
}

CovMatrix::CovMatrix(const Matrix& data, double tol_rel, double reference_scale) : tol_rel_(tol_rel) {
  if (data.rows() != data.cols())
    throw InvalidInput("covariance matrix must be square, got " + std::to_string(data.rows()) + "x" +
                       std::to_string(data.cols()));
  if (!data.allFinite()) throw InvalidInput("covariance matrix has non-finite entries");
  if (!(tol_rel > 0.0)) throw InvalidInput("tol_rel must be positive");

  const double norm = max_abs(data);
  const double asym = max_abs(data - data.transpose());
  if (asym > tol_rel * std::max(norm, reference_scale))
    throw InvalidInput("matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");

  data_ = symmetrize(data);
  SpectralDecomp spec = symmetric_eigen(data_, tol_rel, 0.0);
  const Index n = data_.rows();
  const double lmax = n > 0 ? std::max(spec.eigvals(0), 0.0) : 0.0;
  const double scale = std::max(lmax, reference_scale);
  if (n > 0 && spec.eigvals(n - 1) < -tol_rel * scale)
    throw InvalidInput("matrix is not positive semidefinite (min eigenvalue " +
                       std::to_string(spec.eigvals(n - 1)) + ")");

  bool clamped = false;
  for (Index k = 0; k < n; ++k) {
    if (spec.eigvals(k) < 0.0) {
      spec.eigvals(k) = 0.0;
      clamped = true;
    }
  }
  if (clamped)
    data_ = symmetrize(spec.eigvecs * spec.eigvals.asDiagonal() * spec.eigvecs.transpose());

  spec.threshold = tol_rel * scale;
  spec.rank = 0;
  for (Index k = 0; k < n; ++k)
    if (spec.eigvals(k) > spec.threshold) ++spec.rank;
  spectrum_ = std::move(spec);
}

double CovMatrix::lambda_max() const {
  return spectrum_.eigvals.size() > 0 ? spectrum_.eigvals(0) : 0.0;
}

Matrix GreenFactor::square() const {
  if (g.cols() == parent_dim) return g;
  Matrix out = Matrix::Zero(parent_dim, parent_dim);
  const Index k = std::min(g.cols(), parent_dim);
  out.leftCols(k) = g.leftCols(k);
  return out;
}

SpectralDecomp spectral_decompose(const CovMatrix& a) { return a.spectrum(); }

Matrix psd_function(const SpectralDecomp& decomp, PsdFunction f) {
  const Index n = decomp.eigvecs.rows();
  Vector mapped = Vector::Zero(decomp.eigvals.size());
  for (Index k = 0; k < decomp.eigvals.size(); ++k) {
    const double lam = decomp.eigvals(k);
    if (lam <= decomp.threshold || lam <= 0.0) continue;
    switch (f) {
      case PsdFunction::Sqrt: mapped(k) = std::sqrt(lam); break;
      case PsdFunction::Pinv: mapped(k) = 1.0 / lam; break;
      case PsdFunction::PinvSqrt: mapped(k) = 1.0 / std::sqrt(lam); break;
    }
  }
  if (n == 0) return Matrix(0, 0);
  return symmetrize(decomp.eigvecs * mapped.asDiagonal() * decomp.eigvecs.transpose());
}

Matrix psd_function(const CovMatrix& a, PsdFunction f) { return psd_function(a.spectrum(), f); }

Index numeric_rank(const CovMatrix& a) { return a.rank(); }

Index matrix_rank(const Matrix& m, double tol_rel) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s(0) <= 0.0) return 0;
  Index r = 0;
  for (Index k = 0; k < s.size(); ++k)
    if (s(k) > tol_rel * s(0)) ++r;
  return r;
}

GreenFactor green_factor(const CovMatrix& a, GreenMethod method) {
  const Index n = a.dim();
  const SpectralDecomp& spec = a.spectrum();
  GreenFactor out;
  out.parent_dim = n;

  if (method == GreenMethod::Spectral) {
    const Index r = spec.rank;
    out.g = spec.eigvecs.leftCols(r) * spec.eigvals.head(r).cwiseSqrt().asDiagonal();
    return out;
  }

  // Diagonal-pivoted outer-product Cholesky. Each column vanishes on the
  // pivots chosen before it, so reordering rows by pivot order gives a lower
  // trapezoidal factor.
  Matrix residual = a.data();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::vector<Vector> cols;
  const double thr = spec.threshold;
  for (Index step = 0; step < n; ++step) {
    Index p = -1;
    double best = thr;
    for (Index i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      if (residual(i, i) > best) {
        best = residual(i, i);
        p = i;
      }
    }
    if (p < 0) break;
    used[static_cast<std::size_t>(p)] = true;
    Vector l = residual.col(p) / std::sqrt(residual(p, p));
    for (Index i = 0; i < n; ++i)
      if (used[static_cast<std::size_t>(i)] && i != p) l(i) = 0.0;
    residual.noalias() -= l * l.transpose();
    cols.push_back(std::move(l));
  }
  out.g = Matrix::Zero(n, static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.g.col(static_cast<Index>(k)) = cols[k];
  return out;
}

Matrix align_to(const Matrix& reference, const Matrix& sqrt_a2) {
  const Index n = sqrt_a2.rows();
  if (reference.rows() != n) throw InvalidInput("align_green: dimension mismatch");
  Matrix ref = Matrix::Zero(n, n);
  const Index k = std::min(reference.cols(), n);
  ref.leftCols(k) = reference.leftCols(k);
  if (reference.cols() > n) {
    // Wide references (never produced by this library) are reduced to an
    // n x n factor with the same Gram matrix R R^T.
    Eigen::BDCSVD<Matrix> r_svd(reference, Eigen::ComputeThinU);
    ref = r_svd.matrixU() * r_svd.singularValues().asDiagonal();
  }
  if (n == 0) return Matrix(0, 0);
  Eigen::BDCSVD<Matrix> svd(ref.transpose() * sqrt_a2, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return sqrt_a2 * svd.matrixV() * svd.matrixU().transpose();
}

GreenFactor align_green(const GreenFactor& g1, const CovMatrix& a2) {
  if (g1.parent_dim != a2.dim() || g1.g.rows() != a2.dim())
    throw InvalidInput("align_green: dimension mismatch");
  return GreenFactor{align_to(g1.g, psd_function(a2, PsdFunction::Sqrt)), a2.dim()};
}

namespace {

double fidelity_impl(const CovMatrix& a, const CovMatrix& b) {
  const Matrix ra = psd_function(a, PsdFunction::Sqrt);
  const Matrix prod = symmetrize(ra * b.data() * ra);
  const double tol = std::max(a.tol_rel(), b.tol_rel());
  const double scale = std::max(a.lambda_max(), 0.0) * std::max(b.lambda_max(), 0.0);
  const SpectralDecomp spec = symmetric_eigen(prod, tol, tol * scale);
  double sum = 0.0;
  for (Index k = 0; k < spec.eigvals.size(); ++k)
    if (spec.eigvals(k) > spec.threshold) sum += std::sqrt(spec.eigvals(k));
  return sum;
}

}  // namespace

double trace_fidelity(const CovMatrix& a, const CovMatrix& b) {
  require_same_dim(a, b, "trace_fidelity");
  return lex_less(b.data(), a.data()) ? fidelity_impl(b, a) : fidelity_impl(a, b);
}

double trace_fidelity(const GreenFactor& g, const CovMatrix& b) {
  if (g.g.rows() != b.dim()) throw InvalidInput("trace_fidelity: dimension mismatch");
  const Matrix prod = symmetrize(g.g.transpose() * b.data() * g.g);
  const double gnorm = spectral_norm(g.g);
  const double scale = gnorm * gnorm * std::max(b.lambda_max(), 0.0);
  const SpectralDecomp spec = symmetric_eigen(prod, b.tol_rel(), b.tol_rel() * scale);
  double sum = 0.0;
  for (Index k = 0; k < spec.eigvals.size(); ++k)
    if (spec.eigvals(k) > spec.threshold) sum += std::sqrt(spec.eigvals(k));
  return sum;
}

}  // namespace bwt
