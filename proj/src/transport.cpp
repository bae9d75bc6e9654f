#include "bwt/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "frame.hpp"

namespace bwt {

namespace detail {

TransportFrame make_frame(const CovMatrix& a, const CovMatrix& b, double tol_map) {
  require_same_dim(a, b, "transport");
  if (!(tol_map > 0.0)) throw InvalidInput("tol_map must be positive");
  TransportFrame f;
  f.tol_map = tol_map;
  f.bv = block_decompose(a, b.data());
  const Index r = f.r();
  const double tol = std::max(a.tol_rel(), b.tol_rel());
  f.b_norm = std::max(b.lambda_max(), 0.0);
  f.zero_tol = tol_map * (1.0 + f.b_norm);

  f.sqrt_lambda = a.spectrum().eigvals.head(r).cwiseSqrt();
  f.g11 = f.sqrt_lambda.asDiagonal();
  f.g11_inv = f.sqrt_lambda.cwiseInverse().asDiagonal();

  const Matrix c = symmetrize(f.g11 * f.bv.b11 * f.g11);
  f.c_spec = symmetric_eigen(c, tol, tol * std::max(a.lambda_max(), 0.0) * f.b_norm);
  f.c_half = psd_function(f.c_spec, PsdFunction::Sqrt);
  f.c_pinv_half = psd_function(f.c_spec, PsdFunction::PinvSqrt);
  f.c_pinv_three_half = psd_function(f.c_spec, PsdFunction::Pinv) * f.c_pinv_half;
  f.z = f.c_spec.null_basis();
  f.m21_base = f.bv.b21 * f.g11 * f.c_pinv_half;

  const Matrix x = f.c_pinv_half * f.g11 * f.bv.b12;
  f.s = symmetrize(f.bv.b22 - x.transpose() * x);
  f.s_spec = symmetric_eigen(f.s, tol, f.zero_tol);
  f.s_half = psd_function(f.s_spec, PsdFunction::Sqrt);
  return f;
}

Matrix deterministic_u12(const TransportFrame& f) {
  const Index k = f.rank_s();
  if (k > f.z.cols())
    throw Unreachable("rank(B/A) = " + std::to_string(k) + " exceeds dim null(C) = " +
                      std::to_string(f.z.cols()));
  return f.z.leftCols(k) * f.s_spec.eigvecs.leftCols(k).transpose();
}

}  // namespace detail

namespace {

using detail::TransportFrame;

bool lex_less(const Matrix& x, const Matrix& y) {
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i)
      if (x(i, j) != y(i, j)) return x(i, j) < y(i, j);
  return false;
}

void fill_residuals(TransportMap& map, const CovMatrix& a, const CovMatrix& b) {
  map.residual_transport = spectral_norm(map.t * a.data() * map.t.transpose() - b.data());
  map.residual_optimality = std::abs((a.data() * map.t).trace() - trace_fidelity(a, b));
}

bool residuals_ok(const TransportMap& map, const CovMatrix& b, double tol_map) {
  return map.residual_transport <= tol_map * (1.0 + std::max(b.lambda_max(), 0.0)) &&
         map.residual_optimality <= tol_map * (1.0 + b.trace());
}

// Determined blocks and the free blocks for a given U12; no verification.
TransportMap assemble(const TransportFrame& f, const Matrix& u12, FreeBlocks free) {
  TransportMap map;
  map.free_blocks = free;
  map.u12 = u12;
  map.t11 = f.g11_inv * f.c_half * f.g11_inv;
  map.t21 = (f.m21_base + f.s_half * u12.transpose()) * f.g11_inv;
  const Index nr = f.n() - f.r();
  if (free == FreeBlocks::SymmetricZero) {
    map.t12 = map.t21.transpose();
    map.t22 = Matrix::Zero(nr, nr);
  } else {
    map.t12 = f.g11_inv * f.c_pinv_half * f.g11 * f.bv.b12;
    map.t22 = symmetrize(f.bv.b21 * f.g11 * f.c_pinv_three_half * f.g11 * f.bv.b12);
  }
  Matrix blocks(f.n(), f.n());
  blocks << map.t11, map.t12, map.t21, map.t22;
  map.t = f.bv.embed(blocks);
  return map;
}

}  // namespace

double w2_squared(const CovMatrix& a, const CovMatrix& b) {
  require_same_dim(a, b, "w2_distance");
  if (a.data() == b.data()) return 0.0;
  // ||A^{1/2} - M||_F^2 with M the Green factor of the second argument aligned
  // to A^{1/2}; this equals tr A + tr B - 2 tr((A^{1/2} B A^{1/2})^{1/2})
  // without the cancellation of the trace formula.
  const CovMatrix& x = lex_less(b.data(), a.data()) ? b : a;
  const CovMatrix& y = (&x == &a) ? b : a;
  const Matrix rx = psd_function(x, PsdFunction::Sqrt);
  const Matrix m = align_to(rx, psd_function(y, PsdFunction::Sqrt));
  return (rx - m).squaredNorm();
}

double w2_distance(const CovMatrix& a, const CovMatrix& b) { return std::sqrt(std::max(w2_squared(a, b), 0.0)); }

bool is_reachable(const CovMatrix& a, const CovMatrix& b) {
  require_same_dim(a, b, "is_reachable");
  return a.rank() >= b.rank();
}

TransportMap pusz_woronowicz(const CovMatrix& a, const CovMatrix& b, double tol_map) {
  require_same_dim(a, b, "pusz_woronowicz");
  if (a.rank() < a.dim())
    throw NotInvertible("pusz_woronowicz: source covariance is singular (rank " + std::to_string(a.rank()) +
                        " < " + std::to_string(a.dim()) + ")");
  const Matrix ra = psd_function(a, PsdFunction::Sqrt);
  const Matrix ra_inv = psd_function(a, PsdFunction::PinvSqrt);
  const CovMatrix mid(symmetrize(ra * b.data() * ra), std::max(a.tol_rel(), b.tol_rel()),
                      std::max(a.lambda_max(), 0.0) * std::max(b.lambda_max(), 0.0));
  TransportMap map;
  map.t = symmetrize(ra_inv * psd_function(mid, PsdFunction::Sqrt) * ra_inv);
  map.t11 = map.t;
  map.t12 = Matrix(a.dim(), 0);
  map.t21 = Matrix(0, a.dim());
  map.t22 = Matrix(0, 0);
  map.u12 = Matrix(a.dim(), 0);
  fill_residuals(map, a, b);
  if (!residuals_ok(map, b, tol_map))
    throw NumericalInconsistency("pusz_woronowicz: residuals above tolerance (transport " +
                                 std::to_string(map.residual_transport) + ")");
  return map;
}

TransportMap ot_map(const CovMatrix& a, const CovMatrix& b, const MapOptions& opts) {
  require_same_dim(a, b, "ot_map");
  if (!is_reachable(a, b))
    throw Unreachable("rank(A) = " + std::to_string(a.rank()) + " < rank(B) = " + std::to_string(b.rank()));
  const TransportFrame f = detail::make_frame(a, b, opts.tol_map);
  if (opts.free_blocks == FreeBlocks::SpdCanonical && !f.schur_zero())
    throw NoSpdMap("B/A has rank " + std::to_string(f.rank_s()) + "; no PSD transport map exists");

  Matrix u12;
  switch (opts.u12) {
    case U12Policy::Deterministic: u12 = detail::deterministic_u12(f); break;
    case U12Policy::Negated: u12 = -detail::deterministic_u12(f); break;
    case U12Policy::Supplied:
      if (opts.supplied_u12.rows() != f.r() || opts.supplied_u12.cols() != f.n() - f.r())
        throw InvalidParam("supplied U12 must be " + std::to_string(f.r()) + "x" +
                           std::to_string(f.n() - f.r()));
      u12 = opts.supplied_u12;
      break;
  }
  if (u12.size() == 0) u12 = Matrix::Zero(f.r(), f.n() - f.r());

  TransportMap map = assemble(f, u12, opts.free_blocks);
  fill_residuals(map, a, b);
  if (!residuals_ok(map, b, opts.tol_map)) {
    const std::string msg = "ot_map: residuals above tolerance (transport " +
                            std::to_string(map.residual_transport) + ", optimality " +
                            std::to_string(map.residual_optimality) + ")";
    if (opts.u12 == U12Policy::Supplied) throw InvalidParam(msg);
    throw NumericalInconsistency(msg);
  }
  return map;
}

TransportMap canonical_spd_map(const CovMatrix& a, const CovMatrix& b, double tol_map) {
  MapOptions opts;
  opts.free_blocks = FreeBlocks::SpdCanonical;
  opts.tol_map = tol_map;
  return ot_map(a, b, opts);
}

SpdReachReport evaluate_spd_conditions(const CovMatrix& a, const CovMatrix& b, double tol_map) {
  require_same_dim(a, b, "spd_reachability");
  SpdReachReport rep;
  const TransportFrame f = detail::make_frame(a, b, tol_map);
  const double tol = std::max(a.tol_rel(), b.tol_rel());
  const bool reachable = is_reachable(a, b) && f.rank_s() <= f.z.cols();

  // (1) The canonical formula, completed with the deterministic U12, is a
  // symmetric PSD transport map.
  if (reachable) {
    TransportMap cand = assemble(f, detail::deterministic_u12(f), FreeBlocks::SpdCanonical);
    fill_residuals(cand, a, b);
    const double tscale = 1.0 + spectral_norm(cand.t);
    const bool symmetric = spectral_norm(cand.t - cand.t.transpose()) <= tol_map * tscale;
    const bool psd = symmetric && min_eigenvalue(cand.t) >= -tol_map * tscale;
    rep.spd_exists = psd && residuals_ok(cand, b, tol_map);
    if (rep.spd_exists) rep.canonical = std::move(cand);
  }

  // (2) T on range(A) does not depend on the U12 policy.
  if (reachable) {
    const Matrix u = detail::deterministic_u12(f);
    const TransportMap t_pos = assemble(f, u, FreeBlocks::SymmetricZero);
    const TransportMap t_neg = assemble(f, -u, FreeBlocks::SymmetricZero);
    const Matrix diff = (t_pos.t - t_neg.t) * f.bv.q1;
    const double scale = 1.0 + spectral_norm(t_pos.t);
    rep.as_unique = spectral_norm(diff) <= tol_map * scale;
  }

  // (3)
  rep.schur_zero = f.schur_zero();

  // (4) range(B) = range(BA), through ranks.
  rep.range_eq = b.rank() == matrix_rank(b.data() * a.data(), tol);

  // (5)
  rep.trivial_intersection = intersection_dim(a, b) == 0;
  return rep;
}

SpdReachReport spd_reachability(const CovMatrix& a, const CovMatrix& b, double tol_map) {
  SpdReachReport rep = evaluate_spd_conditions(a, b, tol_map);
  if (!rep.consistent())
    throw NumericalInconsistency(std::string("spd_reachability: equivalent conditions disagree (") +
                                 (rep.spd_exists ? "1" : "0") + (rep.as_unique ? "1" : "0") +
                                 (rep.schur_zero ? "1" : "0") + (rep.range_eq ? "1" : "0") +
                                 (rep.trivial_intersection ? "1" : "0") + ")");
  return rep;
}

GreenPair kantorovich_factors(const CovMatrix& a, const CovMatrix& b, const GeodesicParam& param,
                              double tol_map) {
  if (!is_reachable(a, b))
    throw Unreachable("rank(A) = " + std::to_string(a.rank()) + " < rank(B) = " + std::to_string(b.rank()));
  const TransportFrame f = detail::make_frame(a, b, tol_map);
  const Index r = f.r();
  const Index nr = f.n() - r;
  if (param.n12.rows() != r || param.n12.cols() != nr || param.m22.rows() != nr || param.m22.cols() != nr)
    throw InvalidParam("geodesic parameter has the wrong shape for this pair (expected N12 " +
                       std::to_string(r) + "x" + std::to_string(nr) + ")");

  const double tol = f.zero_tol;
  // range(N12) inside null(C).
  if (r > 0 && nr > 0) {
    const Matrix range_c = f.c_spec.range_basis();
    if (spectral_norm(range_c.transpose() * param.n12) > tol)
      throw InvalidParam("N12 is not supported on null(G11^T B11 G11)");
  }
  const Matrix deficit = symmetrize(f.s - param.n12.transpose() * param.n12);
  if (nr > 0 && min_eigenvalue(deficit) < -tol) throw InvalidParam("N12^T N12 exceeds B/A");
  if (nr > 0 && spectral_norm(param.m22 * param.m22.transpose() - deficit) > tol)
    throw InvalidParam("M22 M22^T does not match B/A - N12^T N12");

  Matrix gb = Matrix::Zero(f.n(), f.n());
  gb.topLeftCorner(r, r) = f.g11;
  Matrix mb = Matrix::Zero(f.n(), f.n());
  mb.topLeftCorner(r, r) = f.g11_inv * f.c_half;
  mb.bottomLeftCorner(nr, r) = f.m21_base + param.n12.transpose();
  mb.bottomRightCorner(nr, nr) = param.m22;
  return GreenPair{f.bv.embed(gb), f.bv.embed(mb)};
}

CovMatrix optimal_coupling(const CovMatrix& a, const CovMatrix& b, const GeodesicParam& param, double tol_map) {
  const GreenPair gp = kantorovich_factors(a, b, param, tol_map);
  const Index n = a.dim();
  Matrix cov(2 * n, 2 * n);
  const Matrix cross = gp.g * gp.m.transpose();
  cov << a.data(), cross, cross.transpose(), b.data();
  const double scale = std::max(a.lambda_max(), 0.0) + std::max(b.lambda_max(), 0.0);
  CovMatrix out(cov, std::max(a.tol_rel(), tol_map), scale);
  return out;
}

DualValue dual_conjugate(const GreenFactor& g, const GreenFactor& m, const Vector& y, double tol) {
  if (g.g.rows() != m.g.rows() || g.g.rows() != y.size() || g.g.cols() != m.g.cols())
    throw InvalidInput("dual_conjugate: dimension mismatch");
  const Matrix k = g.g.transpose() * m.g;
  const double scale = 1.0 + spectral_norm(k);
  if (spectral_norm(k - k.transpose()) > tol * scale || min_eigenvalue(k) < -tol * scale)
    throw InvalidParam("dual_conjugate: G^T M is not symmetric PSD (pair not aligned)");

  const SpectralDecomp ks = symmetric_eigen(symmetrize(k), kDefaultTolRel);
  const Vector v = g.g.transpose() * y;
  const Matrix range = ks.range_basis();
  const Vector proj = range * (range.transpose() * v);
  DualValue out;
  out.range_residual = (v - proj).norm();
  out.tolerance = tol * (1.0 + v.norm());
  if (out.range_residual > out.tolerance) {
    out.value = PlusInfinity{};
  } else {
    const Vector w = psd_function(ks, PsdFunction::PinvSqrt) * v;
    out.value = 0.5 * w.squaredNorm();
  }
  return out;
}

}  // namespace bwt
