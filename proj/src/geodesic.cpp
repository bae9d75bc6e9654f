#include "bwt/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "frame.hpp"

namespace bwt {

namespace {

void check_time(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidParam("t must lie in [0, 1], got " + std::to_string(t));
}

double scale_of(const CovMatrix& a, const CovMatrix& b) {
  return std::max(a.lambda_max(), 0.0) + std::max(b.lambda_max(), 0.0);
}

GeodesicParam finish_param(const detail::TransportFrame& f, const Matrix& n12) {
  GeodesicParam p;
  p.n12 = n12;
  const Matrix deficit = symmetrize(f.s - n12.transpose() * n12);
  const Index nr = f.n() - f.r();
  if (nr == 0) {
    p.m22 = Matrix(0, 0);
    p.kind = GeodesicParam::Kind::Monge;
    return p;
  }
  const SpectralDecomp ds = symmetric_eigen(deficit, kDefaultTolRel, f.zero_tol);
  p.m22 = psd_function(ds, PsdFunction::Sqrt);
  p.kind = ds.rank == 0 ? GeodesicParam::Kind::Monge : GeodesicParam::Kind::Interior;
  return p;
}

}  // namespace

double distance_tolerance(const CovMatrix& a, const CovMatrix& b) {
  return 1e-7 * (1.0 + std::sqrt(std::max(a.trace(), 0.0) + std::max(b.trace(), 0.0)));
}

CovMatrix mccann_interpolant(const CovMatrix& a, const TransportMap& map, double t) {
  check_time(t);
  const Index n = a.dim();
  if (map.t.rows() != n || map.t.cols() != n) throw InvalidInput("mccann_interpolant: dimension mismatch");
  if (t == 0.0) return a;
  const Matrix x = (1.0 - t) * Matrix::Identity(n, n) + t * map.t;
  const double tn = spectral_norm(x);
  return CovMatrix(symmetrize(x * a.data() * x.transpose()), a.tol_rel(), tn * tn * std::max(a.lambda_max(), 0.0));
}

GeodesicParam make_param(const CovMatrix& a, const CovMatrix& b, ParamStyle style, double tol_map) {
  if (!is_reachable(a, b))
    throw Unreachable("rank(A) = " + std::to_string(a.rank()) + " < rank(B) = " + std::to_string(b.rank()));
  const detail::TransportFrame f = detail::make_frame(a, b, tol_map);
  const Matrix extreme = detail::deterministic_u12(f) * f.s_half;
  switch (style.kind) {
    case ParamStyle::Kind::Extreme: return finish_param(f, extreme);
    case ParamStyle::Kind::Zero: return finish_param(f, Matrix::Zero(extreme.rows(), extreme.cols()));
    case ParamStyle::Kind::Scaled:
      if (!(style.s >= -1.0 && style.s <= 1.0))
        throw InvalidParam("scaled parameter s must lie in [-1, 1], got " + std::to_string(style.s));
      return finish_param(f, style.s * extreme);
  }
  throw InvalidParam("unknown parameter style");
}

GeodesicParam make_param_raw(const CovMatrix& a, const CovMatrix& b, const Matrix& n12, double tol_map) {
  if (!is_reachable(a, b))
    throw Unreachable("rank(A) = " + std::to_string(a.rank()) + " < rank(B) = " + std::to_string(b.rank()));
  const detail::TransportFrame f = detail::make_frame(a, b, tol_map);
  if (n12.rows() != f.r() || n12.cols() != f.n() - f.r())
    throw InvalidParam("N12 must be " + std::to_string(f.r()) + "x" + std::to_string(f.n() - f.r()));
  GeodesicParam p = finish_param(f, n12);
  kantorovich_factors(a, b, p, tol_map);  // admissibility
  return p;
}

GeodesicPath::GeodesicPath(const CovMatrix& a, const CovMatrix& b, GeodesicParam param, double tol_map)
    : a_(a),
      b_(b),
      param_(std::move(param)),
      factors_(kantorovich_factors(a, b, param_, tol_map)),
      length_(w2_distance(a, b)),
      tol_map_(tol_map) {}

CovMatrix GeodesicPath::point(double t) const {
  check_time(t);
  if (t == 0.0) return a_;
  if (t == 1.0) return b_;
  const Matrix gt = (1.0 - t) * factors_.g + t * factors_.m;
  return CovMatrix(symmetrize(gt * gt.transpose()), std::max(a_.tol_rel(), b_.tol_rel()), scale_of(a_, b_));
}

CovMatrix kantorovich_point(const CovMatrix& a, const CovMatrix& b, const GeodesicParam& param, double t,
                            double tol_map) {
  check_time(t);
  const GeodesicPath path(a, b, param, tol_map);
  CovMatrix gamma = path.point(t);
  const double w = path.length();
  const double gap = std::max(std::abs(w2_distance(a, gamma) - t * w), std::abs(w2_distance(gamma, b) - (1.0 - t) * w));
  if (gap > distance_tolerance(a, b))
    throw NumericalInconsistency("kantorovich_point: distance identity violated by " + std::to_string(gap));
  return gamma;
}

PointClass classify_point(const CovMatrix& a, const CovMatrix& b, const CovMatrix& gamma, double t,
                          double tol_map) {
  check_time(t);
  require_same_dim(a, gamma, "classify_point");
  require_same_dim(a, b, "classify_point");
  PointClass out;
  const double w = w2_distance(a, b);
  out.distance_residual =
      std::max(std::abs(w2_distance(a, gamma) - t * w), std::abs(w2_distance(gamma, b) - (1.0 - t) * w));
  if (out.distance_residual > distance_tolerance(a, b))
    throw InvalidParam("classify_point: matrix is not on a geodesic at t = " + std::to_string(t) +
                       " (distance residual " + std::to_string(out.distance_residual) + ")");
  const SchurResult s = schur_complement(a, gamma, tol_map);
  out.rank_a = a.rank();
  out.rank_gamma = gamma.rank();
  out.rank_schur = s.rank;
  out.schur_norm = s.norm;
  out.extreme = t == 0.0 || t == 1.0 || s.is_zero();
  return out;
}

std::vector<CovMatrix> sample_path(const GeodesicPath& path, const std::vector<double>& ts) {
  for (std::size_t i = 0; i < ts.size(); ++i) {
    check_time(ts[i]);
    if (i > 0 && ts[i] < ts[i - 1]) throw InvalidParam("sample_path: times must be sorted");
  }
  std::vector<CovMatrix> pts;
  pts.reserve(ts.size());
  for (double t : ts) pts.push_back(path.point(t));

  const double tol = distance_tolerance(path.a(), path.b());
  const double w = path.length();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double gap = std::abs(w2_distance(pts[i], pts[j]) - std::abs(ts[j] - ts[i]) * w);
      if (gap > tol)
        throw NumericalInconsistency("sample_path: constant-speed identity violated by " + std::to_string(gap));
    }
  }
  Index interior_rank = -1;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (ts[i] <= 0.0 || ts[i] >= 1.0) continue;
    if (interior_rank < 0) interior_rank = pts[i].rank();
    else if (pts[i].rank() != interior_rank)
      throw NumericalInconsistency("sample_path: rank changes inside the open interval");
  }
  return pts;
}

}  // namespace bwt
