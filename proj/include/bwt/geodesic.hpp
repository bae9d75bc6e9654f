#pragma once

#include <vector>

#include "bwt/transport.hpp"

namespace bwt {

struct ParamStyle {
  enum class Kind { Extreme, Zero, Scaled };
  Kind kind = Kind::Extreme;
  double s = 1.0;  // Scaled only, in [-1, 1]

  static ParamStyle extreme() { return {Kind::Extreme, 1.0}; }
  static ParamStyle zero() { return {Kind::Zero, 0.0}; }
  static ParamStyle scaled(double s) { return {Kind::Scaled, s}; }
};

// Gamma_t = X A X^T with X = (1-t) I + t T.
CovMatrix mccann_interpolant(const CovMatrix& a, const TransportMap& map, double t);

// Extreme: N12 = U12 (B/A)^{1/2} with the deterministic U12, M22 = 0.
// Zero: N12 = 0, M22 = (B/A)^{1/2}.
// Scaled(s): s times the extreme N12, M22 = ((1 - s^2) B/A)^{1/2}.
GeodesicParam make_param(const CovMatrix& a, const CovMatrix& b, ParamStyle style,
                         double tol_map = kDefaultTolMap);

// Any N12 from the admissible ball; M22 is the PSD root of the deficit.
// Throws InvalidParam if N12 is not admissible.
GeodesicParam make_param_raw(const CovMatrix& a, const CovMatrix& b, const Matrix& n12,
                             double tol_map = kDefaultTolMap);

// Constant-speed geodesic stored through its aligned factors.
class GeodesicPath {
 public:
  GeodesicPath(const CovMatrix& a, const CovMatrix& b, GeodesicParam param, double tol_map = kDefaultTolMap);

  const CovMatrix& a() const { return a_; }
  const CovMatrix& b() const { return b_; }
  const GeodesicParam& param() const { return param_; }
  const Matrix& g() const { return factors_.g; }
  const Matrix& m() const { return factors_.m; }
  double length() const { return length_; }

  // Gamma_t = G_t G_t^T with G_t = (1-t) G + t M.
  CovMatrix point(double t) const;

 private:
  CovMatrix a_, b_;
  GeodesicParam param_;
  GreenPair factors_;
  double length_;
  double tol_map_;
};

// Gamma_t for `param`, with membership in the barycenter set verified through
// W(A, Gamma) = t W(A, B) and W(Gamma, B) = (1-t) W(A, B).
CovMatrix kantorovich_point(const CovMatrix& a, const CovMatrix& b, const GeodesicParam& param, double t,
                            double tol_map = kDefaultTolMap);

struct PointClass {
  bool extreme = false;  // McCann interpolant
  Index rank_gamma = 0;
  Index rank_a = 0;
  Index rank_schur = 0;  // rank(Gamma/A)
  double schur_norm = 0.0;
  double distance_residual = 0.0;
};

// Throws InvalidParam if gamma is not on a geodesic from a to b at time t.
PointClass classify_point(const CovMatrix& a, const CovMatrix& b, const CovMatrix& gamma, double t,
                          double tol_map = kDefaultTolMap);

// Points at sorted times in [0, 1]. Checks the constant-speed identity for
// every pair and constant rank on the open interval.
std::vector<CovMatrix> sample_path(const GeodesicPath& path, const std::vector<double>& ts);

// Distance tolerance used by the membership and constant-speed checks.
double distance_tolerance(const CovMatrix& a, const CovMatrix& b);

}  // namespace bwt
