#pragma once

#include <optional>
#include <variant>

#include "bwt/linalg.hpp"
#include "bwt/schur.hpp"

namespace bwt {

// Choice of the partial isometry U12 pairing null(C) with range(B/A), where
// C = G11^T B11 G11. All choices give optimal maps; they differ off range(A)
// and in the null(A) column block.
enum class U12Policy { Deterministic, Negated, Supplied };

// Completion of the blocks (T12, T22) that act on null(A). They never affect
// T A T^T, so any choice is optimal.
enum class FreeBlocks { SymmetricZero, SpdCanonical };

struct MapOptions {
  U12Policy u12 = U12Policy::Deterministic;
  FreeBlocks free_blocks = FreeBlocks::SymmetricZero;
  // r x (n-r) in the (q1, q2) coordinates of block_decompose(a, b); only read
  // with U12Policy::Supplied.
  Matrix supplied_u12;
  double tol_map = kDefaultTolMap;
};

struct TransportMap {
  Matrix t;  // ambient n x n
  // Blocks in (q1, q2) coordinates.
  Matrix t11, t12, t21, t22;
  Matrix u12;
  FreeBlocks free_blocks = FreeBlocks::SymmetricZero;
  double residual_transport = 0.0;   // ||T A T^T - B||_2
  double residual_optimality = 0.0;  // |tr(A T) - trace_fidelity(A, B)|
};

struct SpdReachReport {
  bool spd_exists = false;           // canonical formula gives a PSD transport map
  bool as_unique = false;            // T restricted to range(A) independent of U12
  bool schur_zero = false;           // B/A = 0
  bool range_eq = false;             // rank(B) = rank(BA)
  bool trivial_intersection = false; // range(B) and null(A) meet only in 0
  std::optional<TransportMap> canonical;

  bool consistent() const {
    return spd_exists == as_unique && as_unique == schur_zero && schur_zero == range_eq &&
           range_eq == trivial_intersection;
  }
  bool all() const { return consistent() && spd_exists; }
};

// Selects one point of the Kantorovich set: N12 (r x (n-r)) with range in
// null(C) and N12^T N12 <= B/A, plus M22 with M22 M22^T = B/A - N12^T N12.
// Both blocks are in the (q1, q2) coordinates of block_decompose(a, b).
struct GeodesicParam {
  enum class Kind { Monge, Interior };
  Matrix n12;
  Matrix m22;
  Kind kind = Kind::Monge;
};

// Aligned ambient Green factors: G G^T = A, M M^T = B, G^T M PSD.
struct GreenPair {
  Matrix g;
  Matrix m;
};

double w2_distance(const CovMatrix& a, const CovMatrix& b);
double w2_squared(const CovMatrix& a, const CovMatrix& b);

bool is_reachable(const CovMatrix& a, const CovMatrix& b);

// Unique optimal map for invertible A.
TransportMap pusz_woronowicz(const CovMatrix& a, const CovMatrix& b, double tol_map = kDefaultTolMap);

TransportMap ot_map(const CovMatrix& a, const CovMatrix& b, const MapOptions& opts = {});

// Minimal-rank PSD optimal map; exists iff B/A = 0.
TransportMap canonical_spd_map(const CovMatrix& a, const CovMatrix& b, double tol_map = kDefaultTolMap);

// Evaluates the five equivalent conditions independently, without throwing
// on disagreement.
SpdReachReport evaluate_spd_conditions(const CovMatrix& a, const CovMatrix& b,
                                       double tol_map = kDefaultTolMap);

// As above; throws NumericalInconsistency if the conditions disagree.
SpdReachReport spd_reachability(const CovMatrix& a, const CovMatrix& b, double tol_map = kDefaultTolMap);

// Validates `param` against (a, b) and builds the aligned factors.
GreenPair kantorovich_factors(const CovMatrix& a, const CovMatrix& b, const GeodesicParam& param,
                              double tol_map = kDefaultTolMap);

// Covariance [[A, G M^T], [M G^T, B]] of the coupling selected by `param`.
CovMatrix optimal_coupling(const CovMatrix& a, const CovMatrix& b, const GeodesicParam& param,
                           double tol_map = kDefaultTolMap);

struct PlusInfinity {
  bool operator==(const PlusInfinity&) const = default;
};
using ExtendedReal = std::variant<double, PlusInfinity>;

struct DualValue {
  ExtendedReal value;
  double range_residual = 0.0;  // ||(I - P) G^T y||, P the projector onto range(G^T M)
  double tolerance = 0.0;

  bool finite() const { return std::holds_alternative<double>(value); }
};

// Convex conjugate of phi(x) = <x, S x>/2 written through an aligned pair:
// ||(G^T M)^{+/2} G^T y||^2 / 2 if G^T y lies in range(G^T M), else +inf.
DualValue dual_conjugate(const GreenFactor& g, const GreenFactor& m, const Vector& y,
                         double tol = kDefaultTolMap);

}  // namespace bwt
