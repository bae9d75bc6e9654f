#pragma once

#include <cstdint>
#include <utility>

#include "bwt/linalg.hpp"

namespace bwt {

// Uniform midpoint grid on [0, 1]: s_i = (i - 1/2) / m, weight h = 1/m.
struct Grid {
  Index m = 0;
  Vector points;
  double h = 0.0;

  static Grid uniform(Index m);
};

// Integral operator on the grid: mat(i, j) = h K(s_i, s_j). Traces and
// products approximate the continuous ones directly.
struct DiscretizedOperator {
  Grid grid;
  Matrix mat;
};

// n-fold integration, kernel (s - t)^{n-1} / (n-1)! on t <= s (diagonal
// included, so n = 1 gives the cumulative sum).
DiscretizedOperator volterra_green(int n, const Grid& grid);

// Covariance of the n-times integrated Brownian motion, G G^T with G the
// Volterra factor above.
DiscretizedOperator ibm_covariance(int n, const Grid& grid);

enum class ClassicProcess { BrownianMotion, BrownianBridge };

struct KernelPair {
  DiscretizedOperator covariance;
  DiscretizedOperator green;
};

// BM: K = min(s,t), G(s,t) = 1[t <= s]. BB: K = min(s,t) - st, G = 1[t <= s] - s.
KernelPair classic_kernels(ClassicProcess which, const Grid& grid);

// Exact rational with 64-bit parts; enough for the small IBM orders used here.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  bool operator==(const Rational& o) const = default;
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// C_n = 1 / (2n (2n-1) ((n-1)!)^2), the squared HS norm of the Volterra operator.
Rational ibm_constant(int n);

// Closed form for W2^2 between the n- and m-times integrated Brownian motions:
// n + m even: C_n + C_m - 2 C_{(n+m)/2}; odd: C_n + C_m - C_{(n+m+1)/2}.
Rational ibm_w2_analytic_exact(int n, int m);
double ibm_w2_analytic(int n, int m);

// Squared W2 between the discretized covariances.
double ibm_w2_numeric(int n, int m, const Grid& grid);

enum class CrossGramKind { Psd, SymmetricNotPsd, Asymmetric };

struct CrossGramCertificate {
  CrossGramKind kind = CrossGramKind::Psd;
  double asymmetry = 0.0;           // ||X - X^T||_2 / 2
  double min_eigenvalue = 0.0;      // of X when symmetric, else of (X + X^T)/2
  double quadratic_form_min = 0.0;  // min <h, X h> over unit h
  double tol = 0.0;
};

// X = g1^T g2 on the grid. Psd requires X symmetric and PSD within tol; a
// PSD quadratic form alone is not enough.
CrossGramCertificate cross_gram_certificate(const DiscretizedOperator& g1, const DiscretizedOperator& g2,
                                            double tol = 1e-8);

const char* to_string(CrossGramKind kind);

enum class MercerComposite { K121, K212 };

// K121 = G1^T K2 G1 and K212 = G2^T K1 G2 (1 = BM, 2 = BB) on the grid.
DiscretizedOperator mercer_composite(const Grid& grid, MercerComposite which);

// Pointwise value K(s, t) by midpoint quadrature with `quad_m` nodes per axis.
double mercer_composite_at(MercerComposite which, double s, double t, Index quad_m = 400);

}  // namespace bwt
