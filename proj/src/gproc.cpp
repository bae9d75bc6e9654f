#include "bwt/gproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bwt/transport.hpp"

namespace bwt {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void check_order(int n, const char* what) {
  if (n < 1) throw InvalidParam(std::string(what) + ": order must be at least 1, got " + std::to_string(n));
}

void check_grid(const Grid& grid) {
  if (grid.m < 1 || grid.points.size() != grid.m) throw InvalidInput("invalid grid");
}

Matrix green_matrix(ClassicProcess which, const Grid& grid) {
  const Index m = grid.m;
  Matrix g(m, m);
  for (Index i = 0; i < m; ++i) {
    const double s = grid.points(i);
    for (Index j = 0; j < m; ++j) {
      const double ind = j <= i ? 1.0 : 0.0;
      g(i, j) = grid.h * (which == ClassicProcess::BrownianMotion ? ind : ind - s);
    }
  }
  return g;
}

Matrix covariance_matrix(ClassicProcess which, const Grid& grid) {
  const Index m = grid.m;
  Matrix k(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      const double s = grid.points(i), t = grid.points(j);
      const double v = std::min(s, t) - (which == ClassicProcess::BrownianBridge ? s * t : 0.0);
      k(i, j) = grid.h * v;
    }
  }
  return k;
}

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

Rational reduce(__int128 num, __int128 den) {
  if (den == 0) throw InvalidInput("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
  if (num > lim || num < -lim || den > lim) throw InvalidParam("rational overflow");
  return Rational{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

}  // namespace

Grid Grid::uniform(Index m) {
  if (m < 1) throw InvalidParam("grid needs at least one point");
  Grid g;
  g.m = m;
  g.h = 1.0 / static_cast<double>(m);
  g.points.resize(m);
  for (Index i = 0; i < m; ++i) g.points(i) = (static_cast<double>(i) + 0.5) * g.h;
  return g;
}

DiscretizedOperator volterra_green(int n, const Grid& grid) {
  check_order(n, "volterra_green");
  check_grid(grid);
  const double c = 1.0 / factorial(n - 1);
  Matrix v = Matrix::Zero(grid.m, grid.m);
  for (Index i = 0; i < grid.m; ++i)
    for (Index j = 0; j <= i; ++j)
      v(i, j) = grid.h * c * std::pow(grid.points(i) - grid.points(j), n - 1);
  return {grid, v};
}

DiscretizedOperator ibm_covariance(int n, const Grid& grid) {
  const DiscretizedOperator g = volterra_green(n, grid);
  return {grid, symmetrize(g.mat * g.mat.transpose())};
}

KernelPair classic_kernels(ClassicProcess which, const Grid& grid) {
  check_grid(grid);
  return {{grid, covariance_matrix(which, grid)}, {grid, green_matrix(which, grid)}};
}

Rational Rational::make(std::int64_t num, std::int64_t den) { return reduce(num, den); }

Rational Rational::operator+(const Rational& o) const {
  return reduce(static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den,
                static_cast<__int128>(den) * o.den);
}

Rational Rational::operator-(const Rational& o) const { return *this + Rational{-o.num, o.den}; }

Rational Rational::operator*(const Rational& o) const {
  return reduce(static_cast<__int128>(num) * o.num, static_cast<__int128>(den) * o.den);
}

Rational ibm_constant(int n) {
  check_order(n, "ibm_constant");
  __int128 fact = 1;
  for (int i = 2; i <= n - 1; ++i) fact *= i;
  return reduce(1, static_cast<__int128>(2 * n) * (2 * n - 1) * fact * fact);
}

Rational ibm_w2_analytic_exact(int n, int m) {
  check_order(n, "ibm_w2_analytic");
  check_order(m, "ibm_w2_analytic");
  const Rational base = ibm_constant(n) + ibm_constant(m);
  if ((n + m) % 2 == 0) return base - Rational{2, 1} * ibm_constant((n + m) / 2);
  return base - ibm_constant((n + m + 1) / 2);
}

double ibm_w2_analytic(int n, int m) { return ibm_w2_analytic_exact(n, m).to_double(); }

double ibm_w2_numeric(int n, int m, const Grid& grid) {
  if (n == m) return 0.0;
  // With A = G G^T and B = M M^T the fidelity tr (A^{1/2} B A^{1/2})^{1/2} is
  // the nuclear norm of G^T M, so only singular values are needed.
  const Matrix g = volterra_green(n, grid).mat;
  const Matrix v = volterra_green(m, grid).mat;
  const Vector sv = Eigen::BDCSVD<Matrix>(g.transpose() * v).singularValues();
  return std::max(g.squaredNorm() + v.squaredNorm() - 2.0 * sv.sum(), 0.0);
}

CrossGramCertificate cross_gram_certificate(const DiscretizedOperator& g1, const DiscretizedOperator& g2,
                                            double tol) {
  if (g1.mat.rows() != g2.mat.rows() || g1.mat.cols() != g2.mat.cols() || g1.grid.m != g2.grid.m)
    throw InvalidInput("cross_gram_certificate: operators live on different grids");
  const Matrix x = g1.mat.transpose() * g2.mat;
  CrossGramCertificate c;
  c.tol = tol;
  c.asymmetry = 0.5 * spectral_norm(x - x.transpose());
  c.quadratic_form_min = min_eigenvalue(x);
  c.min_eigenvalue = c.quadratic_form_min;
  if (c.asymmetry > tol) c.kind = CrossGramKind::Asymmetric;
  else if (c.min_eigenvalue >= -tol) c.kind = CrossGramKind::Psd;
  else c.kind = CrossGramKind::SymmetricNotPsd;
  return c;
}

const char* to_string(CrossGramKind kind) {
  switch (kind) {
    case CrossGramKind::Psd: return "psd";
    case CrossGramKind::SymmetricNotPsd: return "symmetric_not_psd";
    case CrossGramKind::Asymmetric: return "asymmetric";
  }
  return "unknown";
}

DiscretizedOperator mercer_composite(const Grid& grid, MercerComposite which) {
  check_grid(grid);
  const bool k121 = which == MercerComposite::K121;
  const Matrix g = green_matrix(k121 ? ClassicProcess::BrownianMotion : ClassicProcess::BrownianBridge, grid);
  const Matrix k = covariance_matrix(k121 ? ClassicProcess::BrownianBridge : ClassicProcess::BrownianMotion, grid);
  return {grid, symmetrize(g.transpose() * k * g)};
}

double mercer_composite_at(MercerComposite which, double s, double t, Index quad_m) {
  const Grid q = Grid::uniform(quad_m);
  const bool k121 = which == MercerComposite::K121;
  Vector a(quad_m), b(quad_m);
  for (Index i = 0; i < quad_m; ++i) {
    const double u = q.points(i);
    a(i) = (u >= s ? 1.0 : 0.0) - (k121 ? 0.0 : u);
    b(i) = (u >= t ? 1.0 : 0.0) - (k121 ? 0.0 : u);
  }
  const Matrix k = covariance_matrix(k121 ? ClassicProcess::BrownianBridge : ClassicProcess::BrownianMotion, q);
  return q.h * a.dot(k * b);  // k already carries one factor h
}

}  // namespace bwt
