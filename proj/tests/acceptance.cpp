// Acceptance checks: one PASS/FAIL line per criterion, exit 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "bwt/barycenter.hpp"
#include "bwt/geodesic.hpp"
#include "bwt/gproc.hpp"
#include "bwt/schur.hpp"
#include "bwt/transport.hpp"
#include "support.hpp"

using namespace bwt;
using namespace bwt::test;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

char buf[512];

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const Matrix kA = diag({4, 1, 0});
const Matrix kB = mat({{0, 0, 0}, {0, 4, 2}, {0, 2, 1}});
const Matrix kC = diag({0, 0, 1});

Outcome golden_map() {
  const Matrix expect = mat({{0, 0, 0}, {0, 2, 1}, {0, 1, 0.5}});
  const CovMatrix a(kA), b(kB);
  double err = 0.0, best = 1e9;
  for (int rep = 0; rep < 5; ++rep) {
    const auto t0 = Clock::now();
    const TransportMap t = canonical_spd_map(a, b);
    best = std::min(best, seconds_since(t0));
    err = std::max(err, max_abs(t.t - expect));
  }
  return {err <= 1e-12 && best < 1e-3, fmt("max error %.2e, runtime %.3f ms", err, best * 1e3)};
}

Outcome spd_equivalence() {
  int disagreements = 0, positives = 0;
  auto check = [&](const CovMatrix& a, const CovMatrix& b) {
    const SpdReachReport r = evaluate_spd_conditions(a, b);
    if (!r.consistent()) ++disagreements;
    if (r.all()) ++positives;
  };
  const SpdReachReport ab = evaluate_spd_conditions(CovMatrix(kA), CovMatrix(kB));
  const SpdReachReport ac = evaluate_spd_conditions(CovMatrix(kA), CovMatrix(kC));
  const bool examples_ok = ab.all() && ac.consistent() && !ac.spd_exists;
  check(CovMatrix(kA), CovMatrix(kB));
  check(CovMatrix(kA), CovMatrix(kC));
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const Pair p = random_reachable_pair(rng, 7);
    check(CovMatrix(p.a), CovMatrix(p.b));
  }
  return {examples_ok && disagreements == 0,
          fmt("202 pairs, %d disagreements, %d with a PSD map, example pairs %s", disagreements, positives,
              examples_ok ? "as stated" : "WRONG")};
}

Outcome constant_rank() {
  std::mt19937_64 rng(3);
  double worst_schur = 0.0;
  int rank_mismatch = 0;
  for (int i = 0; i < 50; ++i) {
    const Pair p = random_reachable_pair(rng, 7);
    const CovMatrix a(p.a), b(p.b);
    const TransportMap map = ot_map(a, b);
    for (int k = 1; k <= 9; ++k) {
      const CovMatrix g = mccann_interpolant(a, map, 0.1 * k);
      worst_schur = std::max(worst_schur, schur_complement(a, g).norm);
      if (g.rank() != a.rank()) ++rank_mismatch;
    }
  }
  return {worst_schur <= 1e-8 && rank_mismatch == 0,
          fmt("50 pairs x 9 times, max ||Gamma_t/A|| %.2e, %d rank mismatches", worst_schur, rank_mismatch)};
}

Outcome constant_speed() {
  std::mt19937_64 rng(4);
  std::vector<Pair> pairs = {{kA, kB}, {kA, kC}, {diag({1, 0}), diag({0, 1})}};
  for (int i = 0; i < 10; ++i) pairs.push_back(random_reachable_pair(rng, 6));
  const std::vector<ParamStyle> styles = {ParamStyle::extreme(), ParamStyle::zero(), ParamStyle::scaled(0.5)};
  const double ts[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  double worst = 0.0;
  for (const Pair& p : pairs) {
    const CovMatrix a(p.a), b(p.b);
    const double d = w2_distance(a, b);
    for (const ParamStyle& style : styles) {
      const GeodesicPath path(a, b, make_param(a, b, style));
      std::vector<CovMatrix> pts;
      for (double t : ts) pts.push_back(path.point(t));
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
          worst = std::max(worst, std::abs(w2_distance(pts[i], pts[j]) - std::abs(ts[j] - ts[i]) * d));
    }
  }
  return {worst <= 1e-7, fmt("%zu pairs x 3 styles x 25 (s,t), max deviation %.2e", pairs.size(), worst)};
}

Outcome midpoint_family() {
  const BarycenterResult r =
      solve_bcd(BarycenterProblem::equal_weights({CovMatrix(diag({1, 0})), CovMatrix(diag({0, 1}))}));
  const Matrix& x = r.a_hat.data();
  const double s = 4 * x(0, 1);
  const bool ok = std::abs(x(0, 0) - 0.25) <= 1e-9 && std::abs(x(1, 1) - 0.25) <= 1e-9 &&
                  std::abs(x(0, 1) - x(1, 0)) <= 1e-12 && std::abs(s) <= 1 + 1e-9 &&
                  std::abs(r.objective - 0.5) <= 1e-9 && std::abs(r.frechet_variance - 0.5) <= 1e-9;
  return {ok, fmt("s = %.3g, objective %.12f, Frechet variance %.12f", s, r.objective, r.frechet_variance)};
}

struct SeededSuite {
  std::vector<BarycenterProblem> problems;
  std::vector<BarycenterResult> results;
  double seconds = 0.0;
};

const SeededSuite& seeded_suite() {
  static const SeededSuite suite = [] {
    SeededSuite s;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> w(0.1, 1.0);
    for (int i = 0; i < 100; ++i) {
      const Index n = uniform_int(1, 20, rng);
      const int m = static_cast<int>(uniform_int(1, 8, rng));
      BarycenterProblem p;
      std::vector<double> raw;
      double total = 0.0;
      for (int k = 0; k < m; ++k) {
        p.covs.emplace_back(random_psd(n, uniform_int(0, n, rng), rng));
        raw.push_back(w(rng));
        total += raw.back();
      }
      for (double x : raw) p.weights.push_back(x / total);
      s.problems.push_back(std::move(p));
    }
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < s.problems.size(); ++i) {
      BcdOptions opts;
      if (i % 2 == 1) opts.seed = i;
      s.results.push_back(solve_bcd(s.problems[i], opts));
    }
    s.seconds = seconds_since(t0);
    return s;
  }();
  return suite;
}

Outcome bcd_monotone() {
  const SeededSuite& s = seeded_suite();
  int non_monotone = 0, misaligned = 0, residual_fail = 0;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < s.problems.size(); ++i) {
    const BarycenterResult& r = s.results[i];
    for (std::size_t k = 1; k < r.history.size(); ++k)
      if (r.history[k] < r.history[k - 1] - 1e-12) ++non_monotone;
    const double scale = 1 + s.problems[i].weighted_trace();
    for (const Matrix& g : r.greens)
      if (min_eigenvalue(r.g_hat.transpose() * g) < -1e-9 * scale) ++misaligned;
    const double ratio = fixed_point_residual(r.a_hat, s.problems[i]) / (1 + r.a_hat.trace());
    worst_ratio = std::max(worst_ratio, ratio);
    if (ratio > 1e-6) ++residual_fail;
  }
  const bool ok = non_monotone == 0 && misaligned == 0 && residual_fail == 0 && s.seconds < 30;
  return {ok, fmt("100 problems, %d decreases, %d misaligned, max residual/(1+tr) %.2e, %.2f s", non_monotone,
                  misaligned, worst_ratio, s.seconds)};
}

// det(x)^{1/2n}, exactly 0 when x is rank deficient (its round-off eigenvalues
// would otherwise contribute (1e-16)^{1/2n}, which is not small).
double det_root(const Matrix& x) {
  const CovMatrix c(x);
  if (c.rank() < c.dim()) return 0.0;
  const Vector ev = symmetric_eigen(x).eigvals;
  double log_det = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) <= 0.0) return 0.0;
    log_det += std::log(ev(i));
  }
  return std::exp(log_det / (2.0 * static_cast<double>(ev.size())));
}

Outcome order_bounds() {
  const SeededSuite& s = seeded_suite();
  int loewner_fail = 0, det_fail = 0;
  double worst_loewner = 0.0, worst_det = 0.0;
  for (std::size_t i = 0; i < s.problems.size(); ++i) {
    const BarycenterProblem& p = s.problems[i];
    Matrix mean = Matrix::Zero(p.dim(), p.dim());
    double det_mean = 0.0;
    for (std::size_t k = 0; k < p.covs.size(); ++k) {
      mean += p.weights[k] * p.covs[k].data();
      det_mean += p.weights[k] * det_root(p.covs[k].data());
    }
    const double gap = min_eigenvalue(mean - s.results[i].a_hat.data());
    worst_loewner = std::min(worst_loewner, gap);
    if (gap < -1e-8) ++loewner_fail;
    const double dgap = det_root(s.results[i].a_hat.data()) - det_mean;
    worst_det = std::min(worst_det, dgap);
    if (dgap < -1e-8) ++det_fail;
  }
  return {loewner_fail == 0 && det_fail == 0,
          fmt("Loewner violations %d (worst %.2e), determinant violations %d (worst %.2e)", loewner_fail,
              worst_loewner, det_fail, worst_det)};
}

Outcome ibm_closed_forms() {
  const auto t0 = Clock::now();
  const bool exact = ibm_w2_analytic_exact(1, 2) == Rational{1, 2} && ibm_w2_analytic_exact(1, 3) == Rational{41, 120};
  std::string detail = exact ? "analytic exact 1/2, 41/120" : "analytic WRONG";
  bool ok = exact;
  for (int m : {2, 3}) {
    const double analytic = ibm_w2_analytic(1, m);
    const double e1 = std::abs(ibm_w2_numeric(1, m, Grid::uniform(500)) - analytic);
    const double e2 = std::abs(ibm_w2_numeric(1, m, Grid::uniform(1000)) - analytic);
    const double ratio = e1 / e2;
    ok = ok && e1 <= 5e-3 && ratio >= 1.7;
    detail += fmt("; (1,%d) |numeric-analytic| %.4f at m=500, ratio %.3f", m, e1, ratio);
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 10;
  return {ok, detail + fmt("; %.2f s", secs)};
}

Outcome gp_certificates() {
  const Grid g = Grid::uniform(200);
  const CrossGramCertificate classic = cross_gram_certificate(classic_kernels(ClassicProcess::BrownianMotion, g).green,
                                                              classic_kernels(ClassicProcess::BrownianBridge, g).green);
  const CrossGramCertificate volterra = cross_gram_certificate(volterra_green(1, g), volterra_green(2, g));
  const bool ok1 = classic.kind == CrossGramKind::Asymmetric && classic.asymmetry > 10 * classic.tol;
  const bool ok2 = volterra.kind == CrossGramKind::Psd;
  return {ok1 && ok2, fmt("(BM,BB) %s asym %.3g; Volterra(1,2) %s asym %.3g quadratic-form min %.3g",
                          to_string(classic.kind), classic.asymmetry, to_string(volterra.kind), volterra.asymmetry,
                          volterra.quadratic_form_min)};
}

Outcome dual_potentials() {
  std::mt19937_64 rng(10);
  double worst = 0.0;
  int branch_mismatch = 0, infinite = 0;
  for (int i = 0; i < 100; ++i) {
    const Index n = uniform_int(2, 7, rng);
    const CovMatrix a(random_psd(n, uniform_int(1, n, rng), rng));
    const CovMatrix b(random_psd(n, uniform_int(0, n, rng), rng));
    const GreenFactor g{green_factor(a).square(), n};
    const GreenFactor m = align_green(g, b);
    const Vector z = gaussian(n, 1, rng);
    const Vector x = g.g * z, y = m.g * z;
    const DualValue on = dual_conjugate(g, m, y);
    if (!on.finite()) {
      ++branch_mismatch;
    } else {
      const double gap = std::abs(0.5 * x.dot(y) + std::get<double>(on.value) - x.dot(y));
      worst = std::max(worst, gap / (1 + std::abs(x.dot(y))));
    }
    const DualValue off = dual_conjugate(g, m, gaussian(n, 1, rng));
    if (off.finite() != (off.range_residual <= off.tolerance)) ++branch_mismatch;
    if (!off.finite()) ++infinite;
  }
  return {worst <= 1e-9 && branch_mismatch == 0,
          fmt("100 draws, max Fenchel-Young gap %.2e, %d off-support +inf, %d branch mismatches", worst, infinite,
              branch_mismatch)};
}

Outcome schur_paths() {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  int rank_mismatch = 0;
  for (int i = 0; i < 200; ++i) {
    const Index n = uniform_int(1, 8, rng);
    const CovMatrix a(random_psd(n, uniform_int(0, n, rng), rng));
    const CovMatrix b(random_psd(n, uniform_int(0, n, rng), rng));
    const SchurResult s = schur_complement(a, b);
    worst = std::max(worst, s.path_residual / (1 + spectral_norm(b.data())));
    const auto [lhs, rhs] = schur_rank_identity(a, b, green_factor(a));
    if (lhs != rhs || lhs != s.rank) ++rank_mismatch;
  }
  return {worst <= 1e-8 && rank_mismatch == 0,
          fmt("200 pairs, max path gap/scale %.2e, %d rank-identity mismatches", worst, rank_mismatch)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"golden canonical SPD map", golden_map},
      {"SPD reachability equivalence", spd_equivalence},
      {"constant-rank Monge interpolants", constant_rank},
      {"geodesic constant speed", constant_speed},
      {"barycenter midpoint family", midpoint_family},
      {"BCD monotonicity and alignment", bcd_monotone},
      {"barycenter order bounds", order_bounds},
      {"IBM closed forms", ibm_closed_forms},
      {"GP cross-Gram certificates", gp_certificates},
      {"dual potentials", dual_potentials},
      {"Schur cross-validation", schur_paths},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
