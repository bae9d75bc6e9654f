#include "bwt/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace bwt {

namespace {

Matrix random_orthogonal(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) x(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(x);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

Matrix square_green(const CovMatrix& a) { return green_factor(a).square(); }

// Right-multiplies every factor by the orthogonal R making g_hat R symmetric
// PSD (polar decomposition). Alignment and the objective are unchanged.
void symmetrize_factors(BarycenterResult& res) {
  Eigen::BDCSVD<Matrix> svd(res.g_hat, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix r = svd.matrixV() * svd.matrixU().transpose();
  res.g_hat = symmetrize(res.g_hat * r);
  for (Matrix& g : res.greens) g = g * r;
}

void finish(BarycenterResult& res, const BarycenterProblem& problem) {
  const double scale = std::max(problem.weighted_trace(), 0.0);
  res.a_hat = CovMatrix(symmetrize(res.g_hat * res.g_hat.transpose()), problem.covs.front().tol_rel(), scale);
  res.objective = res.g_hat.squaredNorm();
  res.weights = problem.weights;
  res.frechet_variance = frechet_variance(res, problem);
}

bool orthogonal_pair(const CovMatrix& x, const CovMatrix& y) {
  const double bound = 1e-8 * std::max(x.lambda_max(), 0.0) * std::max(y.lambda_max(), 0.0);
  return spectral_norm(x.data() * y.data()) <= bound;
}

}  // namespace

void BarycenterProblem::validate() const {
  if (covs.empty()) throw InvalidInput("barycenter problem needs at least one covariance");
  if (weights.size() != covs.size())
    throw InvalidInput("barycenter problem: " + std::to_string(covs.size()) + " covariances but " +
                       std::to_string(weights.size()) + " weights");
  double total = 0.0;
  for (std::size_t i = 0; i < covs.size(); ++i) {
    if (covs[i].dim() != covs.front().dim()) throw InvalidInput("barycenter problem: dimension mismatch");
    if (!(weights[i] > 0.0)) throw InvalidInput("barycenter weights must be positive");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("barycenter weights must sum to 1");
}

double BarycenterProblem::weighted_trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < covs.size(); ++i) s += weights[i] * covs[i].trace();
  return s;
}

BarycenterProblem BarycenterProblem::equal_weights(std::vector<CovMatrix> covs) {
  BarycenterProblem p;
  const double w = covs.empty() ? 0.0 : 1.0 / static_cast<double>(covs.size());
  p.weights.assign(covs.size(), w);
  p.covs = std::move(covs);
  return p;
}

BarycenterResult solve_bcd(const BarycenterProblem& problem, const BcdOptions& opts) {
  problem.validate();
  if (opts.max_iter < 1) throw InvalidParam("max_iter must be at least 1");
  const std::size_t m = problem.covs.size();
  const Index n = problem.dim();
  const double tol_obj = opts.tol_obj >= 0.0 ? opts.tol_obj : 1e-10 * problem.weighted_trace();

  BarycenterResult res;
  std::vector<Matrix> roots(m);
  res.greens.resize(m);
  std::optional<std::mt19937_64> rng;
  if (opts.seed) rng.emplace(*opts.seed);
  for (std::size_t i = 0; i < m; ++i) {
    roots[i] = psd_function(problem.covs[i], PsdFunction::Sqrt);
    res.greens[i] = square_green(problem.covs[i]);
    if (rng) res.greens[i] = res.greens[i] * random_orthogonal(n, *rng);
  }
  res.g_hat = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < m; ++i) res.g_hat += problem.weights[i] * res.greens[i];
  double obj = res.g_hat.squaredNorm();
  res.history.push_back(obj);

  for (int sweep = 0; sweep < opts.max_iter; ++sweep) {
    const double before = obj;
    for (std::size_t i = 0; i < m; ++i) {
      const double p = problem.weights[i];
      const Matrix rest = res.g_hat - p * res.greens[i];
      res.greens[i] = align_to(rest, roots[i]);
      res.g_hat = rest + p * res.greens[i];
      obj = res.g_hat.squaredNorm();
      res.history.push_back(obj);
    }
    res.iterations = sweep + 1;
    if (obj - before < tol_obj) {
      res.converged = true;
      break;
    }
  }
  finish(res, problem);
  return res;
}

double fixed_point_residual(const CovMatrix& a_hat, const BarycenterProblem& problem) {
  problem.validate();
  if (a_hat.dim() != problem.dim()) throw InvalidInput("fixed_point_residual: dimension mismatch");
  const Matrix r = psd_function(a_hat, PsdFunction::Sqrt);
  Matrix acc = Matrix::Zero(a_hat.dim(), a_hat.dim());
  for (std::size_t i = 0; i < problem.covs.size(); ++i) {
    const CovMatrix& ai = problem.covs[i];
    const CovMatrix mid(symmetrize(r * ai.data() * r), ai.tol_rel(),
                        std::max(a_hat.lambda_max(), 0.0) * std::max(ai.lambda_max(), 0.0));
    acc += problem.weights[i] * psd_function(mid, PsdFunction::Sqrt);
  }
  return (a_hat.data() - acc).norm();
}

double frechet_variance(const BarycenterResult& result, const BarycenterProblem& problem) {
  return -result.g_hat.squaredNorm() + problem.weighted_trace();
}

BarycenterResult orthogonal_closed_form(const BarycenterProblem& problem) {
  problem.validate();
  const std::size_t m = problem.covs.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (!orthogonal_pair(problem.covs[i], problem.covs[j]))
        throw PreconditionFailed("orthogonal_closed_form: A_" + std::to_string(i + 1) + " A_" +
                                 std::to_string(j + 1) + " != 0");
  BarycenterResult res;
  res.g_hat = Matrix::Zero(problem.dim(), problem.dim());
  for (std::size_t i = 0; i < m; ++i) {
    res.greens.push_back(psd_function(problem.covs[i], PsdFunction::Sqrt));
    res.g_hat += problem.weights[i] * res.greens.back();
  }
  res.converged = true;
  finish(res, problem);
  res.history = {res.objective};
  return res;
}

BarycenterResult hierarchical_closed_form(const std::vector<BarycenterProblem>& groups,
                                          const std::vector<double>& outer_weights, const BcdOptions& opts) {
  if (groups.empty()) throw InvalidInput("hierarchical_closed_form: no groups");
  if (outer_weights.size() != groups.size()) throw InvalidInput("hierarchical_closed_form: weight count mismatch");
  BarycenterProblem flat;
  flat.covs.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    groups[i].validate();
    for (std::size_t j = 0; j < groups[i].covs.size(); ++j) {
      flat.covs.push_back(groups[i].covs[j]);
      flat.weights.push_back(outer_weights[i] * groups[i].weights[j]);
    }
  }
  flat.validate();
  if (groups.size() == 1) return solve_bcd(groups.front(), opts);

  for (std::size_t i = 0; i < groups.size(); ++i)
    for (std::size_t k = i + 1; k < groups.size(); ++k)
      for (const CovMatrix& x : groups[i].covs)
        for (const CovMatrix& y : groups[k].covs)
          if (!orthogonal_pair(x, y))
            throw PreconditionFailed("hierarchical_closed_form: groups " + std::to_string(i + 1) + " and " +
                                     std::to_string(k + 1) + " are not orthogonal");

  BarycenterResult res;
  res.g_hat = Matrix::Zero(flat.dim(), flat.dim());
  res.converged = true;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    BarycenterResult sub = solve_bcd(groups[i], opts);
    symmetrize_factors(sub);
    res.g_hat += outer_weights[i] * sub.g_hat;
    res.iterations = std::max(res.iterations, sub.iterations);
    res.converged = res.converged && sub.converged;
    for (Matrix& g : sub.greens) res.greens.push_back(std::move(g));
  }
  finish(res, flat);
  res.history = {res.objective};
  return res;
}

std::vector<std::vector<Matrix>> multicoupling_kernel(const BarycenterResult& result) {
  const std::size_t m = result.greens.size();
  std::vector<std::vector<Matrix>> k(m, std::vector<Matrix>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) k[i][j] = result.greens[i] * result.greens[j].transpose();
  return k;
}

Matrix stacked_kernel(const BarycenterResult& result) {
  const Index m = static_cast<Index>(result.greens.size());
  if (m == 0) return Matrix(0, 0);
  const Index n = result.greens.front().rows();
  Matrix stacked(m * n, n);
  for (Index i = 0; i < m; ++i) stacked.middleRows(i * n, n) = result.greens[static_cast<std::size_t>(i)];
  return stacked * stacked.transpose();
}

}  // namespace bwt
