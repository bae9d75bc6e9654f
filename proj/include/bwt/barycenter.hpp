#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bwt/linalg.hpp"

namespace bwt {

struct BarycenterProblem {
  std::vector<CovMatrix> covs;
  std::vector<double> weights;

  // Throws InvalidInput unless m >= 1, dimensions agree, weights are positive
  // and sum to 1 within 1e-12.
  void validate() const;
  Index dim() const { return covs.empty() ? 0 : covs.front().dim(); }
  // sum_i p_i tr(A_i)
  double weighted_trace() const;

  static BarycenterProblem equal_weights(std::vector<CovMatrix> covs);
};

struct BarycenterResult {
  CovMatrix a_hat{Matrix(0, 0)};
  std::vector<Matrix> greens;  // n x n, G_i G_i^T = A_i
  Matrix g_hat;                // sum_i p_i G_i
  std::vector<double> weights;
  double objective = 0.0;      // ||G_hat||_F^2
  double frechet_variance = 0.0;
  int iterations = 0;          // full sweeps
  bool converged = false;
  // Objective after every single-factor update, starting with the initial value.
  std::vector<double> history;
};

struct BcdOptions {
  int max_iter = 500;
  // Stop when a sweep raises the objective by less than this. Negative selects
  // 1e-10 * sum_i p_i tr(A_i).
  double tol_obj = -1.0;
  // When set, initial factors are right-multiplied by seeded random orthogonal
  // matrices.
  std::optional<std::uint64_t> seed;
};

// Block coordinate ascent on ||sum_i p_i G_i||_F^2 over Green factors.
// Each update aligns G_i with the sum of the others. The result is properly
// aligned, which is necessary but not sufficient for optimality.
BarycenterResult solve_bcd(const BarycenterProblem& problem, const BcdOptions& opts = {});

// ||A_hat - sum_i p_i (A_hat^{1/2} A_i A_hat^{1/2})^{1/2}||_F
double fixed_point_residual(const CovMatrix& a_hat, const BarycenterProblem& problem);

// -||G_hat||_F^2 + sum_i p_i tr(A_i)
double frechet_variance(const BarycenterResult& result, const BarycenterProblem& problem);

// Exact barycenter when A_i A_j = 0 for i != j (spectral Green factors).
BarycenterResult orthogonal_closed_form(const BarycenterProblem& problem);

// Groups whose members are mutually orthogonal across groups; each group is
// solved with solve_bcd and the group means are combined with outer weights.
// Factors in the result are listed group by group, weights p_i q_ij.
BarycenterResult hierarchical_closed_form(const std::vector<BarycenterProblem>& groups,
                                          const std::vector<double>& outer_weights, const BcdOptions& opts = {});

// K(i, j) = G_i G_j^T.
std::vector<std::vector<Matrix>> multicoupling_kernel(const BarycenterResult& result);

// The kernel as one mn x mn block matrix.
Matrix stacked_kernel(const BarycenterResult& result);

}  // namespace bwt
