#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

#include "dfrc/types.hpp"

namespace dfrc {

/// A complex sparse-recovery instance. Single-dictionary problems carry one
/// matrix and one measurement; group problems carry one dictionary per
/// measurement (all sharing the atom count) or one shared dictionary with
/// several measurements, and are solved for a joint support.
struct SparseProblem {
  std::vector<Eigen::MatrixXcd> dictionaries;
  std::vector<Eigen::VectorXcd> measurements;
  std::optional<int> sparsity;          // stop after K atoms
  std::optional<double> residual_tol;   // stop at ||r|| <= tol * ||y||
  double lambda = 0.0;                  // L1 weight, basis-pursuit mode only
};

struct SparseSolution {
  std::vector<int> support;             // selected atom indices, ascending
  Eigen::MatrixXcd coefficients;        // |support| x num_measurements
  double residual_norm = 0.0;
  double objective = 0.0;               // basis-pursuit objective (fista only)
  int iterations = 0;
  bool rank_deficient = false;
  bool converged = true;
};

class SparseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Orthogonal matching pursuit on a single dictionary/measurement pair.
/// Greedy selection by normalized correlation with the residual, full
/// least-squares re-fit on the support each iteration.
SparseSolution omp(const SparseProblem& problem);

/// Joint-support OMP across measurements: each iteration selects the atom
/// maximizing the summed normalized correlation energy, then re-fits every
/// measurement on the shared support.
SparseSolution group_omp(const SparseProblem& problem);

/// Basis pursuit denoising, min 0.5||Ax-y||^2 + lambda*||x||_1 over complex x,
/// via FISTA with monotone (function-value) restart. The step is 1/L with L
/// estimated by power iteration. Support = entries above 1e-3 of the peak.
SparseSolution fista_bpdn(const SparseProblem& problem);

}  // namespace dfrc
