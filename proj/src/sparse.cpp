#include "dfrc/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace dfrc {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct LsFit {
  MatrixXcd coeffs;
  bool rank_deficient = false;
};

/// Least squares on the support columns; falls back to the minimum-norm
/// solution when the submatrix is rank deficient.
LsFit solve_support(const MatrixXcd& dict, const std::vector<int>& support,
                    const VectorXcd& y) {
  MatrixXcd sub(dict.rows(), support.size());
  for (std::size_t j = 0; j < support.size(); ++j) sub.col(j) = dict.col(support[j]);
  Eigen::ColPivHouseholderQR<MatrixXcd> qr(sub);
  LsFit fit;
  if (qr.rank() < static_cast<Eigen::Index>(support.size())) {
    fit.rank_deficient = true;
    Eigen::CompleteOrthogonalDecomposition<MatrixXcd> cod(sub);
    fit.coeffs = cod.solve(y);
  } else {
    fit.coeffs = qr.solve(y);
  }
  return fit;
}

void check_group_shapes(const SparseProblem& p) {
  if (p.dictionaries.empty() || p.measurements.empty())
    throw SparseError("problem needs at least one dictionary and measurement");
  if (p.dictionaries.size() != 1 && p.dictionaries.size() != p.measurements.size())
    throw SparseError("need one dictionary total or one per measurement");
  const Eigen::Index atoms = p.dictionaries[0].cols();
  for (std::size_t i = 0; i < p.dictionaries.size(); ++i) {
    if (p.dictionaries[i].cols() != atoms)
      throw SparseError("dictionaries must share the atom count");
    const std::size_t yi = p.dictionaries.size() == 1 ? 0 : i;
    if (p.measurements[yi].size() != p.dictionaries[i].rows())
      throw SparseError("measurement length does not match dictionary rows");
  }
}

}  // namespace

SparseSolution omp(const SparseProblem& problem) {
  if (problem.dictionaries.size() != 1 || problem.measurements.size() != 1)
    throw SparseError("omp expects a single dictionary and measurement");
  check_group_shapes(problem);

  const MatrixXcd& dict = problem.dictionaries[0];
  const VectorXcd& y = problem.measurements[0];
  const int atoms = static_cast<int>(dict.cols());
  const int max_atoms =
      std::min<int>(problem.sparsity.value_or(atoms), static_cast<int>(dict.rows()));
  const double ynorm = y.norm();
  const double stop_norm = problem.residual_tol.value_or(1e-12) * ynorm;

  VectorXd col_norm2 = dict.colwise().squaredNorm().real();
  SparseSolution sol;
  sol.coefficients.resize(0, 1);
  if (ynorm == 0.0) return sol;

  VectorXcd residual = y;
  sol.residual_norm = ynorm;
  std::vector<char> used(atoms, 0);

  while (static_cast<int>(sol.support.size()) < max_atoms && sol.residual_norm > stop_norm) {
    VectorXcd corr = dict.adjoint() * residual;
    int best = -1;
    double best_score = 0.0;
    for (int n = 0; n < atoms; ++n) {
      if (used[n] || col_norm2[n] <= 0.0) continue;
      const double score = std::norm(corr[n]) / col_norm2[n];
      if (score > best_score) {
        best_score = score;
        best = n;
      }
    }
    if (best < 0) break;
    used[best] = 1;
    sol.support.push_back(best);
    std::sort(sol.support.begin(), sol.support.end());

    LsFit fit = solve_support(dict, sol.support, y);
    sol.rank_deficient = sol.rank_deficient || fit.rank_deficient;
    sol.coefficients = fit.coeffs;
    VectorXcd approx = VectorXcd::Zero(y.size());
    for (std::size_t j = 0; j < sol.support.size(); ++j)
      approx += fit.coeffs(j, 0) * dict.col(sol.support[j]);
    residual = y - approx;
    sol.residual_norm = residual.norm();
    ++sol.iterations;
  }
  return sol;
}

SparseSolution group_omp(const SparseProblem& problem) {
  check_group_shapes(problem);
  const std::size_t num_meas = problem.measurements.size();
  const bool shared = problem.dictionaries.size() == 1;
  const auto dict_of = [&](std::size_t i) -> const MatrixXcd& {
    return problem.dictionaries[shared ? 0 : i];
  };
  const int atoms = static_cast<int>(problem.dictionaries[0].cols());
  Eigen::Index min_rows = problem.dictionaries[0].rows();
  for (const auto& d : problem.dictionaries) min_rows = std::min(min_rows, d.rows());
  const int max_atoms =
      std::min<int>(problem.sparsity.value_or(atoms), static_cast<int>(min_rows));

  double ynorm2 = 0.0;
  for (const auto& y : problem.measurements) ynorm2 += y.squaredNorm();
  const double stop_norm = problem.residual_tol.value_or(1e-12) * std::sqrt(ynorm2);

  std::vector<VectorXd> col_norm2(problem.dictionaries.size());
  for (std::size_t i = 0; i < problem.dictionaries.size(); ++i)
    col_norm2[i] = problem.dictionaries[i].colwise().squaredNorm().real();

  SparseSolution sol;
  sol.coefficients.resize(0, num_meas);
  if (ynorm2 == 0.0) return sol;

  std::vector<VectorXcd> residual(problem.measurements);
  sol.residual_norm = std::sqrt(ynorm2);
  std::vector<char> used(atoms, 0);

  while (static_cast<int>(sol.support.size()) < max_atoms && sol.residual_norm > stop_norm) {
    VectorXd score = VectorXd::Zero(atoms);
    for (std::size_t i = 0; i < num_meas; ++i) {
      const VectorXcd corr = dict_of(i).adjoint() * residual[i];
      const VectorXd& norms = col_norm2[shared ? 0 : i];
      for (int n = 0; n < atoms; ++n)
        if (norms[n] > 0.0) score[n] += std::norm(corr[n]) / norms[n];
    }
    int best = -1;
    double best_score = 0.0;
    for (int n = 0; n < atoms; ++n) {
      if (used[n]) continue;
      if (score[n] > best_score) {
        best_score = score[n];
        best = n;
      }
    }
    if (best < 0 || best_score == 0.0) break;
    used[best] = 1;
    sol.support.push_back(best);
    std::sort(sol.support.begin(), sol.support.end());

    sol.coefficients.resize(sol.support.size(), num_meas);
    double res2 = 0.0;
    for (std::size_t i = 0; i < num_meas; ++i) {
      LsFit fit = solve_support(dict_of(i), sol.support, problem.measurements[i]);
      sol.rank_deficient = sol.rank_deficient || fit.rank_deficient;
      sol.coefficients.col(i) = fit.coeffs;
      VectorXcd approx = VectorXcd::Zero(problem.measurements[i].size());
      for (std::size_t j = 0; j < sol.support.size(); ++j)
        approx += fit.coeffs(j, 0) * dict_of(i).col(sol.support[j]);
      residual[i] = problem.measurements[i] - approx;
      res2 += residual[i].squaredNorm();
    }
    sol.residual_norm = std::sqrt(res2);
    ++sol.iterations;
  }
  return sol;
}

SparseSolution fista_bpdn(const SparseProblem& problem) {
  if (problem.dictionaries.size() != 1 || problem.measurements.size() != 1)
    throw SparseError("fista_bpdn expects a single dictionary and measurement");
  if (problem.lambda <= 0.0) throw SparseError("fista_bpdn needs lambda > 0");
  const MatrixXcd& a = problem.dictionaries[0];
  const VectorXcd& y = problem.measurements[0];
  const double lambda = problem.lambda;

  // Squared spectral norm by power iteration on A^H A.
  VectorXcd v = VectorXcd::Ones(a.cols());
  v.normalize();
  double lip = 1.0;
  for (int it = 0; it < 100; ++it) {
    VectorXcd w = a.adjoint() * (a * v);
    const double nw = w.norm();
    if (nw == 0.0) break;
    const double prev = lip;
    lip = nw;
    v = w / nw;
    if (std::abs(lip - prev) <= 1e-12 * lip) break;
  }
  lip = std::max(lip * 1.01, 1e-300);

  const auto soft = [&](const VectorXcd& w, double thr) {
    VectorXcd out(w.size());
    for (Eigen::Index n = 0; n < w.size(); ++n) {
      const double mag = std::abs(w[n]);
      out[n] = mag <= thr ? cxd{0.0, 0.0} : w[n] * ((mag - thr) / mag);
    }
    return out;
  };
  const auto objective = [&](const VectorXcd& x) {
    return 0.5 * (a * x - y).squaredNorm() + lambda * x.lpNorm<1>();
  };

  VectorXcd x = VectorXcd::Zero(a.cols());
  VectorXcd z = x;
  double t = 1.0;
  double fx = objective(x);

  SparseSolution sol;
  sol.converged = false;
  const int max_iter = 5000;
  int it = 0;
  int small_changes = 0;  // momentum can stall briefly; require a steady stop
  for (; it < max_iter; ++it) {
    VectorXcd grad = a.adjoint() * (a * z - y);
    VectorXcd x_next = soft(z - grad / lip, lambda / lip);
    double f_next = objective(x_next);
    if (f_next > fx) {
      // Monotone restart: drop the momentum and take a plain proximal step,
      // which cannot increase the objective.
      grad = a.adjoint() * (a * x - y);
      x_next = soft(x - grad / lip, lambda / lip);
      f_next = objective(x_next);
      t = 1.0;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = x_next + ((t - 1.0) / t_next) * (x_next - x);
    if (std::abs(fx - f_next) <= 1e-10 * std::max(1.0, std::abs(fx)))
      ++small_changes;
    else
      small_changes = 0;
    x = x_next;
    fx = f_next;
    t = t_next;
    if (small_changes >= 3) {
      sol.converged = true;
      ++it;
      break;
    }
  }
  sol.iterations = it;

  const double peak = x.cwiseAbs().maxCoeff();
  const double thr = 1e-3 * peak;
  for (Eigen::Index n = 0; n < x.size(); ++n)
    if (peak > 0.0 && std::abs(x[n]) > thr) sol.support.push_back(static_cast<int>(n));
  sol.coefficients.resize(sol.support.size(), 1);
  for (std::size_t j = 0; j < sol.support.size(); ++j)
    sol.coefficients(j, 0) = x[sol.support[j]];
  sol.residual_norm = (a * x - y).norm();
  sol.objective = fx;
  return sol;
}

}  // namespace dfrc
