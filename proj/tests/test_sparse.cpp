#include <doctest.h>

#include <cmath>

#include "dfrc/rng.hpp"
#include "dfrc/sparse.hpp"

using namespace dfrc;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

MatrixXcd random_unit_dict(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  MatrixXcd a(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) a(r, c) = rng.complex_gaussian();
    a.col(c).normalize();
  }
  return a;
}

/// Plain ISTA reference for the basis-pursuit objective.
VectorXcd ista_reference(const MatrixXcd& a, const VectorXcd& y, double lambda,
                         int iters) {
  Eigen::JacobiSVD<MatrixXcd> svd(a);
  const double lip = svd.singularValues()[0] * svd.singularValues()[0] * 1.01;
  VectorXcd x = VectorXcd::Zero(a.cols());
  for (int k = 0; k < iters; ++k) {
    const VectorXcd w = x - a.adjoint() * (a * x - y) / lip;
    for (Eigen::Index n = 0; n < x.size(); ++n) {
      const double mag = std::abs(w[n]);
      x[n] = mag <= lambda / lip ? cxd{0, 0} : w[n] * ((mag - lambda / lip) / mag);
    }
  }
  return x;
}

double objective(const MatrixXcd& a, const VectorXcd& y, double lambda,
                 const VectorXcd& x) {
  return 0.5 * (a * x - y).squaredNorm() + lambda * x.lpNorm<1>();
}

}  // namespace

TEST_CASE("omp on the identity dictionary") {
  SparseProblem p;
  p.dictionaries.push_back(MatrixXcd::Identity(8, 8));
  VectorXcd y = VectorXcd::Zero(8);
  y[3] = {1.0, 0.0};
  p.measurements.push_back(y);
  p.sparsity = 3;
  const SparseSolution sol = omp(p);
  CHECK(sol.support == std::vector<int>{3});
  CHECK(std::abs(sol.coefficients(0, 0) - cxd{1.0, 0.0}) < 1e-12);
  CHECK(sol.residual_norm < 1e-12);
}

TEST_CASE("omp recovers planted supports") {
  int hits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const MatrixXcd dict = random_unit_dict(20, 50, 1000 + trial);
    Rng rng(5000 + trial);
    std::vector<int> want;
    while (want.size() < 3) {
      const int n = static_cast<int>(rng.uniform_below(50));
      if (std::find(want.begin(), want.end(), n) == want.end()) want.push_back(n);
    }
    std::sort(want.begin(), want.end());
    VectorXcd y = VectorXcd::Zero(20);
    for (int n : want) y += dict.col(n) * (rng.complex_gaussian() + cxd{2.0, 0.0});
    SparseProblem p;
    p.dictionaries.push_back(dict);
    p.measurements.push_back(y);
    p.sparsity = 3;
    if (omp(p).support == want) ++hits;
  }
  CHECK(hits >= 99);
}

TEST_CASE("omp zero measurement") {
  SparseProblem p;
  p.dictionaries.push_back(random_unit_dict(6, 10, 1));
  p.measurements.push_back(VectorXcd::Zero(6));
  const SparseSolution sol = omp(p);
  CHECK(sol.support.empty());
  CHECK(sol.iterations == 0);
  CHECK(sol.residual_norm == 0.0);
}

TEST_CASE("omp residual decreases strictly") {
  const MatrixXcd dict = random_unit_dict(30, 40, 2);
  Rng rng(3);
  VectorXcd y(30);
  for (int r = 0; r < 30; ++r) y[r] = rng.complex_gaussian();
  SparseProblem p;
  p.dictionaries.push_back(dict);
  p.measurements.push_back(y);
  double prev = y.norm();
  for (int k = 1; k <= 10; ++k) {
    p.sparsity = k;
    const double res = omp(p).residual_norm;
    CHECK(res < prev);
    prev = res;
  }
}

TEST_CASE("omp support invariant to unit-modulus scaling") {
  const MatrixXcd dict = random_unit_dict(20, 50, 77);
  Rng rng(78);
  VectorXcd y = VectorXcd::Zero(20);
  y += dict.col(7) * cxd{2.0, 1.0};
  y += dict.col(30) * cxd{-1.0, 2.5};
  SparseProblem p;
  p.dictionaries.push_back(dict);
  p.measurements.push_back(y);
  p.sparsity = 2;
  const auto base = omp(p).support;
  p.measurements[0] = y * std::polar(1.0, 1.234);
  CHECK(omp(p).support == base);
}

TEST_CASE("group omp") {
  SUBCASE("reduces to omp with identical dictionaries and measurements") {
    const MatrixXcd dict = random_unit_dict(16, 32, 11);
    Rng rng(12);
    VectorXcd y = dict.col(4) * cxd{1.5, 0.2} + dict.col(20) * cxd{0.0, -2.0};
    SparseProblem single;
    single.dictionaries.push_back(dict);
    single.measurements.push_back(y);
    single.sparsity = 2;
    SparseProblem grp = single;
    grp.measurements.push_back(y);
    grp.dictionaries.push_back(dict);
    CHECK(group_omp(grp).support == omp(single).support);
    CHECK(group_omp(single).support == omp(single).support);
  }
  SUBCASE("recovers a joint row support across varying dictionaries") {
    for (int trial = 0; trial < 10; ++trial) {
      Rng rng(400 + trial);
      std::vector<int> want;
      while (want.size() < 5) {
        const int n = static_cast<int>(rng.uniform_below(32));
        if (std::find(want.begin(), want.end(), n) == want.end()) want.push_back(n);
      }
      std::sort(want.begin(), want.end());
      SparseProblem p;
      for (int i = 0; i < 64; ++i) {
        MatrixXcd h(16, 32);
        for (int r = 0; r < 16; ++r)
          for (int c = 0; c < 32; ++c) h(r, c) = rng.complex_gaussian();
        VectorXcd x = VectorXcd::Zero(32);
        for (int n : want) x[n] = rng.complex_gaussian();
        p.dictionaries.push_back(h);
        p.measurements.push_back(h * x);
      }
      p.sparsity = 5;
      CHECK(group_omp(p).support == want);
    }
  }
}

TEST_CASE("fista basis pursuit") {
  SUBCASE("large lambda gives the zero solution") {
    const MatrixXcd a = random_unit_dict(12, 24, 21);
    Rng rng(22);
    VectorXcd y(12);
    for (int r = 0; r < 12; ++r) y[r] = rng.complex_gaussian();
    SparseProblem p;
    p.dictionaries.push_back(a);
    p.measurements.push_back(y);
    p.lambda = (a.adjoint() * y).cwiseAbs().maxCoeff() * 1.001;
    const SparseSolution sol = fista_bpdn(p);
    CHECK(sol.support.empty());
    CHECK(sol.residual_norm == doctest::Approx(y.norm()));
  }
  SUBCASE("orthonormal dictionary matches the closed form") {
    Rng rng(31);
    MatrixXcd g(16, 16);
    for (int r = 0; r < 16; ++r)
      for (int c = 0; c < 16; ++c) g(r, c) = rng.complex_gaussian();
    const MatrixXcd q = Eigen::HouseholderQR<MatrixXcd>(g).householderQ();
    VectorXcd y(16);
    for (int r = 0; r < 16; ++r) y[r] = rng.complex_gaussian();
    const double lambda = 0.3;
    SparseProblem p;
    p.dictionaries.push_back(q);
    p.measurements.push_back(y);
    p.lambda = lambda;
    const SparseSolution sol = fista_bpdn(p);
    VectorXcd x = VectorXcd::Zero(16);
    for (std::size_t j = 0; j < sol.support.size(); ++j)
      x[sol.support[j]] = sol.coefficients(j, 0);
    const VectorXcd corr = q.adjoint() * y;
    VectorXcd closed(16);
    double peak = 0.0;
    for (int n = 0; n < 16; ++n) {
      const double mag = std::abs(corr[n]);
      closed[n] = mag <= lambda ? cxd{0, 0} : corr[n] * ((mag - lambda) / mag);
      peak = std::max(peak, std::abs(closed[n]));
    }
    for (int n = 0; n < 16; ++n) {
      // entries below the reporting cut are dropped from the support
      if (std::abs(closed[n]) <= 1e-3 * peak) continue;
      CHECK(std::abs(x[n] - closed[n]) < 1e-6);
    }
  }
  SUBCASE("matches ista on generic problems") {
    for (std::uint64_t seed : {51u, 52u}) {
      const MatrixXcd a = random_unit_dict(50, 100, seed);
      Rng rng(seed + 10);
      VectorXcd y(50);
      for (int r = 0; r < 50; ++r) y[r] = rng.complex_gaussian();
      const double lambda = 0.1;
      SparseProblem p;
      p.dictionaries.push_back(a);
      p.measurements.push_back(y);
      p.lambda = lambda;
      const SparseSolution sol = fista_bpdn(p);
      const VectorXcd ref = ista_reference(a, y, lambda, 20000);
      CHECK(sol.objective - objective(a, y, lambda, ref) < 1e-6);
    }
  }
}

TEST_CASE("shape validation") {
  SparseProblem p;
  CHECK_THROWS_AS(omp(p), SparseError);
  p.dictionaries.push_back(MatrixXcd::Identity(4, 4));
  p.measurements.push_back(VectorXcd::Zero(5));
  CHECK_THROWS_AS(omp(p), SparseError);
  p.measurements[0] = VectorXcd::Zero(4);
  p.lambda = 0.0;
  CHECK_THROWS_AS(fista_bpdn(p), SparseError);
}
