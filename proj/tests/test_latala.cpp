#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "doctest.h"

#include "chaos/error.hpp"
#include "chaos/latala.hpp"
#include "chaos/rng.hpp"
#include "support.hpp"

using namespace chaos;
using testing::random_tensor;

namespace {

double svd_top(const std::vector<double>& m, int n) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = m[static_cast<std::size_t>(i * n + j)];
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
}

std::vector<double> normals(CounterRng& rng, int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = rng.normal();
  return x;
}

}  // namespace

TEST_CASE("hypothesis checks") {
  for (int M : {1, 4, 16}) {
    const auto a = scale(rank_one_instance(3), 1.0 / M);
    CHECK(check_hypotheses(a, M).all_ok());
  }
  CHECK(check_hypotheses(CoefficientTensor(3, 3), 4).all_ok());
  // a(1, j, j) = 1/sqrt(n): unit Frobenius norm but the {1},{2,3} norm is 1.
  const int n = 3;
  CoefficientTensor::Entries e;
  for (int j = 0; j < n; ++j) e[{0, j, j}] = 1.0 / std::sqrt(n);
  const auto h = check_hypotheses(CoefficientTensor::from_map(3, n, e), 4);
  CHECK(h.v1_ok);
  CHECK_FALSE(h.all_ok());
  CHECK(h.R == doctest::Approx(0.5));
  REQUIRE(h.two_block.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    if (h.two_block[i].to_string() == "{1},{2,3}") {
      CHECK(h.two_block_norms[i] == doctest::Approx(1.0));
      CHECK_FALSE(h.two_block_ok[i]);
    }
  CHECK_THROWS_AS(check_hypotheses(random_tensor(2, 3, 1), 4), InvalidArgument);
}

TEST_CASE("conditioned matrix") {
  const auto a = random_tensor(3, 3, 8);
  const std::vector<double> zero(3, 0.0), e1{1.0, 0.0, 0.0};
  for (double v : conditioned_matrix(a, zero)) CHECK(v == 0.0);
  const auto s = conditioned_matrix(a, e1);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) CHECK(s[static_cast<std::size_t>(j * 3 + k)] == a.at({0, j, k}));
  CounterRng rng(1, 2);
  const auto x = normals(rng, 3);
  const auto m = conditioned_matrix(a, x);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      double expect = 0.0;
      for (int i = 0; i < 3; ++i) expect += a.at({i, j, k}) * x[static_cast<std::size_t>(i)];
      CHECK(m[static_cast<std::size_t>(j * 3 + k)] == doctest::Approx(expect).epsilon(1e-14));
    }
  CHECK_THROWS_AS(conditioned_matrix(a, std::vector<double>{1.0}), InvalidArgument);
}

TEST_CASE("suprema") {
  const auto a = random_tensor(3, 4, 9);
  const std::vector<double> zero(4, 0.0), e1{1.0, 0.0, 0.0, 0.0};
  CHECK(sup_X(a, zero) == 0.0);
  CHECK(sup_Y(a, zero) == 0.0);
  double slice = 0.0;
  for (const auto& [idx, v] : a.entries())
    if (idx[0] == 0) slice += v * v;
  CHECK(sup_X(a, e1) == doctest::Approx(std::sqrt(slice)).epsilon(1e-14));
  CounterRng rng(4, 4);
  for (int t = 0; t < 20; ++t) {
    const auto x = normals(rng, 4);
    const double y = sup_Y(a, x);
    CHECK(y == doctest::Approx(svd_top(conditioned_matrix(a, x), 4)).epsilon(1e-8));
    CHECK(y <= sup_X(a, x) * (1 + 1e-12));
  }
  // Rank one: |<u,x>| |v| |w|.
  const std::vector<double> u{0.6, 0.8}, v{1.0, 2.0}, w{0.0, 3.0};
  CoefficientTensor::Entries e;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        if (u[i] * v[j] * w[k] != 0.0) e[{i, j, k}] = u[i] * v[j] * w[k];
  const auto r1 = CoefficientTensor::from_map(3, 2, e);
  const std::vector<double> x{1.5, -0.5};
  CHECK(sup_Y(r1, x) == doctest::Approx(std::fabs(0.9 - 0.4) * std::sqrt(5.0) * 3.0).epsilon(1e-12));
}

TEST_CASE("second moments of the suprema") {
  const auto a = random_tensor(3, 3, 12);
  const double v1 = frobenius_norm(a);
  CHECK(std::fabs(expected_sup_X_squared(a) - v1 * v1) <= 1e-12);
  CounterRng rng(9, 9);
  const std::size_t count = 100000;
  const std::vector<double> v{0.6, 0.0, 0.8}, w{0.0, 1.0, 0.0};
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto x = normals(rng, 3);
    const double s = sup_X(a, x);
    sx += s * s;
    const auto m = conditioned_matrix(a, x);
    double y = 0.0;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) y += m[static_cast<std::size_t>(j * 3 + k)] * v[j] * w[k];
    sy += y * y;
  }
  // sup_X^2 is a Gaussian quadratic form with variance <= 2 V_1^4.
  CHECK(std::fabs(sx / count - v1 * v1) <= 5.0 * std::sqrt(2.0 / count) * v1 * v1);
  const double ey = expected_Y_squared(a, v, w);
  CHECK(std::fabs(sy / count - ey) <= 5.0 * std::sqrt(2.0 / count) * ey);
}

TEST_CASE("sup_Y expectation estimates") {
  const auto z = estimate_sup_Y_expectation(CoefficientTensor(3, 2), 4, 1000, 1);
  CHECK(z.mean == 0.0);
  CHECK(z.order_violations == 0);
  const int M = 4;
  const auto a = scale(rank_one_instance(3), 1.0 / M);
  const auto est = estimate_sup_Y_expectation(a, M, 50000, 3);
  CHECK(est.hypotheses_ok);
  CHECK(est.order_violations == 0);
  const double exact = std::sqrt(2.0 / std::numbers::pi) / M;
  CHECK(std::fabs(est.mean - exact) <= 2.0 * est.ci);
  CHECK(est.ratio_Mhalf == doctest::Approx(est.mean * 2.0));
  CHECK(est.ratio_Mquarter == doctest::Approx(est.mean * std::sqrt(2.0)));
  const auto again = estimate_sup_Y_expectation(a, M, 50000, 3, 3);
  CHECK(again.mean == est.mean);
}

TEST_CASE("generators and rescaling") {
  const auto r = random_sparse_instance(3, 0.5, 4);
  CHECK(frobenius_norm(r) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r == random_sparse_instance(3, 0.5, 4));
  const int n = 3;
  const auto q = orthogonal_slices_instance(n, 5);
  CHECK(frobenius_norm(q) == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < n; ++i) {
    // Q_i / n has orthogonal columns of length 1/n.
    for (int c1 = 0; c1 < n; ++c1)
      for (int c2 = 0; c2 < n; ++c2) {
        double dot = 0.0;
        for (int j = 0; j < n; ++j) dot += q.at({i, j, c1}) * q.at({i, j, c2});
        CHECK(dot == doctest::Approx(c1 == c2 ? 1.0 / (n * n) : 0.0).epsilon(1e-12));
      }
  }
  for (const auto& inst : {rank_one_instance(3), r, q})
    for (int M : {4, 16, 64}) {
      const auto scaled = scale(inst, hypothesis_scale(inst, M));
      CHECK(check_hypotheses(scaled, M).all_ok());
    }
  CHECK_THROWS_AS(random_sparse_instance(3, 0.0, 1), InvalidArgument);
}
