#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"

#include "chaos/error.hpp"
#include "chaos/gauss.hpp"
#include "chaos/numeric.hpp"
#include "chaos/rng.hpp"
#include "support.hpp"

using namespace chaos;
using testing::random_tensor;

namespace {

/// Golub-Welsch nodes and weights for the standard normal weight.
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) j(i, i - 1) = j(i - 1, i) = std::sqrt(static_cast<double>(i));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    weights[static_cast<std::size_t>(i)] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
}

double chi2_1_tail(double y) { return std::erfc(std::sqrt(y / 2.0)); }

}  // namespace

TEST_CASE("Hermite values") {
  CHECK(hermite(0, 3.0) == 1.0);
  CHECK(hermite(1, 3.0) == 3.0);
  CHECK(hermite(2, 0.0) == -1.0);
  CHECK(hermite(3, 2.0) == doctest::Approx(2.0));
  CHECK(hermite(4, 1.0) == doctest::Approx(1.0 - 6.0 + 3.0));
  for (int l = 0; l <= 8; ++l) {
    const auto c = hermite_coefficients(l);
    REQUIRE(c.size() == static_cast<std::size_t>(l + 1));
    for (double x : {-1.3, 0.2, 2.5}) {
      double v = 0.0;
      for (int i = l; i >= 0; --i) v = v * x + c[static_cast<std::size_t>(i)];
      CHECK(v == doctest::Approx(hermite(l, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Hermite orthogonality by quadrature") {
  std::vector<double> x, w;
  gauss_hermite(20, x, w);
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * hermite(a, x[i]) * hermite(b, x[i]);
      const double expect = a == b ? static_cast<double>(factorial_u64(a)) : 0.0;
      CHECK(std::fabs(s - expect) <= 1e-10 * std::max(1.0, expect));
    }
}

TEST_CASE("Wick polynomial evaluation") {
  const auto a1 = CoefficientTensor::from_map(1, 1, {{{0}, 1.0}});
  const double t[] = {1.7};
  CHECK(evaluate_Z(a1, t) == doctest::Approx(1.7));
  const auto a2 = CoefficientTensor::from_map(2, 1, {{{0, 0}, 1.0}});
  CHECK(evaluate_Z(a2, t) == doctest::Approx(1.7 * 1.7 - 1.0));
  CounterRng rng(3, 3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = random_tensor(3, 3, 40 + seed);
    const ChaosPolynomial z(a);
    const auto poly = MonomialExpansion::from_chaos(a);
    CHECK(poly.degree() <= 3);
    for (int i = 0; i < 10; ++i) {
      const double xs[] = {rng.normal(), rng.normal(), rng.normal()};
      CHECK(std::fabs(z(xs) - poly(xs)) <= 1e-10 * std::max(1.0, std::fabs(poly(xs))));
    }
  }
}

TEST_CASE("Isserlis oracle examples") {
  const auto a = CoefficientTensor::from_map(1, 2, {{{0}, 0.6}, {{1}, 0.8}});
  CHECK(isserlis_moment(a, 4) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(isserlis_moment(a, 3) == 0.0);
  const double r = 1.0 / std::sqrt(2.0);
  const auto b = CoefficientTensor::from_map(2, 2, {{{0, 1}, r}, {{1, 0}, r}});
  CHECK(isserlis_moment(b, 2) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(isserlis_moment(symmetrize(b), 2) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(isserlis_moment(random_tensor(3, 2, 1), 5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(isserlis_moment(random_tensor(3, 2, 1), 6), CapExceeded);
  CHECK_THROWS_AS(isserlis_moment(random_tensor(2, 5, 1), 2), CapExceeded);
  // Product rule on a monomial: E xi^4 xi'^2 = 3.
  MonomialExpansion m(2);
  m.add({4, 2}, 1.0);
  CHECK(m.gaussian_expectation() == 3.0);
}

TEST_CASE("Monte Carlo moments") {
  const std::size_t count = 200000;
  const auto a = CoefficientTensor::from_map(1, 1, {{{0}, 1.0}});
  const auto s = sample_Z(a, count, 11);
  double mean = 0.0, sq = 0.0;
  for (double v : s) {
    mean += v;
    sq += v * v;
  }
  mean /= count;
  const double var = sq / count - mean * mean;
  CHECK(std::fabs(mean) <= 4.0 / std::sqrt(count));
  CHECK(std::fabs(var - 1.0) <= 5.0 / std::sqrt(count));

  const double r = 1.0 / std::sqrt(2.0);
  const auto b = CoefficientTensor::from_map(2, 2, {{{0, 1}, r}, {{1, 0}, r}});
  const auto sb = sample_Z(b, count, 12);
  double m2 = 0.0;
  for (double v : sb) m2 += v * v;
  m2 /= count;
  const double sd = std::sqrt((isserlis_moment(b, 4) - 4.0) / count);
  CHECK(std::fabs(m2 - isserlis_moment(b, 2)) <= 5.0 * sd);
}

TEST_CASE("sampling is deterministic and worker independent") {
  const auto a = random_tensor(2, 3, 9);
  const auto one = sample_Z(a, 5000, 77, 1);
  CHECK(one == sample_Z(a, 5000, 77, 1));
  CHECK(one == sample_Z(a, 5000, 77, 3));
  CHECK(one != sample_Z(a, 5000, 78, 1));
}

TEST_CASE("empirical tail") {
  const auto a = CoefficientTensor::from_map(1, 1, {{{0}, 1.0}});
  const auto s = sample_Z(a, 400000, 5);
  const double grid[] = {0.0, 0.5, 1.0, 1.96, 3.0};
  const auto rows = empirical_tail(s, grid);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].p_hat == 1.0);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].p_hat <= rows[i - 1].p_hat);
  const double exact = std::erfc(1.96 / std::sqrt(2.0));
  CHECK(std::fabs(rows[3].p_hat - exact) <= 2.0 * rows[3].ci_half);
  CHECK(rows[3].ci_half > 0.0);
}

TEST_CASE("grid parsing") {
  const auto g = parse_grid("0:0.5:2");
  REQUIRE(g.size() == 5);
  CHECK(g.back() == doctest::Approx(2.0));
  CHECK(parse_grid("1:1:1").size() == 1);
  CHECK_THROWS(parse_grid("0:0:1"));
  CHECK_THROWS(parse_grid("0-1"));
  CHECK_THROWS(parse_grid("2:1:1"));
}

TEST_CASE("log normal tail") {
  for (double t = -3.0; t <= 37.0; t += 0.25) {
    const double exact = std::log(0.5 * std::erfc(t / std::sqrt(2.0)));
    CHECK(log_normal_tail(t) == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK(std::isfinite(log_normal_tail(1e4)));
}

TEST_CASE("exact tails of Hermite polynomials") {
  const double g1[] = {1.96};
  CHECK(sharpness_probe(1, g1)[0].tail == doctest::Approx(std::erfc(1.96 / std::sqrt(2.0))).epsilon(1e-12));
  const double g2[] = {0.3, 0.9, 2.0, 10.0};
  const auto rows = sharpness_probe(2, g2);
  for (const auto& row : rows) {
    double expect = chi2_1_tail(1.0 + row.x);
    if (row.x < 1.0) expect += 1.0 - chi2_1_tail(1.0 - row.x);
    CHECK(row.tail == doctest::Approx(expect).epsilon(1e-12));
  }
  const double far[] = {1000.0};
  CHECK(sharpness_probe(2, far)[0].ratio == doctest::Approx(1.0).epsilon(0.1));
  CHECK(sharpness_probe(3, far)[0].ratio == doctest::Approx(1.0).epsilon(0.15));
  CHECK_THROWS(sharpness_probe(6, far));
}

TEST_CASE("real roots by Sturm sequences") {
  const auto r = real_roots(hermite_coefficients(3));
  REQUIRE(r.size() == 3);
  CHECK(r[0] == doctest::Approx(-std::sqrt(3.0)));
  CHECK(r[1] == doctest::Approx(0.0));
  CHECK(r[2] == doctest::Approx(std::sqrt(3.0)));
  CHECK(real_roots({1.0, 0.0, 1.0}).empty());
  const auto h5 = real_roots(hermite_coefficients(5));
  CHECK(h5.size() == 5);
  for (double x : h5) CHECK(std::fabs(hermite(5, x)) <= 1e-9);
}
