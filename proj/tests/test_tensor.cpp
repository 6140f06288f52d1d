#include <algorithm>
#include <numeric>

#include "doctest.h"

#include "chaos/error.hpp"
#include "chaos/tensor.hpp"
#include "support.hpp"

using namespace chaos;
using testing::all_indices;
using testing::random_tensor;

TEST_CASE("construction validates keys and drops zeros") {
  auto t = CoefficientTensor::from_map(2, 3, {{{0, 1}, 2.0}, {{2, 2}, 0.0}});
  CHECK(t.nnz() == 1);
  CHECK(t.at({0, 1}) == 2.0);
  CHECK(t.at({1, 0}) == 0.0);
  CHECK_THROWS_AS(CoefficientTensor::from_map(2, 3, {{{0, 3}, 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(CoefficientTensor::from_map(2, 3, {{{0}, 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(CoefficientTensor::from_entries(1, 2, {{{0}, 1.0}, {{0}, 2.0}}), InvalidArgument);
  CHECK(CoefficientTensor::scalar(3.5).scalar_value() == 3.5);
}

TEST_CASE("dense round trip") {
  const auto t = random_tensor(3, 3, 11);
  const auto d = DenseTensor::from_sparse(t);
  CHECK(d.size() == 27);
  CHECK(d[1 * 9 + 2 * 3 + 0] == t.at({1, 2, 0}));
  CHECK(max_abs_difference(d.to_sparse(), t) == 0.0);
}

TEST_CASE("frobenius norm of a small tensor") {
  auto t = CoefficientTensor::from_map(2, 2, {{{0, 0}, 3.0}, {{1, 1}, 4.0}});
  CHECK(frobenius_norm(t) == doctest::Approx(5.0));
  CHECK(frobenius_norm(scale(t, -2.0)) == doctest::Approx(10.0));
}

TEST_CASE("symmetrize averages over axis permutations") {
  for (int order = 1; order <= 4; ++order) {
    const auto t = random_tensor(order, 3, 100 + static_cast<std::uint64_t>(order));
    const auto s = symmetrize(t);
    CHECK(s.symmetric());
    CHECK(is_symmetric(s, 1e-14));
    std::vector<int> perm(static_cast<std::size_t>(order));
    for (const auto& idx : all_indices(order, 3)) {
      std::iota(perm.begin(), perm.end(), 0);
      double sum = 0.0;
      int count = 0;
      do {
        IndexTuple j(idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a) j[a] = idx[static_cast<std::size_t>(perm[a])];
        sum += t.at(j);
        ++count;
      } while (std::next_permutation(perm.begin(), perm.end()));
      CHECK(s.at(idx) == doctest::Approx(sum / count).epsilon(1e-13));
    }
  }
}

TEST_CASE("symmetrize leaves symmetric input unchanged") {
  const auto s = symmetrize(random_tensor(3, 2, 5));
  CHECK(max_abs_difference(symmetrize(s), s) == 0.0);
  CHECK(frobenius_norm(symmetrize(random_tensor(2, 3, 6))) <= frobenius_norm(random_tensor(2, 3, 6)) + 1e-15);
}

TEST_CASE("group_contract matches nested loops") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = random_tensor(3, 3, 200 + seed);
    const auto b = random_tensor(2, 3, 300 + seed);
    // Contract a's axis 1 with b's axis 0: result axes (a0, a2, b1).
    const AxisPair pairs[] = {{1, 0}};
    const auto c = group_contract(a, b, pairs);
    REQUIRE(c.order() == 3);
    const auto dc = contract(DenseTensor::from_sparse(a), DenseTensor::from_sparse(b), pairs);
    for (const auto& idx : all_indices(3, 3)) {
      double expect = 0.0;
      for (int l = 0; l < 3; ++l) expect += a.at({idx[0], l, idx[1]}) * b.at({l, idx[2]});
      CHECK(c.at(idx) == doctest::Approx(expect).epsilon(1e-13));
      CHECK(dc[static_cast<std::size_t>(idx[0] * 9 + idx[1] * 3 + idx[2])] == doctest::Approx(expect).epsilon(1e-13));
    }
  }
}

TEST_CASE("full contraction is the inner product") {
  const auto a = random_tensor(2, 3, 1);
  const auto b = random_tensor(2, 3, 2);
  const AxisPair pairs[] = {{0, 1}, {1, 0}};
  double expect = 0.0;
  for (const auto& idx : all_indices(2, 3)) expect += a.at(idx) * b.at({idx[1], idx[0]});
  CHECK(group_contract(a, b, pairs).scalar_value() == doctest::Approx(expect));
  const AxisPair bad[] = {{0, 0}, {0, 1}};
  CHECK_THROWS_AS(group_contract(a, b, bad), InvalidArgument);
}

TEST_CASE("outer product and axis permutation") {
  const auto a = random_tensor(1, 3, 7);
  const auto b = random_tensor(2, 3, 8);
  const auto o = outer_product(a, b);
  for (const auto& idx : all_indices(3, 3)) CHECK(o.at(idx) == a.at({idx[0]}) * b.at({idx[1], idx[2]}));
  const int perm[] = {2, 0, 1};
  const auto p = permute_axes(o, perm);
  const auto dp = permute_axes(DenseTensor::from_sparse(o), perm);
  for (const auto& idx : all_indices(3, 3)) {
    // result axis t is input axis perm[t]
    IndexTuple j(3);
    for (int t = 0; t < 3; ++t) j[static_cast<std::size_t>(perm[t])] = idx[static_cast<std::size_t>(t)];
    CHECK(p.at(idx) == o.at(j));
    CHECK(dp[static_cast<std::size_t>(idx[0] * 9 + idx[1] * 3 + idx[2])] == o.at(j));
  }
}
