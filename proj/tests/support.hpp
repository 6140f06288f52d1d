#pragma once

#include <cmath>
#include <vector>

#include "chaos/rng.hpp"
#include "chaos/tensor.hpp"
#include "chaos/verify.hpp"

namespace testing {

/// All index tuples of the given order over [0, dim), lexicographic.
inline std::vector<chaos::IndexTuple> all_indices(int order, int dim) {
  std::vector<chaos::IndexTuple> out;
  chaos::IndexTuple idx(static_cast<std::size_t>(order), 0);
  for (;;) {
    out.push_back(idx);
    int a = order - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == dim) idx[static_cast<std::size_t>(a--)] = 0;
    if (a < 0) break;
  }
  return out;
}

inline chaos::CoefficientTensor random_tensor(int order, int dim, std::uint64_t seed, double density = 0.7) {
  chaos::CounterRng rng(seed, 0x7e57);
  return chaos::random_sparse_tensor(order, dim, density, rng);
}

inline bool close(double a, double b, double rel, double abs = 0.0) {
  return std::fabs(a - b) <= std::max(abs, rel * std::max(std::fabs(a), std::fabs(b)));
}

}  // namespace testing

namespace testing {

/// sup over unit u, v, w in R^2 of sum a(i,j,l) u_i v_j w_l for an order-3,
/// dim-2 tensor: grid over the angles of u and v (w is optimal in closed
/// form), then a shrinking-step local search around the best grid point.
inline double injective_norm_grid(const chaos::CoefficientTensor& a) {
  const double pi = 3.14159265358979323846;
  auto value = [&](double t1, double t2) {
    const double u[2] = {std::cos(t1), std::sin(t1)};
    const double v[2] = {std::cos(t2), std::sin(t2)};
    double w[2] = {0.0, 0.0};
    for (const auto& [idx, x] : a.entries()) w[idx[2]] += x * u[idx[0]] * v[idx[1]];
    return std::sqrt(w[0] * w[0] + w[1] * w[1]);
  };
  const int steps = 720;
  double best = -1.0, b1 = 0.0, b2 = 0.0;
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j) {
      const double t1 = pi * i / steps, t2 = pi * j / steps;
      const double f = value(t1, t2);
      if (f > best) {
        best = f;
        b1 = t1;
        b2 = t2;
      }
    }
  for (double h = pi / steps; h > 1e-13; h *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (int d1 = -1; d1 <= 1; ++d1)
        for (int d2 = -1; d2 <= 1; ++d2) {
          const double f = value(b1 + d1 * h, b2 + d2 * h);
          if (f > best) {
            best = f;
            b1 += d1 * h;
            b2 += d2 * h;
            moved = true;
          }
        }
    }
  }
  return best;
}

}  // namespace testing
