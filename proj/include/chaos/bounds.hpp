#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chaos/partition.hpp"
#include "chaos/tensor.hpp"

namespace chaos {

/// Parameters of the moment and tail bound evaluators. The universal
/// constants are not known numerically and default to 1.
struct BoundParams {
  int k = 1;
  int M = 1;
  double R = 1.0;
  double C = 1.0;
  double C1 = 1.0;
  double C2 = 1.0;
  double C_tilde = 1.0;

  void validate() const;
};

/// v[s-1] = V_s for s = 1..k.

/// C^M V_1^{2M} max(M, M^k max_{2<=s<=k} (V_s/V_1)^{2/(s-1)})^M.
double moment_bound_main(std::span<const double> v, const BoundParams& p);
double moment_bound_main(const NormProfile& profile, const BoundParams& p);

/// The exponent min(x^2/V_1^2, min_{2<=s<=k} (x / (V_1^{(s-2)/(s-1)} V_s^{1/(s-1)}))^{2/k})
/// without the constant C2. An s-term with a zero denominator is +infinity.
double tail_exponent_main(std::span<const double> v, double x);

/// C1 exp(-C2 * tail_exponent_main).
double tail_bound_main(std::span<const double> v, const BoundParams& p, double x);
double tail_bound_main(const NormProfile& profile, const BoundParams& p, double x);

/// The integer M closest to C_tilde * tail_exponent_main (at least 1), used
/// when the tail bound is derived from the moment bound by Markov's inequality.
int markov_moment_choice(std::span<const double> v, const BoundParams& p, double x);

/// C exp(-(1/2) (x/V_1)^{2/k}).
double tail_bound_theorem_a(double v1, const BoundParams& p, double x);

/// C (2kM/e)^{kM} V_1^{2M}.
double moment_bound_theorem_a(double v1, const BoundParams& p);

/// C1 exp(-min(C2 x/opnorm, C2 x^2/lambda^2)).
double hanson_wright_bound(double lambda, double opnorm, const BoundParams& p, double x);

enum class HypothesisStatus { ok, hypothesis_violated };

struct SimplifiedCheck {
  HypothesisStatus status = HypothesisStatus::ok;
  std::vector<std::string> violations;
  double moment = 0.0;
  /// Smallest C with moment <= C^M M^{kM} R^{2M}.
  double c_star = 0.0;
  std::vector<double> v;
  bool heuristic = false;  // some V_s with s >= 3 is a lower bound only
};

/// Checks V_s <= R^{s-1} for all s and R >= M^{-(k-1)/2}, then computes the
/// exact moment E Z^{2M} and the minimal constant.
SimplifiedCheck simplified_theorem_check(const CoefficientTensor& a, int M, double R,
                                         const NormOptions& opts = {});

struct ProfileCount {
  std::uint64_t exact = 0;
  double bound = 0.0;
};

/// Number of partitions of {1..2M} whose block sizes form the multiset t,
/// with the bound prod (2M)^{t_r - 1} / (t_r - 1)!.
ProfileCount partition_profile_count(int M, std::vector<int> t);

}  // namespace chaos
