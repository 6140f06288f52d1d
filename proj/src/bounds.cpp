#include "chaos/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chaos/error.hpp"
#include "chaos/moments.hpp"

namespace chaos {

void BoundParams::validate() const {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (M < 1) throw InvalidArgument("M must be >= 1");
  if (!(R >= 0.0 && R <= 1.0)) throw InvalidArgument("R must lie in [0, 1]");
  for (double c : {C, C1, C2, C_tilde})
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("bound constants must be positive");
}

namespace {

void check_profile(std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("norm profile is empty");
  for (double x : v)
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("norm profile values must be finite and >= 0");
}

std::span<const double> values(const NormProfile& profile) { return profile.v; }

}  // namespace

double moment_bound_main(std::span<const double> v, const BoundParams& p) {
  check_profile(v);
  p.validate();
  const double v1 = v[0];
  if (v1 == 0.0) return 0.0;
  const int k = static_cast<int>(v.size());
  const double m = p.M;
  double inner = 0.0;
  for (int s = 2; s <= k; ++s)
    inner = std::max(inner, std::pow(v[static_cast<std::size_t>(s - 1)] / v1, 2.0 / (s - 1)));
  const double base = std::max(m, std::pow(m, k) * inner);
  return std::pow(p.C, m) * std::pow(v1, 2.0 * m) * std::pow(base, m);
}

double moment_bound_main(const NormProfile& profile, const BoundParams& p) {
  return moment_bound_main(values(profile), p);
}

double tail_exponent_main(std::span<const double> v, double x) {
  check_profile(v);
  if (!(x > 0.0)) throw InvalidArgument("x must be positive");
  const double inf = std::numeric_limits<double>::infinity();
  const int k = static_cast<int>(v.size());
  const double v1 = v[0];
  double e = v1 == 0.0 ? inf : (x / v1) * (x / v1);
  for (int s = 2; s <= k; ++s) {
    const double vs = v[static_cast<std::size_t>(s - 1)];
    const double denom = std::pow(v1, (s - 2.0) / (s - 1.0)) * std::pow(vs, 1.0 / (s - 1.0));
    if (denom == 0.0) continue;
    e = std::min(e, std::pow(x / denom, 2.0 / k));
  }
  return e;
}

double tail_bound_main(std::span<const double> v, const BoundParams& p, double x) {
  p.validate();
  return p.C1 * std::exp(-p.C2 * tail_exponent_main(v, x));
}

double tail_bound_main(const NormProfile& profile, const BoundParams& p, double x) {
  return tail_bound_main(values(profile), p, x);
}

int markov_moment_choice(std::span<const double> v, const BoundParams& p, double x) {
  p.validate();
  const double target = p.C_tilde * tail_exponent_main(v, x);
  if (!std::isfinite(target) || target > 1e9) throw InvalidArgument("moment choice is unbounded for this profile");
  return std::max(1, static_cast<int>(std::lround(target)));
}

double tail_bound_theorem_a(double v1, const BoundParams& p, double x) {
  p.validate();
  if (!(v1 > 0.0)) throw InvalidArgument("V_1 must be positive");
  if (!(x > 0.0)) throw InvalidArgument("x must be positive");
  return p.C * std::exp(-0.5 * std::pow(x / v1, 2.0 / p.k));
}

double moment_bound_theorem_a(double v1, const BoundParams& p) {
  p.validate();
  if (!(v1 >= 0.0)) throw InvalidArgument("V_1 must be nonnegative");
  const double km = static_cast<double>(p.k) * p.M;
  return p.C * std::pow(2.0 * km / std::numbers::e, km) * std::pow(v1, 2.0 * p.M);
}

double hanson_wright_bound(double lambda, double opnorm, const BoundParams& p, double x) {
  p.validate();
  if (!(x > 0.0)) throw InvalidArgument("x must be positive");
  if (!(lambda >= 0.0) || !(opnorm >= 0.0)) throw InvalidArgument("norms must be nonnegative");
  const double inf = std::numeric_limits<double>::infinity();
  const double lin = opnorm == 0.0 ? inf : p.C2 * x / opnorm;
  const double quad = lambda == 0.0 ? inf : p.C2 * x * x / (lambda * lambda);
  return p.C1 * std::exp(-std::min(lin, quad));
}

SimplifiedCheck simplified_theorem_check(const CoefficientTensor& a, int M, double R, const NormOptions& opts) {
  if (M < 1) throw InvalidArgument("M must be >= 1");
  if (!(R > 0.0 && R <= 1.0)) throw InvalidArgument("R must lie in (0, 1]");
  const int k = a.order();
  if (k < 1) throw InvalidArgument("order must be >= 1");
  if (2 * M * k > kMaxDiagramVertices)
    throw CapExceeded("2Mk = " + std::to_string(2 * M * k) + " exceeds the cap of " +
                      std::to_string(kMaxDiagramVertices));
  SimplifiedCheck out;
  const NormProfile profile = norm_profile(a, opts);
  out.v = profile.v;
  for (int s = 1; s <= k; ++s) {
    const double limit = std::pow(R, s - 1);
    if (profile.v_s(s) > limit * (1.0 + 1e-12))
      out.violations.push_back("V_" + std::to_string(s) + " = " + std::to_string(profile.v_s(s)) + " > R^" +
                               std::to_string(s - 1) + " = " + std::to_string(limit));
    if (s >= 3) out.heuristic = true;
  }
  const double rmin = std::pow(static_cast<double>(M), -(k - 1) / 2.0);
  if (R < rmin * (1.0 - 1e-12))
    out.violations.push_back("R = " + std::to_string(R) + " < M^{-(k-1)/2} = " + std::to_string(rmin));
  if (!out.violations.empty()) out.status = HypothesisStatus::hypothesis_violated;
  out.moment = power_moment(a, 2 * M).moment;
  const double scale = std::pow(static_cast<double>(M), static_cast<double>(k) * M) * std::pow(R, 2.0 * M);
  out.c_star = out.moment <= 0.0 ? 0.0 : std::pow(out.moment / scale, 1.0 / M);
  return out;
}

ProfileCount partition_profile_count(int M, std::vector<int> t) {
  if (M < 1) throw InvalidArgument("M must be >= 1");
  const int n = 2 * M;
  if (n > 12) throw CapExceeded("partition profile counts are limited to 2M <= 12");
  int sum = 0;
  for (int x : t) {
    if (x < 2) throw InvalidArgument("profile parts must be >= 2");
    sum += x;
  }
  if (sum != n) throw InvalidArgument("profile parts must sum to 2M");
  std::sort(t.begin(), t.end());

  ProfileCount out;
  // Restricted growth strings with running block sizes.
  std::vector<int> sizes;
  std::vector<int> sorted;
  auto rec = [&](auto&& self, int i) -> void {
    if (i == n) {
      if (sizes.size() != t.size()) return;
      sorted = sizes;
      std::sort(sorted.begin(), sorted.end());
      if (sorted == t) ++out.exact;
      return;
    }
    if (static_cast<int>(sizes.size()) > static_cast<int>(t.size())) return;
    for (std::size_t b = 0; b < sizes.size(); ++b) {
      ++sizes[b];
      self(self, i + 1);
      --sizes[b];
    }
    sizes.push_back(1);
    self(self, i + 1);
    sizes.pop_back();
  };
  rec(rec, 0);

  double bound = 1.0;
  for (int x : t) bound *= std::pow(static_cast<double>(n), x - 1) / std::tgamma(static_cast<double>(x));
  out.bound = bound;
  return out;
}

}  // namespace chaos
