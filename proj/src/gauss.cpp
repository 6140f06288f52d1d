#include "chaos/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "chaos/error.hpp"
#include "chaos/numeric.hpp"
#include "chaos/parallel.hpp"
#include "chaos/rng.hpp"

namespace chaos {

double hermite(int l, double x) {
  if (l < 0 || l > 60) throw InvalidArgument("hermite: order must lie in [0, 60]");
  if (l == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int j = 1; j < l; ++j) {
    const double next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> hermite_coefficients(int l) {
  if (l < 0 || l > 60) throw InvalidArgument("hermite: order must lie in [0, 60]");
  std::vector<double> prev{1.0};
  if (l == 0) return prev;
  std::vector<double> cur{0.0, 1.0};
  for (int j = 1; j < l; ++j) {
    std::vector<double> next(static_cast<std::size_t>(j + 2), 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= j * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

namespace {

/// Distinct indices of a multi-index with their multiplicities, ascending.
std::vector<std::pair<int, int>> multiplicities(const IndexTuple& idx) {
  IndexTuple sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<int, int>> out;
  for (int i : sorted) {
    if (!out.empty() && out.back().first == i)
      ++out.back().second;
    else
      out.emplace_back(i, 1);
  }
  return out;
}

}  // namespace

ChaosPolynomial::ChaosPolynomial(const CoefficientTensor& a) : order_(a.order()), dim_(a.dim()) {
  std::map<std::vector<std::pair<int, int>>, KahanSum> grouped;
  for (const auto& [idx, val] : a.entries()) grouped[multiplicities(idx)] += val;
  for (auto& [factors, sum] : grouped) {
    const double c = sum.value();
    if (c != 0.0) terms_.push_back({c, factors});
  }
}

double ChaosPolynomial::operator()(std::span<const double> xs) const {
  if (static_cast<int>(xs.size()) != dim_)
    throw InvalidArgument("evaluate_Z: expected " + std::to_string(dim_) + " coordinates, got " +
                          std::to_string(xs.size()));
  KahanSum sum;
  for (const auto& t : terms_) {
    double p = t.coef;
    for (const auto& [i, l] : t.factors) p *= hermite(l, xs[static_cast<std::size_t>(i)]);
    sum += p;
  }
  return sum.value();
}

double evaluate_Z(const CoefficientTensor& a, std::span<const double> xs) { return ChaosPolynomial(a)(xs); }

MonomialExpansion::MonomialExpansion(int nvars) : nvars_(nvars) {
  if (nvars < 1) throw InvalidArgument("monomial expansion needs at least one variable");
}

MonomialExpansion MonomialExpansion::constant(int nvars, double c) {
  MonomialExpansion out(nvars);
  out.add(Exponents(static_cast<std::size_t>(nvars), 0), c);
  return out;
}

MonomialExpansion MonomialExpansion::from_chaos(const CoefficientTensor& a) {
  const int n = a.dim();
  MonomialExpansion out(n);
  for (const auto& [idx, val] : a.entries()) {
    MonomialExpansion term = constant(n, val);
    for (const auto& [i, l] : multiplicities(idx)) {
      MonomialExpansion h(n);
      const auto c = hermite_coefficients(l);
      for (std::size_t p = 0; p < c.size(); ++p) {
        if (c[p] == 0.0) continue;
        Exponents e(static_cast<std::size_t>(n), 0);
        e[static_cast<std::size_t>(i)] = static_cast<int>(p);
        h.add(e, c[p]);
      }
      term = term * h;
    }
    for (const auto& [e, c] : term.terms_) out.add(e, c);
  }
  return out;
}

int MonomialExpansion::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int x : e) s += x;
    d = std::max(d, s);
  }
  return d;
}

void MonomialExpansion::add(const Exponents& e, double c) {
  if (static_cast<int>(e.size()) != nvars_) throw InvalidArgument("exponent vector has wrong length");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

MonomialExpansion MonomialExpansion::operator*(const MonomialExpansion& other) const {
  if (nvars_ != other.nvars_) throw InvalidArgument("monomial expansions have different variable counts");
  std::map<Exponents, KahanSum> acc;
  Exponents e(static_cast<std::size_t>(nvars_));
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : other.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      acc[e] += ca * cb;
    }
  MonomialExpansion out(nvars_);
  for (auto& [ex, sum] : acc) out.add(ex, sum.value());
  return out;
}

double MonomialExpansion::operator()(std::span<const double> xs) const {
  if (static_cast<int>(xs.size()) != nvars_) throw InvalidArgument("point has wrong dimension");
  KahanSum sum;
  for (const auto& [e, c] : terms_) {
    double p = c;
    for (std::size_t i = 0; i < e.size(); ++i) p *= std::pow(xs[i], e[i]);
    sum += p;
  }
  return sum.value();
}

double MonomialExpansion::gaussian_expectation() const {
  KahanSum sum;
  for (const auto& [e, c] : terms_) {
    double p = c;
    for (int x : e) {
      if (x % 2 != 0) {
        p = 0.0;
        break;
      }
      p *= static_cast<double>(double_factorial_odd(x / 2));
    }
    if (p != 0.0) sum += p;
  }
  return sum.value();
}

double isserlis_moment(const CoefficientTensor& a, int degree) {
  if (degree < 0) throw InvalidArgument("moment degree must be nonnegative");
  if (a.dim() > 4 || a.order() > 3 || degree * a.order() > 16)
    throw CapExceeded("isserlis oracle is limited to dim <= 4, order <= 3, degree * order <= 16");
  const MonomialExpansion z = MonomialExpansion::from_chaos(a);
  MonomialExpansion power = MonomialExpansion::constant(a.dim(), 1.0);
  for (int i = 0; i < degree; ++i) power = power * z;
  return power.gaussian_expectation();
}

std::vector<double> sample_Z(const CoefficientTensor& a, std::size_t count, std::uint64_t seed, int workers) {
  if (count < 1) throw InvalidArgument("sample count must be >= 1");
  const ChaosPolynomial z(a);
  std::vector<double> out(count);
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  parallel_for(blocks, workers, [&](std::size_t b) {
    std::vector<double> xs(static_cast<std::size_t>(a.dim()));
    const std::size_t end = std::min(count, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      CounterRng rng(seed, i);
      for (auto& x : xs) x = rng.normal();
      out[i] = z(xs);
    }
  });
  return out;
}

std::vector<TailRow> empirical_tail(std::span<const double> samples, std::span<const double> grid) {
  if (samples.empty()) throw InvalidArgument("empirical_tail: no samples");
  std::vector<double> abs_sorted(samples.size());
  std::transform(samples.begin(), samples.end(), abs_sorted.begin(), [](double v) { return std::fabs(v); });
  std::sort(abs_sorted.begin(), abs_sorted.end());
  const double n = static_cast<double>(abs_sorted.size());
  const double z = 1.96;
  std::vector<TailRow> out;
  for (double x : grid) {
    const auto above = abs_sorted.end() - std::upper_bound(abs_sorted.begin(), abs_sorted.end(), x);
    const double p = static_cast<double>(above) / n;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / (1.0 + z * z / n);
    out.push_back({x, p, half});
  }
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("grid must look like start:step:stop, got '" + text + "'");
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0])
    throw InvalidArgument("grid must look like start:step:stop with step > 0, got '" + text + "'");
  const auto steps = static_cast<std::size_t>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
  if (steps > 1000000) throw CapExceeded("grid has too many points");
  std::vector<double> out;
  for (std::size_t i = 0; i <= steps; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[1]);
  return out;
}

double log_normal_tail(double t) {
  if (t < 35.0) return std::log(0.5 * std::erfc(t / std::numbers::sqrt2));
  const double u = 1.0 / (t * t);
  const double series = 1.0 - u + 3.0 * u * u - 15.0 * u * u * u + 105.0 * u * u * u * u;
  return -0.5 * t * t - std::log(t) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

namespace {

using Poly = std::vector<double>;

void trim(Poly& p) {
  double scale = 0.0;
  for (double c : p) scale = std::max(scale, std::fabs(c));
  while (p.size() > 1 && std::fabs(p.back()) <= 1e-13 * scale) p.pop_back();
}

double horner(const Poly& p, double t) {
  double r = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * t + *it;
  return r;
}

Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(static_cast<double>(i) * p[i]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

Poly remainder(Poly a, const Poly& b) {
  while (a.size() >= b.size() && !(a.size() == 1 && a[0] == 0.0)) {
    const double f = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    a.pop_back();
    if (a.empty()) a.push_back(0.0);
  }
  return a;
}

std::vector<Poly> sturm_sequence(const Poly& p) {
  std::vector<Poly> seq{p, derivative(p)};
  double scale = 0.0;
  for (double c : p) scale = std::max(scale, std::fabs(c));
  while (seq.back().size() > 1) {
    Poly r = remainder(seq[seq.size() - 2], seq.back());
    for (double& c : r) c = -c;
    trim(r);
    bool zero = true;
    for (double c : r) zero = zero && std::fabs(c) <= 1e-13 * scale;
    if (zero) break;
    seq.push_back(std::move(r));
  }
  return seq;
}

int sign_changes(const std::vector<Poly>& seq, double t) {
  int changes = 0;
  int last = 0;
  for (const auto& q : seq) {
    const double v = horner(q, t);
    const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

std::vector<double> real_roots(std::vector<double> coeffs) {
  trim(coeffs);
  if (coeffs.size() <= 1) return {};
  const double lead = coeffs.back();
  double bound = 0.0;
  for (std::size_t i = 0; i + 1 < coeffs.size(); ++i) bound = std::max(bound, std::fabs(coeffs[i] / lead));
  bound += 1.0;
  const auto seq = sturm_sequence(coeffs);
  std::vector<double> roots;
  // Roots in (a, b] are counted by V(a) - V(b).
  auto isolate = [&](auto&& self, double a, double b, int va, int vb, int depth) -> void {
    const int count = va - vb;
    if (count <= 0) return;
    const double width_tol = 1e-13 * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
    if (count == 1 || depth > 200 || b - a <= width_tol) {
      for (int it = 0; it < 400 && b - a > 1e-14 * std::max(1.0, std::fabs(b)); ++it) {
        const double mid = 0.5 * (a + b);
        const int vm = sign_changes(seq, mid);
        if (va - vm >= 1) {
          b = mid;
          vb = vm;
        } else {
          a = mid;
          va = vm;
        }
      }
      roots.push_back(0.5 * (a + b));
      return;
    }
    const double mid = 0.5 * (a + b);
    const int vm = sign_changes(seq, mid);
    self(self, a, mid, va, vm, depth + 1);
    self(self, mid, b, vm, vb, depth + 1);
  };
  const double lo = -bound - 1.0;
  const double hi = bound + 1.0;
  isolate(isolate, lo, hi, sign_changes(seq, lo), sign_changes(seq, hi), 0);
  std::sort(roots.begin(), roots.end());
  return roots;
}

namespace {

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

/// log P(a < xi < b) for a < b (either end may be infinite).
double log_interval_mass(double a, double b) {
  const double inf = std::numeric_limits<double>::infinity();
  if (b == inf) return log_normal_tail(a);
  if (a == -inf) return log_normal_tail(-b);
  if (a >= 0.0) {
    const double la = log_normal_tail(a);
    return la + std::log1p(-std::exp(log_normal_tail(b) - la));
  }
  if (b <= 0.0) return log_interval_mass(-b, -a);
  return std::log1p(-(std::exp(log_normal_tail(-a)) + std::exp(log_normal_tail(b))));
}

}  // namespace

std::vector<SharpnessRow> sharpness_probe(int k, std::span<const double> grid) {
  if (k < 1 || k > 5) throw InvalidArgument("sharpness_probe: order must lie in [1, 5]");
  const auto h = hermite_coefficients(k);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<SharpnessRow> out;
  for (double x : grid) {
    if (!(x > 0.0)) throw InvalidArgument("sharpness_probe: grid points must be positive");
    std::vector<double> cuts;
    for (double sign : {1.0, -1.0}) {
      auto p = h;
      p[0] -= sign * x;
      for (double r : real_roots(p)) cuts.push_back(r);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> ends{-inf};
    ends.insert(ends.end(), cuts.begin(), cuts.end());
    ends.push_back(inf);
    double log_p = -inf;
    for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
      const double a = ends[i];
      const double b = ends[i + 1];
      if (!(b > a)) continue;
      double probe;
      if (a == -inf)
        probe = b - 1.0;
      else if (b == inf)
        probe = a + 1.0;
      else
        probe = 0.5 * (a + b);
      if (std::fabs(horner(h, probe)) > x) log_p = log_add(log_p, log_interval_mass(a, b));
    }
    const double ratio = -log_p / (0.5 * std::pow(x, 2.0 / k));
    out.push_back({x, std::exp(log_p), log_p, ratio});
  }
  return out;
}

}  // namespace chaos
