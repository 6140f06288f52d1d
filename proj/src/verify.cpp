#include "chaos/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "chaos/census.hpp"
#include "chaos/diagram.hpp"
#include "chaos/error.hpp"
#include "chaos/gauss.hpp"
#include "chaos/moments.hpp"
#include "chaos/numeric.hpp"

namespace chaos {

CoefficientTensor random_sparse_tensor(int order, int dim, double density, CounterRng& rng) {
  if (order < 0 || dim < 1) throw InvalidArgument("random tensor needs order >= 0 and dim >= 1");
  CoefficientTensor::Entries e;
  IndexTuple idx(static_cast<std::size_t>(order), 0);
  std::size_t total = 1;
  for (int i = 0; i < order; ++i) total *= static_cast<std::size_t>(dim);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int a = order - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(dim));
      rem /= static_cast<std::size_t>(dim);
    }
    const double keep = rng.uniform();
    const double val = rng.normal();
    if (keep < density) e[idx] = val;
  }
  if (e.empty()) e[IndexTuple(static_cast<std::size_t>(order), 0)] = 1.0;
  return CoefficientTensor::from_map(order, dim, std::move(e));
}

CoefficientTensor random_symmetric_tensor(int order, int dim, double density, CounterRng& rng) {
  CoefficientTensor s = symmetrize(random_sparse_tensor(order, dim, density, rng));
  const double f = frobenius_norm(s);
  if (f == 0.0) {
    CoefficientTensor::Entries e{{IndexTuple(static_cast<std::size_t>(order), 0), 1.0}};
    return CoefficientTensor::from_map(order, dim, std::move(e), true);
  }
  return scale(s, 1.0 / f);
}

CoefficientTensor scale_to_level(const CoefficientTensor& a, double R, const NormOptions& opts) {
  if (!(R > 0.0 && R <= 1.0)) throw InvalidArgument("R must lie in (0, 1]");
  const NormProfile p = norm_profile(a, opts);
  double c = std::numeric_limits<double>::infinity();
  for (int s = 1; s <= a.order(); ++s)
    if (p.v_s(s) > 0.0) c = std::min(c, std::pow(R, s - 1) / p.v_s(s));
  if (!std::isfinite(c)) return a;
  return scale(a, c);
}

CoefficientTensor tail_contraction(const CoefficientTensor& f, const CoefficientTensor& g, int q) {
  if (q < 0 || q > f.order() || q > g.order()) throw InvalidArgument("tail_contraction: bad q");
  std::vector<AxisPair> pairs;
  for (int t = 0; t < q; ++t) pairs.push_back({f.order() - q + t, g.order() - q + t});
  return group_contract(f, g, pairs);
}

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

NormOptions norm_opts(const SuiteOptions& o) {
  NormOptions n;
  n.restarts = o.restarts;
  n.seed = o.seed;
  return n;
}

void finish(SuiteResult& r, Clock::time_point start) {
  r.passed = r.failures == 0;
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.ledger.push_back(r.name + ": " + std::to_string(r.cases) + " cases, " + std::to_string(r.failures) +
                     " failures, worst " + fmt("%.3e", r.worst) + (r.passed ? ", PASS" : ", FAIL"));
}

double rel_gap(double value, double reference) {
  if (reference == 0.0) return std::fabs(value);
  return std::fabs(value - reference) / std::fabs(reference);
}

struct OracleCell {
  int k, n, M;
};

std::vector<OracleCell> oracle_cells(const SuiteOptions& o) {
  if (o.max_k > 3 || o.max_n > 4 || o.max_2Mk > 16)
    throw CapExceeded("the moment oracle is limited to k <= 3, n <= 4, 2Mk <= 16");
  std::vector<OracleCell> cells;
  for (int k = 1; k <= o.max_k; ++k)
    for (int n = 1; n <= o.max_n; ++n)
      for (int M = 1; 2 * M * k <= o.max_2Mk; ++M) cells.push_back({k, n, M});
  return cells;
}

CoefficientTensor oracle_tensor(const SuiteOptions& o, const OracleCell& c, int i) {
  CounterRng rng(o.seed, stream_id(static_cast<std::uint64_t>(c.k * 100 + c.n), static_cast<std::uint64_t>(c.M),
                                   static_cast<std::uint64_t>(i)));
  const auto t = random_sparse_tensor(c.k, c.n, 0.6, rng);
  return scale(t, 1.0 / frobenius_norm(t));
}

}  // namespace

SuiteResult verify_cross_oracle(const SuiteOptions& o) {
  const auto start = Clock::now();
  SuiteResult r;
  r.name = "cross-oracle";
  const int instances = o.instances > 0 ? o.instances : 50;
  for (const auto& c : oracle_cells(o)) {
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
      const auto a = oracle_tensor(o, c, i);
      const double diagram = power_moment(a, 2 * c.M).moment;
      const double oracle = isserlis_moment(a, 2 * c.M);
      const double gap = rel_gap(diagram, oracle);
      worst = std::max(worst, gap);
      ++r.cases;
      if (!(gap <= 1e-9)) ++r.failures;
    }
    r.worst = std::max(r.worst, worst);
    r.ledger.push_back("k=" + std::to_string(c.k) + " n=" + std::to_string(c.n) + " 2M=" + std::to_string(2 * c.M) +
                       ": " + std::to_string(instances) + " tensors, worst relative gap " + fmt("%.3e", worst));
  }
  finish(r, start);
  return r;
}

SuiteResult verify_cumulant_identity(const SuiteOptions& o) {
  const auto start = Clock::now();
  SuiteResult r;
  r.name = "cumulant-identity";
  const int instances = o.instances > 0 ? o.instances : 50;
  for (const auto& c : oracle_cells(o)) {
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
      const auto a = oracle_tensor(o, c, i);
      const std::vector<CoefficientTensor> rows(static_cast<std::size_t>(2 * c.M), a);
      const double direct = product_moment(rows).moment;
      const double rebuilt = moment_from_cumulants(cumulants(rows));
      const double gap = rel_gap(rebuilt, direct);
      worst = std::max(worst, gap);
      ++r.cases;
      if (!(gap <= 1e-10)) ++r.failures;
    }
    r.worst = std::max(r.worst, worst);
    r.ledger.push_back("k=" + std::to_string(c.k) + " n=" + std::to_string(c.n) + " 2M=" + std::to_string(2 * c.M) +
                       ": " + std::to_string(instances) + " tensors, worst relative gap " + fmt("%.3e", worst));
  }
  // Distinct kernels on every row.
  for (int m = 2; m <= 6; ++m) {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      CounterRng rng(o.seed, stream_id(0xC0, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(i)));
      std::vector<CoefficientTensor> rows;
      for (int t = 0; t < m; ++t) rows.push_back(random_sparse_tensor(2, 3, 0.6, rng));
      const double direct = product_moment(rows).moment;
      const double rebuilt = moment_from_cumulants(cumulants(rows));
      const double gap = std::fabs(rebuilt - direct) / std::max(1.0, std::fabs(direct));
      worst = std::max(worst, gap);
      ++r.cases;
      if (!(gap <= 1e-10)) ++r.failures;
    }
    r.worst = std::max(r.worst, worst);
    r.ledger.push_back("distinct kernels k=2 n=3 m=" + std::to_string(m) + ": 10 lists, worst gap " +
                       fmt("%.3e", worst));
  }
  finish(r, start);
  return r;
}

SuiteResult verify_counts(const SuiteOptions&) {
  const auto start = Clock::now();
  SuiteResult r;
  r.name = "counts";
  auto check = [&](const std::vector<int>& rows, std::uint64_t expected, const std::string& what) {
    std::uint64_t enumerated = 0;
    std::uint64_t pairing = 0;
    for_each_closed_diagram(rows, [&](const Diagram& d) {
      ++enumerated;
      if (is_pairing_structured(d)) ++pairing;
      return true;
    });
    const std::uint64_t counted = count_closed_diagrams(rows);
    const std::uint64_t census = DiagramCensus(rows, std::vector<int>(rows.size(), 0)).diagram_count();
    int total = 0;
    for (int x : rows) total += x;
    const double cap = std::pow(static_cast<double>(total), total / 2.0);
    const bool ok = enumerated == expected && counted == expected && census == expected &&
                    static_cast<double>(enumerated) <= cap;
    ++r.cases;
    if (!ok) ++r.failures;
    r.ledger.push_back(what + ": enumerated " + std::to_string(enumerated) + ", expected " + std::to_string(expected) +
                       (ok ? "" : " MISMATCH"));
    return pairing;
  };
  std::string rows_text;
  for (int M = 1; 2 * M <= 10; ++M)
    check(std::vector<int>(static_cast<std::size_t>(2 * M), 1), double_factorial_odd(M),
          "rows 1^" + std::to_string(2 * M) + " (2M-1)!!");
  for (int k = 1; k <= 8; ++k) check({k, k}, factorial_u64(k), "rows (" + std::to_string(k) + "," + std::to_string(k) + ") k!");
  for (int k = 1; k <= 2; ++k)
    for (int M = 1; 2 * M <= 6; ++M) {
      std::vector<int> rows(static_cast<std::size_t>(2 * M), k);
      const std::uint64_t total = count_closed_diagrams(rows);
      const std::uint64_t pairing = check(rows, total, "rows " + std::to_string(k) + "^" + std::to_string(2 * M));
      std::uint64_t expected = factorial_u64(2 * M) / ((1ULL << M) * factorial_u64(M));
      for (int j = 0; j < M; ++j) expected *= factorial_u64(k);
      ++r.cases;
      if (pairing != expected) ++r.failures;
      r.ledger.push_back("pairing family k=" + std::to_string(k) + " 2M=" + std::to_string(2 * M) + ": " +
                         std::to_string(pairing) + ", expected " + std::to_string(expected) +
                         (pairing == expected ? "" : " MISMATCH"));
    }
  // The same identities on further profiles, without a closed form.
  for (const auto& rows : std::vector<std::vector<int>>{{2, 2, 2}, {3, 3, 2}, {3, 3, 3, 3}, {1, 2, 3}, {2, 2, 2, 2, 2, 2}})
    check(rows, count_closed_diagrams(rows), "profile check");
  finish(r, start);
  return r;
}

SuiteResult verify_basic_estimate(const SuiteOptions& o) {
  const auto start = Clock::now();
  SuiteResult r;
  r.name = "basic-estimate";
  const int instances = o.instances > 0 ? o.instances : 20;
  const NormOptions nopts = norm_opts(o);
  const double levels[] = {0.25, 0.5, 1.0};
  for (int m = 2; m <= 6; ++m)
    for (int k = 1; k <= o.max_k; ++k) {
      if ((m * k) % 2 != 0 || m * k > kMaxDiagramVertices) continue;
      std::vector<int> classes(static_cast<std::size_t>(m));
      std::iota(classes.begin(), classes.end(), 0);
      const auto census = cached_census(std::vector<int>(static_cast<std::size_t>(m), k), classes);
      for (int n = 1; n <= o.max_n; ++n)
        for (double R : levels) {
          double worst = 0.0;
          std::size_t checked = 0;
          for (int i = 0; i < instances; ++i) {
            CounterRng rng(o.seed, stream_id(static_cast<std::uint64_t>(m * 100 + k * 10 + n),
                                             static_cast<std::uint64_t>(R * 1000), static_cast<std::uint64_t>(i)));
            std::vector<DenseTensor> kernels;
            for (int t = 0; t < m; ++t)
              kernels.push_back(DenseTensor::from_sparse(
                  scale_to_level(random_symmetric_tensor(k, n, 0.7, rng), R, nopts)));
            const double limit = std::pow(R, m - 2);
            std::vector<DenseTensor> rows;
            for (const auto& sig : census->signatures()) {
              if (!sig.connected) continue;
              const auto& comp = census->components()[static_cast<std::size_t>(sig.components[0])];
              rows.clear();
              for (int cls : comp.key.classes) rows.push_back(kernels[static_cast<std::size_t>(cls)]);
              const double f = std::fabs(evaluate_closed(comp.representative, rows));
              worst = std::max(worst, f / limit);
              ++checked;
              ++r.cases;
              if (!(f <= limit * (1.0 + 1e-9))) ++r.failures;
            }
          }
          r.worst = std::max(r.worst, worst);
          r.ledger.push_back("m=" + std::to_string(m) + " k=" + std::to_string(k) + " n=" + std::to_string(n) +
                             " R=" + fmt("%.2f", R) + ": " + std::to_string(checked) +
                             " connected diagram classes, max |F|/R^(m-2) = " + fmt("%.6f", worst));
        }
    }

  // Kernels without symmetry, every connected diagram evaluated on its own,
  // plus the open-vertex and partial-kernel norm conditions on restrictions.
  const std::vector<std::vector<int>> profiles{{2, 2}, {1, 1, 2}, {2, 2, 2}, {1, 2, 3}, {3, 3}, {2, 2, 2, 2}, {1, 1, 1, 1}, {3, 1, 2, 2}};
  for (const auto& lengths : profiles) {
    const int m = static_cast<int>(lengths.size());
    int total = 0;
    for (int x : lengths) total += x;
    for (double R : levels) {
      double worst = 0.0, worst_partial = 0.0;
      std::size_t open_failures = 0;
      for (int i = 0; i < 4; ++i) {
        CounterRng rng(o.seed, stream_id(0xBE, static_cast<std::uint64_t>(total * 10 + m), static_cast<std::uint64_t>(R * 1000) + 7919u * static_cast<std::uint64_t>(i)));
        std::vector<DenseTensor> kernels;
        for (int k : lengths) {
          auto t = random_sparse_tensor(k, 2, 0.7, rng);
          kernels.push_back(DenseTensor::from_sparse(scale_to_level(scale(t, 1.0 / frobenius_norm(t)), R, nopts)));
        }
        for_each_closed_diagram(lengths, [&](const Diagram& d) {
          if (!is_connected(d)) return true;
          const double f = std::fabs(evaluate_closed(d, kernels));
          const double limit = std::pow(R, m - 2);
          worst = std::max(worst, f / limit);
          ++r.cases;
          if (!(f <= limit * (1.0 + 1e-9))) ++r.failures;
          if (total > 8) return true;
          for (int rr = 1; rr < m; ++rr) {
            const Diagram head = d.first_rows(rr);
            for (const auto& comp_rows : component_rows(head)) {
              const Diagram part = head.restrict_to(comp_rows);
              ++r.cases;
              if (part.num_open() == 0) {
                ++open_failures;
                ++r.failures;
                continue;
              }
              std::vector<DenseTensor> sub;
              for (int t : comp_rows) sub.push_back(kernels[static_cast<std::size_t>(t)]);
              const CoefficientTensor pk = evaluate_dense(part, sub).to_sparse();
              const NormProfile prof = norm_profile(pk, nopts);
              const int size = static_cast<int>(comp_rows.size());
              for (int s = 1; s <= pk.order(); ++s) {
                const double lim = std::pow(R, size + s - 2);
                worst_partial = std::max(worst_partial, prof.v_s(s) / lim);
                if (!(prof.v_s(s) <= lim * (1.0 + 1e-9))) ++r.failures;
              }
            }
          }
          return true;
        });
      }
      r.worst = std::max({r.worst, worst, worst_partial});
      std::string name = "(";
      for (std::size_t t = 0; t < lengths.size(); ++t) name += (t ? "," : "") + std::to_string(lengths[t]);
      name += ")";
      r.ledger.push_back("general kernels rows " + name + " R=" + fmt("%.2f", R) + ": max |F|/R^(m-2) = " +
                         fmt("%.6f", worst) + (total <= 8 ? ", max partial V_s ratio = " + fmt("%.6f", worst_partial) +
                                                                ", closed restriction components " +
                                                                std::to_string(open_failures)
                                                          : ""));
    }
  }
  finish(r, start);
  return r;
}

SuiteResult verify_main_inequality(const SuiteOptions& o) {
  const auto start = Clock::now();
  SuiteResult r;
  r.name = "main-inequality";
  const int instances = o.instances > 0 ? o.instances : 100;
  const NormOptions nopts = norm_opts(o);
  for (int i = 0; i < instances; ++i) {
    CounterRng rng(o.seed, stream_id(0x4E, static_cast<std::uint64_t>(i)));
    int m = 0, n = 0;
    do {
      m = static_cast<int>(rng.next_u64() % 3);
      n = static_cast<int>(rng.next_u64() % 3);
    } while (m + n < 1);
    const int q = 1 + static_cast<int>(rng.next_u64() % 2);
    const int dim = 1 + static_cast<int>(rng.next_u64() % 3);
    const double R = 0.05 + 0.95 * rng.uniform();
    const auto f = random_sparse_tensor(m + q, dim, 0.7, rng);
    const auto g = random_sparse_tensor(n + q, dim, 0.7, rng);
    auto level = [&](const CoefficientTensor& t) {
      const NormProfile p = norm_profile(t, nopts);
      double d = 0.0;
      for (int s = 1; s <= t.order(); ++s) d = std::max(d, p.v_s(s) * std::pow(R, 2 - s));
      return d;
    };
    const double d1 = level(f);
    const double d2 = level(g);
    const auto F = tail_contraction(f, g, q);
    const NormProfile pf = norm_profile(F, nopts);
    double worst = 0.0;
    bool ok = true;
    for (int s = 1; s <= F.order(); ++s) {
      const double lim = d1 * d2 * std::pow(R, s - 2);
      worst = std::max(worst, pf.v_s(s) / lim);
      if (!(pf.v_s(s) <= lim * (1.0 + 1e-9))) ok = false;
    }
    ++r.cases;
    if (!ok) ++r.failures;
    r.worst = std::max(r.worst, worst);
    r.ledger.push_back("instance " + std::to_string(i) + " m=" + std::to_string(m) + " n=" + std::to_string(n) +
                       " q=" + std::to_string(q) + " dim=" + std::to_string(dim) + " R=" + fmt("%.3f", R) +
                       ": max V_s(F)/(D1 D2 R^(s-2)) = " + fmt("%.6f", worst) + (ok ? "" : " VIOLATION"));
  }
  finish(r, start);
  return r;
}

SuiteResult verify_sharpness(const SuiteOptions&) {
  const auto start = Clock::now();
  SuiteResult r;
  r.name = "sharpness";
  const std::vector<double> grid{10.0, 100.0, 1000.0};
  for (int k = 1; k <= 5; ++k) {
    for (const auto& row : sharpness_probe(k, grid)) {
      r.ledger.push_back("k=" + std::to_string(k) + " x=" + fmt("%g", row.x) + ": P = " + fmt("%.6e", row.tail) +
                         ", ratio " + fmt("%.6f", row.ratio));
      if ((k == 2 || k == 3) && row.x == 1000.0) {
        ++r.cases;
        r.worst = std::max(r.worst, std::fabs(row.ratio - 1.0));
        if (!(row.ratio >= 0.85 && row.ratio <= 1.15)) ++r.failures;
      }
    }
  }
  // Closed forms for k = 1 and k = 2.
  const double one[] = {1.96};
  const double p1 = sharpness_probe(1, one)[0].tail;
  const double q1 = std::erfc(1.96 / std::sqrt(2.0));
  ++r.cases;
  if (!(std::fabs(p1 - q1) <= 1e-12)) ++r.failures;
  r.ledger.push_back("k=1 x=1.96: P = " + fmt("%.12f", p1) + ", closed form " + fmt("%.12f", q1));
  for (double x : {0.25, 0.5, 2.0, 7.0}) {
    const double xs[] = {x};
    const double p2 = sharpness_probe(2, xs)[0].tail;
    // P(xi^2 > 1 + x) + P(xi^2 < 1 - x).
    double closed = std::erfc(std::sqrt((1.0 + x) / 2.0));
    if (x < 1.0) closed += std::erf(std::sqrt((1.0 - x) / 2.0));
    ++r.cases;
    if (!(std::fabs(p2 - closed) <= 1e-12)) ++r.failures;
    r.ledger.push_back("k=2 x=" + fmt("%g", x) + ": P = " + fmt("%.12f", p2) + ", chi-square closed form " +
                       fmt("%.12f", closed));
  }
  finish(r, start);
  return r;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"cross-oracle", "basic-estimate", "main-inequality",
                                              "cumulant-identity", "counts", "sharpness"};
  return names;
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& opts) {
  if (name == "cross-oracle") return verify_cross_oracle(opts);
  if (name == "basic-estimate") return verify_basic_estimate(opts);
  if (name == "main-inequality") return verify_main_inequality(opts);
  if (name == "cumulant-identity") return verify_cumulant_identity(opts);
  if (name == "counts") return verify_counts(opts);
  if (name == "sharpness") return verify_sharpness(opts);
  throw InvalidArgument("unknown suite '" + name + "'");
}

}  // namespace chaos
