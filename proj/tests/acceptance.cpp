// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.
// Usage: acceptance <path to chaosmom>

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "chaos/bounds.hpp"
#include "chaos/gauss.hpp"
#include "chaos/io.hpp"
#include "chaos/latala.hpp"
#include "chaos/moments.hpp"
#include "chaos/numeric.hpp"
#include "chaos/partition.hpp"
#include "chaos/verify.hpp"
#include "support.hpp"

using namespace chaos;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& run) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome from_suite(const SuiteResult& r) {
  return {r.passed && r.failures == 0 && r.cases > 0,
          std::to_string(r.cases) + " cases, " + std::to_string(r.failures) + " failures, worst " + fmt("%.3e", r.worst)};
}

CoefficientTensor rng_tensor(int order, int dim, std::uint64_t a, std::uint64_t b, double density = 0.7) {
  CounterRng rng(2024, stream_id(a, b));
  return random_sparse_tensor(order, dim, density, rng);
}

Outcome cross_oracle() {
  const auto start = Clock::now();
  auto o = from_suite(verify_cross_oracle(SuiteOptions{}));
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (secs >= 60.0) o.pass = false;
  o.detail += ", " + fmt("%.1f s (limit 60 s)", secs);
  return o;
}

Outcome second_moment_anchor() {
  double worst = 0.0;
  int cases = 0;
  for (int k = 1; k <= 3; ++k)
    for (int dim = 1; dim <= 3; ++dim)
      for (std::uint64_t i = 0; i < 10; ++i) {
        CounterRng rng(11, stream_id(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(dim), i));
        const auto f = random_symmetric_tensor(k, dim, 0.8, rng);
        const CoefficientTensor ks[] = {f, f};
        worst = std::max(worst, std::fabs(product_moment(ks).moment - static_cast<double>(factorial_u64(k))));
        ++cases;
      }
  return {worst <= 1e-12, std::to_string(cases) + " kernels, max |E Z^2 - k!| = " + fmt("%.3e", worst)};
}

double svd_norm(const CoefficientTensor& a) {
  const int n = a.dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [idx, v] : a.entries()) m(idx[0], idx[1]) = v;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

Outcome norm_exactness() {
  const SetPartition three{{{0}, {1}, {2}}};
  double worst_svd = 0.0, worst_grid = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto a = rng_tensor(2, 2 + static_cast<int>(i % 5), 0x57D, i, 0.8);
    const auto prof = norm_profile(a);
    worst_svd = std::max(worst_svd, std::fabs(prof.v_s(2) - svd_norm(a)));
  }
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto a = rng_tensor(3, 2, 0x6D1, i, 0.9);
    const double grid = testing::injective_norm_grid(a);
    worst_grid = std::max(worst_grid, std::fabs(partition_norm(a, three).value - grid));
  }
  return {worst_svd <= 1e-8 && worst_grid <= 1e-6,
          "50 matrices max |V_2 - sigma_max| = " + fmt("%.2e", worst_svd) + "; 20 order-3 tensors max |ALS - grid| = " +
              fmt("%.2e", worst_grid)};
}

Outcome simplified_constant() {
  double worst = 0.0;
  int cases = 0, skipped = 0;
  for (int k = 1; k <= 3; ++k)
    for (int M = 1; 2 * M * k <= 16; ++M)
      for (int dim = 1; dim <= 3; ++dim)
        for (std::uint64_t i = 0; i < 10; ++i) {
          auto a = rng_tensor(k, dim, 0xC5 + static_cast<std::uint64_t>(k * 100 + M * 10 + dim), i);
          a = scale(a, 1.0 / frobenius_norm(a));
          const auto prof = norm_profile(a);
          double R = std::pow(static_cast<double>(M), -(k - 1) / 2.0);
          for (int s = 2; s <= k; ++s) R = std::max(R, std::pow(prof.v_s(s), 1.0 / (s - 1)));
          R = std::min(R, 1.0);
          const auto chk = simplified_theorem_check(a, M, R);
          if (chk.status != HypothesisStatus::ok) {
            ++skipped;
            continue;
          }
          worst = std::max(worst, chk.c_star);
          ++cases;
        }
  return {cases > 0 && worst <= 16.0, std::to_string(cases) + " instances satisfying the hypotheses (" +
                                          std::to_string(skipped) + " skipped), max C* = " + fmt("%.4f", worst) +
                                          " (limit 16)"};
}

Outcome sharpness() {
  const auto start = Clock::now();
  double lo = 1e9, hi = 0.0;
  for (int k : {2, 3}) {
    const double grid[] = {1000.0};
    const double r = sharpness_probe(k, grid)[0].ratio;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return {lo >= 0.85 && hi <= 1.15 && secs < 1.0,
          "ratios at x = 1000 in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "], " + fmt("%.3f s", secs)};
}

Outcome empirical_tails() {
  const auto start = Clock::now();
  BoundParams p;
  p.k = 2;
  p.C1 = 2.0;
  p.C2 = 0.125;
  int violations = 0, points = 0;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 3; ++i) {
    CounterRng rng(3, stream_id(0x7A11, i));
    const auto f = random_symmetric_tensor(2, 3, 0.8, rng);
    const auto prof = norm_profile(f);
    const auto samples = sample_Z(f, 1000000, 100 + i);
    std::vector<double> grid;
    for (double t = 0.25; t <= 12.0; t += 0.25) grid.push_back(t * prof.v_s(1));
    for (const auto& row : empirical_tail(samples, grid)) {
      const double b = hanson_wright_bound(prof.v_s(1), prof.v_s(2), p, row.x);
      worst = std::max(worst, row.p_hat / b);
      ++points;
      if (row.p_hat > b) ++violations;
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return {violations == 0 && secs < 120.0, std::to_string(points) + " grid points, " + std::to_string(violations) +
                                               " violations, max p_hat/bound = " + fmt("%.4f", worst) + ", " +
                                               fmt("%.1f s", secs)};
}

Outcome latala_checks() {
  std::vector<std::pair<std::string, CoefficientTensor>> gens{{"rank-one", rank_one_instance(3)},
                                                              {"random-sparse", random_sparse_instance(3, 0.6, 7)},
                                                              {"orthogonal-slices", orthogonal_slices_instance(3, 7)}};
  double worst_identity = 0.0, worst_ratio = 0.0;
  std::size_t violations = 0, samples = 0;
  bool hyp = true;
  for (const auto& [name, base] : gens) {
    const double v1 = frobenius_norm(base);
    worst_identity = std::max(worst_identity, std::fabs(expected_sup_X_squared(base) - v1 * v1));
    for (int M : {4, 16, 64}) {
      const auto a = scale(base, hypothesis_scale(base, M));
      const auto est = estimate_sup_Y_expectation(a, M, 10000, 5);
      violations += est.order_violations;
      samples += est.samples;
      hyp = hyp && est.hypotheses_ok;
      worst_ratio = std::max(worst_ratio, est.ratio_Mquarter);
    }
  }
  return {worst_identity <= 1e-10 && violations == 0 && worst_ratio <= 10.0 && hyp,
          "max |E sup_X^2 - V_1^2| = " + fmt("%.2e", worst_identity) + ", " + std::to_string(violations) +
              " order violations in " + std::to_string(samples) + " samples, max E sup_Y / M^(-1/4) = " +
              fmt("%.4f", worst_ratio) + " (limit 10)"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& exe) {
  if (exe.empty()) return {false, "path to chaosmom not given"};
  const auto dir = std::filesystem::temp_directory_path() / "chaos_acceptance";
  std::filesystem::create_directories(dir);
  const auto k2 = dir / "k2.json";
  const auto k3 = dir / "k3.json";
  std::ofstream(k2) << tensor_to_json(rng_tensor(2, 3, 0xDE7, 1)).dump();
  std::ofstream(k3) << tensor_to_json(rng_tensor(3, 3, 0xDE7, 2)).dump();
  const std::vector<std::pair<std::string, std::string>> cmds{
      {"simulate", "simulate --kernel " + k2.string() + " --samples 20000 --seed 42 --tail-grid 0:0.5:5"},
      {"latala", "latala --tensor " + k3.string() + " --M 4,16 --samples 2000 --seed 42 --rescale"},
      {"latala-gen", "latala --generator orthogonal-slices --dim 3 --M 4 --samples 2000 --seed 9 --rescale"}};
  int identical = 0;
  for (const auto& [name, args] : cmds) {
    std::string bodies[2];
    for (int run = 0; run < 2; ++run) {
      const auto out = dir / (name + std::to_string(run) + ".csv");
      const std::string cmd = "\"" + exe + "\" " + args + " --out " + out.string() + " 2>/dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
      bodies[run] = slurp(out);
    }
    if (!bodies[0].empty() && bodies[0] == bodies[1]) ++identical;
  }
  return {identical == static_cast<int>(cmds.size()),
          std::to_string(identical) + "/" + std::to_string(cmds.size()) + " commands produced byte-identical CSV"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string exe = argc > 1 ? argv[1] : "";
  SuiteOptions defaults;

  report(1, "cross-oracle moment equality", cross_oracle);
  report(2, "second-moment anchor", second_moment_anchor);
  report(3, "counting anchors", [&] { return from_suite(verify_counts(defaults)); });
  report(4, "basic estimate sweep", [&] { return from_suite(verify_basic_estimate(defaults)); });
  report(5, "main inequality sweep", [&] { return from_suite(verify_main_inequality(defaults)); });
  report(6, "cumulant identity", [&] { return from_suite(verify_cumulant_identity(defaults)); });
  report(7, "norm exactness", norm_exactness);
  report(8, "simplified-theorem constant", simplified_constant);
  report(9, "sharpness exponent", sharpness);
  report(10, "empirical tails vs Hanson-Wright", empirical_tails);
  report(11, "Latala lab checks", latala_checks);
  report(12, "CLI determinism", [&] { return determinism(exe); });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
