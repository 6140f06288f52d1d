#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "chaos/bounds.hpp"
#include "chaos/diagram.hpp"
#include "chaos/error.hpp"
#include "chaos/gauss.hpp"
#include "chaos/io.hpp"
#include "chaos/latala.hpp"
#include "chaos/moments.hpp"
#include "chaos/partition.hpp"
#include "chaos/verify.hpp"

using nlohmann::json;
using namespace chaos;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitHypothesis = 2;

struct Common {
  std::string out;
  int workers = 1;
};

struct Run {
  CLI::App* app = nullptr;
  json inputs = json::object();
  json result = json::object();
  int exit_code = kExitOk;
};

void hash_input(Run& run, const std::string& path) { run.inputs[path] = fnv1a_hex(read_file(path)); }

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string(what) + ": cannot parse '" + item + "' as an integer");
    }
  }
  if (out.empty()) throw InvalidArgument(std::string(what) + ": empty list");
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

/// Writes text to the --out path or to stdout.
void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw Error("cannot write '" + c.out + "'");
  f << text;
}

json config_echo(const CLI::App* app) {
  json cfg = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help") continue;
    const auto& res = opt->results();
    if (res.empty()) continue;
    cfg[opt->get_lnames()[0]] = res.size() == 1 ? json(res[0]) : json(res);
  }
  return cfg;
}

std::string timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string report_text(const Run& run, double seconds) {
  json report = {{"command", run.app->get_name()},
                 {"version", kVersion},
                 {"config", config_echo(run.app)},
                 {"inputs", run.inputs},
                 {"caps",
                  {{"max_diagram_vertices", kMaxDiagramVertices},
                   {"max_count_vertices", kMaxCountVertices},
                   {"max_partition_order", kMaxPartitionOrder}}},
                 {"result", run.result},
                 {"timestamp", timestamp()},
                 {"wall_clock_seconds", seconds}};
  return report.dump(2) + "\n";
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) {
    if (!s.empty()) s += ',';
    s += c;
  }
  return s + "\n";
}

std::string quote(const std::string& s) { return '"' + s + '"'; }

NormOptions norm_options(int restarts, double tol, int max_iter, std::optional<std::uint64_t> seed) {
  NormOptions o;
  o.restarts = restarts;
  o.tol = tol;
  o.max_iter = max_iter;
  if (seed) o.seed = *seed;
  return o;
}

/// Alternating maximization is randomized for three or more blocks.
void require_seed_for_order(const std::optional<std::uint64_t>& seed, int order, const char* cmd) {
  if (!seed && order >= 3)
    throw InvalidArgument(std::string(cmd) + ": --seed is required for tensors of order >= 3 (randomized restarts)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moments, norms and tail bounds of Gaussian chaos polynomials"};
  app.set_config("--config", "", "TOML/INI file with the same keys as the flags (flags win)");
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", common.out, "Output path (stdout when omitted)");
    sub->add_option("--workers", common.workers, "Worker threads")->check(CLI::PositiveNumber);
  };

  // norms
  std::string tensor_path;
  int restarts = 32;
  double tol = 1e-10;
  int max_iter = 500;
  std::optional<std::uint64_t> seed;
  auto* norms = app.add_subcommand("norms", "Partition norms V_P and the profile V_1..V_k of a tensor");
  norms->add_option("--tensor", tensor_path, "Tensor JSON")->required()->check(CLI::ExistingFile);
  norms->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
  norms->add_option("--tol", tol)->check(CLI::PositiveNumber);
  norms->add_option("--max-iter", max_iter)->check(CLI::PositiveNumber);
  norms->add_option("--seed", seed, "Seed of the alternating maximization restarts");
  add_common(norms);

  // diagrams
  std::string rows_text, kernels_text, emit_path;
  bool count_only = false;
  auto* diagrams = app.add_subcommand("diagrams", "Enumerate closed diagrams and evaluate F_gamma");
  diagrams->add_option("--rows", rows_text, "Row lengths, e.g. 2,2,2")->required();
  diagrams->add_flag("--count-only", count_only, "Count without enumerating");
  diagrams->add_option("--kernels", kernels_text, "Kernel JSON files, one per row or one for all rows");
  diagrams->add_option("--emit", emit_path, "CSV of per-diagram values (needs --kernels)");
  add_common(diagrams);

  // moments
  std::string kernel_path;
  int copies = 2;
  bool with_oracle = false, with_cumulants = false, direct = false;
  auto* moments = app.add_subcommand("moments", "Exact moment E Z^copies by the diagram formula");
  moments->add_option("--kernel", kernel_path, "Kernel JSON")->check(CLI::ExistingFile);
  moments->add_option("--kernels", kernels_text, "Comma-separated kernel files for a mixed product");
  moments->add_option("--copies", copies, "Number of factors")->check(CLI::NonNegativeNumber);
  moments->add_flag("--oracle", with_oracle, "Compare with the monomial expansion oracle");
  moments->add_flag("--cumulants", with_cumulants, "Include the connected-diagram table");
  moments->add_flag("--direct", direct, "Also sum diagram by diagram without symmetrization");
  add_common(moments);

  // bounds
  std::string profile_path;
  BoundParams params;
  std::vector<double> xs;
  double R = -1.0;
  auto* bounds = app.add_subcommand("bounds", "Evaluate the moment and tail bounds");
  bounds->add_option("--profile", profile_path, "Profile JSON with \"v\": [V_1, ..., V_k]")->check(CLI::ExistingFile);
  bounds->add_option("--tensor", tensor_path, "Tensor JSON (profile computed)")->check(CLI::ExistingFile);
  bounds->add_option("--M", params.M)->check(CLI::PositiveNumber);
  bounds->add_option("--C", params.C)->check(CLI::PositiveNumber);
  bounds->add_option("--C1", params.C1)->check(CLI::PositiveNumber);
  bounds->add_option("--C2", params.C2)->check(CLI::PositiveNumber);
  bounds->add_option("--C-tilde", params.C_tilde)->check(CLI::PositiveNumber);
  bounds->add_option("--x", xs, "Tail levels")->delimiter(',');
  bounds->add_option("--R", R, "Level for the simplified moment check (needs --tensor)");
  bounds->add_option("--seed", seed);
  bounds->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
  add_common(bounds);

  // simulate
  double samples_d = 1e6;
  std::string grid_text = "0:0.5:12";
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo tail of |Z| against the bounds");
  simulate->add_option("--kernel", kernel_path, "Kernel JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--samples", samples_d)->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed)->required();
  simulate->add_option("--tail-grid", grid_text, "start:step:stop");
  simulate->add_option("--C", params.C)->check(CLI::PositiveNumber);
  simulate->add_option("--C1", params.C1)->check(CLI::PositiveNumber);
  simulate->add_option("--C2", params.C2)->check(CLI::PositiveNumber);
  simulate->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
  add_common(simulate);

  // oracle
  int degree = 2;
  auto* oracle = app.add_subcommand("oracle", "E Z^degree by monomial expansion");
  oracle->add_option("--kernel", kernel_path, "Kernel JSON")->required()->check(CLI::ExistingFile);
  oracle->add_option("--degree", degree)->check(CLI::NonNegativeNumber);
  add_common(oracle);

  // latala
  std::string m_text = "16";
  std::string generator;
  int gen_dim = 3;
  bool rescale = false;
  auto* latala = app.add_subcommand("latala", "E sup Y(v,w) over an M-sweep for an order-3 tensor");
  latala->add_option("--tensor", tensor_path, "Order-3 tensor JSON")->check(CLI::ExistingFile);
  latala->add_option("--generator", generator, "rank-one | random-sparse | orthogonal-slices")
      ->check(CLI::IsMember({"rank-one", "random-sparse", "orthogonal-slices"}));
  latala->add_option("--dim", gen_dim, "Dimension for --generator")->check(CLI::PositiveNumber);
  latala->add_option("--M", m_text, "One value or a comma-separated list");
  latala->add_option("--samples", samples_d)->check(CLI::PositiveNumber);
  latala->add_option("--seed", seed)->required();
  latala->add_flag("--rescale", rescale, "Scale the tensor to meet the hypotheses at each M");
  latala->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
  add_common(latala);

  // verify
  std::string suite;
  SuiteOptions sopts;
  auto* verify = app.add_subcommand("verify", "Run a property sweep and print its ledger");
  verify->add_option("--suite", suite)->required()->check(CLI::IsMember(suite_names()));
  verify->add_option("--max-k", sopts.max_k)->check(CLI::PositiveNumber);
  verify->add_option("--max-2Mk", sopts.max_2Mk)->check(CLI::PositiveNumber);
  verify->add_option("--max-n", sopts.max_n)->check(CLI::PositiveNumber);
  verify->add_option("--instances", sopts.instances)->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", sopts.seed);
  verify->add_option("--restarts", sopts.restarts)->check(CLI::PositiveNumber);
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  const auto start = std::chrono::steady_clock::now();
  Run run;
  run.app = app.get_subcommands().front();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  auto finish_json = [&] { emit(common, report_text(run, elapsed())); };

  try {
    if (run.app == norms) {
      hash_input(run, tensor_path);
      const auto a = load_tensor(tensor_path);
      require_seed_for_order(seed, a.order(), "norms");
      const auto profile = norm_profile(a, norm_options(restarts, tol, max_iter, seed));
      run.result["profile"] = profile_to_json(profile);
      finish_json();
    } else if (run.app == diagrams) {
      const auto rows = parse_int_list(rows_text, "--rows");
      int total = 0;
      for (int k : rows) {
        if (k < 1) throw InvalidArgument("--rows: lengths must be positive");
        total += k;
      }
      run.result["rows"] = rows;
      run.result["vertices"] = total;
      if (count_only) {
        run.result["count"] = count_closed_diagrams(rows);
        if (total % 2 != 0) run.result["status"] = "odd vertex total: no closed diagrams";
        finish_json();
      } else {
        std::vector<DenseTensor> kernels;
        if (!kernels_text.empty()) {
          const auto files = split(kernels_text);
          if (files.size() != 1 && files.size() != rows.size())
            throw InvalidArgument("--kernels: give one file or one per row");
          for (std::size_t t = 0; t < rows.size(); ++t) {
            const auto& f = files[files.size() == 1 ? 0 : t];
            hash_input(run, f);
            kernels.push_back(DenseTensor::from_sparse(load_tensor(f)));
          }
        } else if (!emit_path.empty()) {
          throw InvalidArgument("--emit needs --kernels");
        }
        std::ofstream csv;
        if (!emit_path.empty()) {
          csv.open(emit_path, std::ios::binary);
          if (!csv) throw Error("cannot write '" + emit_path + "'");
          csv << "id,edges,connected,components,F\n";
        }
        std::uint64_t id = 0, connected = 0;
        double sum = 0.0;
        const auto status = for_each_closed_diagram(rows, [&](const Diagram& d) {
          ++id;
          const bool conn = is_connected(d);
          if (conn) ++connected;
          if (!kernels.empty()) {
            const double f = evaluate_closed(d, kernels);
            sum += f;
            if (csv.is_open()) {
              std::string comps;
              for (const auto& rowset : component_rows(d)) {
                if (!comps.empty()) comps += ' ';
                comps += '{';
                for (std::size_t i = 0; i < rowset.size(); ++i)
                  comps += (i ? ";" : "") + std::to_string(rowset[i] + 1);
                comps += '}';
              }
              csv << csv_row({std::to_string(id), quote(d.edge_string()), conn ? "1" : "0", quote(comps),
                              format_double(f)});
            }
          }
          return true;
        });
        run.result["count"] = id;
        run.result["connected"] = connected;
        if (status == EnumerationStatus::odd_vertex_total) run.result["status"] = "odd vertex total: no closed diagrams";
        if (!kernels.empty()) run.result["sum_F"] = sum;
        finish_json();
      }
    } else if (run.app == moments) {
      std::vector<CoefficientTensor> factors;
      if (!kernels_text.empty()) {
        for (const auto& f : split(kernels_text)) {
          hash_input(run, f);
          factors.push_back(load_tensor(f));
        }
      } else {
        if (kernel_path.empty()) throw InvalidArgument("moments: --kernel or --kernels is required");
        hash_input(run, kernel_path);
        factors.assign(static_cast<std::size_t>(copies), load_tensor(kernel_path));
      }
      MomentReport rep;
      if (factors.empty()) {
        rep.moment = 1.0;
        rep.diagram_count = 1;
      } else {
        rep = product_moment(factors);
      }
      if (with_oracle) {
        if (!kernels_text.empty()) throw InvalidArgument("--oracle applies to --kernel with --copies");
        rep.set_oracle(isserlis_moment(factors.empty() ? CoefficientTensor(1, 1) : factors[0], copies));
      }
      run.result["moment"] = rep.moment;
      run.result["diagram_count"] = rep.diagram_count;
      run.result["graph_count"] = rep.graph_count;
      if (rep.oracle) {
        run.result["oracle"] = *rep.oracle;
        run.result["relative_gap"] = *rep.relative_gap;
      }
      if (direct && !factors.empty()) run.result["direct"] = product_moment_direct(factors);
      if (with_cumulants && !factors.empty()) {
        const auto table = cumulants(factors);
        json t = json::array();
        for (const auto& [mask, v] : table.values) {
          json rowset = json::array();
          for (int r = 0; r < table.rows; ++r)
            if (mask & (1u << r)) rowset.push_back(r + 1);
          t.push_back({{"rows", rowset}, {"K", v}});
        }
        run.result["cumulants"] = t;
        run.result["moment_from_cumulants"] = moment_from_cumulants(table);
      }
      finish_json();
    } else if (run.app == bounds) {
      std::vector<double> v;
      std::optional<CoefficientTensor> a;
      if (!profile_path.empty() == !tensor_path.empty())
        throw InvalidArgument("bounds: give exactly one of --profile and --tensor");
      if (!profile_path.empty()) {
        hash_input(run, profile_path);
        v = load_profile(profile_path);
      } else {
        hash_input(run, tensor_path);
        a = load_tensor(tensor_path);
        require_seed_for_order(seed, a->order(), "bounds");
        v = norm_profile(*a, norm_options(restarts, tol, max_iter, seed)).v;
      }
      params.k = static_cast<int>(v.size());
      run.result["v"] = v;
      run.result["moment_bound_main"] = moment_bound_main(v, params);
      if (v[0] > 0.0) run.result["moment_bound_theorem_a"] = moment_bound_theorem_a(v[0], params);
      json tails = json::array();
      for (double x : xs) {
        json row = {{"x", x}, {"tail_bound_main", tail_bound_main(v, params, x)}};
        const double e = params.C_tilde * tail_exponent_main(v, x);
        if (std::isfinite(e) && e <= 1e9) row["markov_M"] = markov_moment_choice(v, params, x);
        if (v[0] > 0.0) row["tail_bound_theorem_a"] = tail_bound_theorem_a(v[0], params, x);
        if (params.k == 2) row["hanson_wright"] = hanson_wright_bound(v[0], v[1], params, x);
        tails.push_back(row);
      }
      run.result["tails"] = tails;
      if (R >= 0.0) {
        if (!a) throw InvalidArgument("--R needs --tensor");
        NormOptions o = norm_options(restarts, tol, max_iter, seed);
        const auto chk = simplified_theorem_check(*a, params.M, R, o);
        run.result["simplified"] = {{"status", chk.status == HypothesisStatus::ok ? "ok" : "hypothesis_violated"},
                                    {"violations", chk.violations},
                                    {"moment", chk.moment},
                                    {"C_star", chk.c_star},
                                    {"heuristic", chk.heuristic}};
        if (chk.status != HypothesisStatus::ok) run.exit_code = kExitHypothesis;
      }
      finish_json();
    } else if (run.app == simulate) {
      hash_input(run, kernel_path);
      const auto a = load_tensor(kernel_path);
      const auto grid = parse_grid(grid_text);
      const auto samples = static_cast<std::size_t>(std::llround(samples_d));
      const auto draws = sample_Z(a, samples, *seed, common.workers);
      const auto tail = empirical_tail(draws, grid);
      const auto v = norm_profile(a, norm_options(restarts, tol, max_iter, seed)).v;
      params.k = std::max(1, a.order());
      std::string csv = "x,p_hat,ci_half,bound_main,bound_theorem_a\n";
      for (const auto& row : tail) {
        const bool pos = row.x > 0.0 && v[0] > 0.0;
        csv += csv_row({format_double(row.x), format_double(row.p_hat), format_double(row.ci_half),
                        format_double(pos ? tail_bound_main(v, params, row.x) : params.C1),
                        format_double(pos ? tail_bound_theorem_a(v[0], params, row.x) : params.C)});
      }
      emit(common, csv);
      run.result["samples"] = samples;
      run.result["grid_points"] = grid.size();
      run.result["v"] = v;
      std::cerr << report_text(run, elapsed());
    } else if (run.app == oracle) {
      hash_input(run, kernel_path);
      const auto a = load_tensor(kernel_path);
      MomentReport rep = power_moment(a, degree);
      rep.set_oracle(isserlis_moment(a, degree));
      run.result = {{"degree", degree},
                    {"isserlis", *rep.oracle},
                    {"diagram", rep.moment},
                    {"relative_gap", *rep.relative_gap}};
      finish_json();
    } else if (run.app == latala) {
      CoefficientTensor a(3, 1);
      if (!tensor_path.empty() == !generator.empty())
        throw InvalidArgument("latala: give exactly one of --tensor and --generator");
      if (!tensor_path.empty()) {
        hash_input(run, tensor_path);
        a = load_tensor(tensor_path);
      } else if (generator == "rank-one") {
        a = rank_one_instance(gen_dim);
      } else if (generator == "random-sparse") {
        a = random_sparse_instance(gen_dim, 0.5, *seed);
      } else {
        a = orthogonal_slices_instance(gen_dim, *seed);
      }
      if (a.order() != 3) throw InvalidArgument("latala: tensor must have order 3");
      const auto ms = parse_int_list(m_text, "--M");
      const auto samples = static_cast<std::size_t>(std::llround(samples_d));
      const NormOptions o = norm_options(restarts, tol, max_iter, seed);
      std::string csv = "M,E_sup_Y,ci,ratio_Mhalf,ratio_Mquarter\n";
      json per_m = json::array();
      bool violated = false;
      for (int M : ms) {
        if (M < 1) throw InvalidArgument("--M values must be positive");
        const CoefficientTensor inst = rescale ? scale(a, hypothesis_scale(a, M, o)) : a;
        const auto h = check_hypotheses(inst, M, 0.0, o);
        const auto est = estimate_sup_Y_expectation(inst, M, samples, *seed, common.workers);
        csv += csv_row({std::to_string(M), format_double(est.mean), format_double(est.ci),
                        format_double(est.ratio_Mhalf), format_double(est.ratio_Mquarter)});
        violated = violated || !h.all_ok();
        per_m.push_back({{"M", M},
                         {"hypotheses_ok", h.all_ok()},
                         {"three_block_heuristic", h.three_block_heuristic},
                         {"v1", h.v1},
                         {"two_block", h.two_block_norms},
                         {"three_block", h.three_block},
                         {"E_sup_X_squared", expected_sup_X_squared(inst)},
                         {"order_violations", est.order_violations}});
      }
      emit(common, csv);
      run.result["sweep"] = per_m;
      run.result["note"] = "empirical evidence only; no claim about the M^{-1/2} rate";
      if (violated) {
        run.result["status"] = "hypothesis_violated";
        run.exit_code = kExitHypothesis;
      }
      std::cerr << report_text(run, elapsed());
    } else if (run.app == verify) {
      sopts.workers = common.workers;
      const auto res = run_suite(suite, sopts);
      std::string text;
      for (const auto& line : res.ledger) text += line + "\n";
      emit(common, text);
      if (!res.passed) run.exit_code = kExitError;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return run.exit_code;
}
