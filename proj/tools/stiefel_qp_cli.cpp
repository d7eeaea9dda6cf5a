#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stiefel_qp/bench.hpp"
#include "stiefel_qp/matrix_io.hpp"
#include "stiefel_qp/problems.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stiefel_qp;

namespace {

constexpr int kExitInvalidInput = 2;
constexpr int kExitNotConverged = 3;

struct SolverFlags {
  double tau = 1e-3;
  double delta = 1.01;
  std::optional<double> alpha;
  std::optional<double> kkt_tol;
  std::uint64_t seed = 0;
  long max_iters = 10000;
  std::optional<double> timeout_secs;
  bool no_trajectory = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--tau", tau, "stop when one step lowers the objective by at most tau")
        ->capture_default_str();
    cmd->add_option("--delta", delta, "alpha = delta * lambda_max(A)")->capture_default_str();
    cmd->add_option("--alpha", alpha, "explicit alpha, overrides --delta");
    cmd->add_option("--kkt-tol", kkt_tol, "also require the KKT residual below this");
    cmd->add_option("--seed", seed, "seed of the random starting point")->capture_default_str();
    cmd->add_option("--max-iters", max_iters)->capture_default_str();
    cmd->add_option("--timeout-secs", timeout_secs, "wall-clock budget for the iteration");
    cmd->add_flag("--no-trajectory", no_trajectory, "skip trajectory.csv");
  }

  SolverConfig config() const {
    SolverConfig c;
    if (alpha) {
      c.alpha_strategy = ExplicitAlpha{*alpha};
    } else {
      c.alpha_strategy = DeltaTimesLambdaMax{delta};
    }
    c.tau = tau;
    c.kkt_tol = kkt_tol;
    c.seed = seed;
    c.max_iters = max_iters;
    c.time_limit_seconds = timeout_secs;
    c.record_trajectory = !no_trajectory;
    c.validate();
    return c;
  }
};

json report_json(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"final_objective", r.final_objective},
          {"kkt_residual", r.kkt_residual},
          {"alpha", r.alpha_used},
          {"converged", r.converged},
          {"timed_out", r.timed_out},
          {"non_unique_subproblem_seen", r.non_unique_subproblem_seen},
          {"cpu_seconds", r.cpu_seconds},
          {"elapsed_seconds", r.elapsed_seconds}};
}

void write_outputs(const fs::path& dir, const SolveReport& report, json summary,
                   double residual_offset, bool with_trajectory) {
  if (with_trajectory) {
    io::write_file_atomic(dir / "trajectory.csv",
                          bench::trajectory_csv(report, residual_offset));
  }
  summary["report"] = report_json(report);
  io::write_file_atomic(dir / "report.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
}

int solved_exit(const SolveReport& report) {
  if (report.converged) return 0;
  std::cerr << "stiefel-qp: did not converge in " << report.iterations << " iterations"
            << (report.timed_out ? " (time limit reached)" : "") << "\n";
  return kExitNotConverged;
}

int run_gen(const std::string& kind, long n, long m, long k, std::uint64_t seed,
            const fs::path& out) {
  json info = {{"kind", kind}, {"dims", {n, m, k}}, {"seed", seed}};
  if (kind == "uopp") {
    const bench::GeneratedInstance inst = bench::gen_instance(n, m, k, seed);
    io::write_matrix_file(out / "E.csv", inst.problem.e());
    io::write_matrix_file(out / "G.csv", inst.problem.g());
    io::write_matrix_file(out / "singular_values.csv", inst.singular_values);
  } else if (kind == "qpsm") {
    const QpsmProblem p = bench::random_qpsm(m, k, seed);
    io::write_matrix_file(out / "A.csv", p.a().matrix());
    io::write_matrix_file(out / "B.csv", p.b());
  } else if (kind == "planted-uopp") {
    const PlantedProcrustes planted = planted_procrustes(n, m, k, seed);
    io::write_matrix_file(out / "E.csv", planted.problem.e());
    io::write_matrix_file(out / "G.csv", planted.problem.g());
    io::write_matrix_file(out / "Q0.csv", planted.q0);
  } else if (kind == "planted-olsr") {
    const PlantedOlsr planted = planted_olsr(m, n, k, seed);
    io::write_matrix_file(out / "X.csv", planted.problem.x());
    io::write_matrix_file(out / "Y.csv", planted.problem.y());
    io::write_matrix_file(out / "W0.csv", planted.w0);
    io::write_matrix_file(out / "b0.csv", planted.b0);
  } else {
    throw InvalidInput("unknown instance kind '" + kind + "'");
  }
  io::write_file_atomic(out / "instance.json", info.dump(2) + "\n");
  return 0;
}

int run_solve_qpsm(const fs::path& in, const fs::path& out, const SolverFlags& flags) {
  const QpsmProblem problem(SymmetricMatrix(io::read_matrix_file(in / "A.csv")),
                            io::read_matrix_file(in / "B.csv"));
  const SolverConfig config = flags.config();
  const SolveReport report = gpi_solve(problem, config);
  io::write_matrix_file(out / "W.csv", report.final_w.matrix());
  write_outputs(out, report, {{"problem", "qpsm"}}, 0.0, config.record_trajectory);
  return solved_exit(report);
}

int run_solve_uopp(const fs::path& in, const fs::path& out, const SolverFlags& flags) {
  const ProcrustesProblem problem(io::read_matrix_file(in / "E.csv"),
                                  io::read_matrix_file(in / "G.csv"));
  const SolverConfig config = flags.config();
  const UoppReport r = uopp_solve(problem, config);
  io::write_matrix_file(out / "Q.csv", r.report.final_w.matrix());
  write_outputs(out, r.report, {{"problem", "uopp"}, {"residual", r.residual}},
                problem.g().squaredNorm(), config.record_trajectory);
  return solved_exit(r.report);
}

int run_solve_olsr(const fs::path& in, const fs::path& out, const SolverFlags& flags) {
  const OlsrProblem problem(io::read_matrix_file(in / "X.csv"),
                            io::read_matrix_file(in / "Y.csv"));
  const SolverConfig config = flags.config();
  const OlsrSolution s = olsr_solve(problem, config);
  io::write_matrix_file(out / "W.csv", s.w.matrix());
  io::write_matrix_file(out / "b.csv", s.b);
  write_outputs(out, s.report,
                {{"problem", "olsr"}, {"residual", olsr_residual(problem, s.w.matrix(), s.b)}},
                apply_centering(problem.y()).squaredNorm(), config.record_trajectory);
  return solved_exit(s.report);
}

bench::ExperimentSpec load_spec(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw InvalidInput("cannot open config " + config_path);
  try {
    return bench::spec_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw InvalidInput(config_path + ": " + e.what());
  }
}

int run_bench(bench::ExperimentSpec spec) {
  spec.validate();
  const bench::RunRecord record = bench::run_experiment(spec);
  std::cout << bench::to_json(record).dump(2) << "\n";
  bool ok = true;
  for (const bench::RunSummary& run : record.runs) {
    if (run.error) {
      std::cerr << "stiefel-qp: seed " << run.seed << ": " << *run.error << "\n";
      ok = false;
    } else if (!run.converged) {
      ok = false;
    }
  }
  if (record.checks.contains("objectives_agree") &&
      !record.checks.at("objectives_agree").get<bool>()) {
    std::cerr << "stiefel-qp: final objectives disagree across delta values\n";
    ok = false;
  }
  return ok ? 0 : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadratic problems on the Stiefel manifold via generalized power iteration",
               "stiefel-qp"};
  app.require_subcommand(1);

  std::string input;
  std::string output_dir = ".";
  SolverFlags flags;
  long n = 0, m = 0, k = 0;
  std::uint64_t seed = 0;
  std::string kind = "uopp";

  auto* gen = app.add_subcommand("gen", "write a seeded random instance as CSV");
  gen->add_option("--kind", kind, "uopp, qpsm, planted-uopp or planted-olsr")
      ->capture_default_str();
  gen->add_option("--n", n, "rows of E (samples for olsr)")->required();
  gen->add_option("--m", m)->required();
  gen->add_option("--k", k)->required();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--output-dir", output_dir)->capture_default_str();

  auto add_solve = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--input", input, "directory holding the input CSV files")->required();
    cmd->add_option("--output-dir", output_dir)->capture_default_str();
    flags.add_to(cmd);
    return cmd;
  };
  auto* solve_qpsm = add_solve("solve-qpsm", "min Tr(W'AW - 2W'B) from A.csv, B.csv");
  auto* solve_uopp = add_solve("solve-uopp", "min ||EQ - G||^2 from E.csv, G.csv");
  auto* solve_olsr = add_solve("solve-olsr", "orthogonal least squares from X.csv, Y.csv");

  std::string config_path;
  std::vector<double> deltas;
  std::vector<std::uint64_t> seeds;
  std::optional<double> tau, kkt_tol, timeout_secs;
  std::optional<long> max_iters;
  unsigned threads = 0;
  auto add_experiment = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "ExperimentSpec JSON");
    cmd->add_option("--n", n);
    cmd->add_option("--m", m);
    cmd->add_option("--k", k);
    cmd->add_option("--seed", seeds, "one or more seeds");
    cmd->add_option("--tau", tau);
    cmd->add_option("--kkt-tol", kkt_tol);
    cmd->add_option("--max-iters", max_iters);
    cmd->add_option("--timeout-secs", timeout_secs);
    cmd->add_option("--threads", threads, "parallel runs (default STIEFEL_QP_THREADS)");
    cmd->add_option("--output-dir", output_dir)->capture_default_str();
  };
  auto* sweep = app.add_subcommand("sweep-delta", "delta sweep with trajectory files");
  add_experiment(sweep);
  sweep->add_option("--delta", deltas, "delta values");
  auto* bench_cmd = app.add_subcommand("bench", "run an experiment spec");
  add_experiment(bench_cmd);
  bench_cmd->add_option("--kind", kind, "qpsm, uopp, olsr, lsqe, delta_sweep or scaling");
  bench_cmd->add_option("--delta", deltas, "delta values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidInput;
  }

  auto experiment = [&](bench::ExperimentKind fallback, bool kind_given) {
    bench::ExperimentSpec spec;
    if (!config_path.empty()) {
      spec = load_spec(config_path);
    } else {
      spec = bench::default_spec(kind_given ? bench::parse_kind(kind) : fallback);
    }
    if (n || m || k) {
      spec.dims = {n ? n : spec.dims.n, m ? m : spec.dims.m, k ? k : spec.dims.k};
    }
    if (!seeds.empty()) spec.seeds = seeds;
    if (!deltas.empty()) spec.delta_values = deltas;
    if (tau) spec.tau = *tau;
    if (kkt_tol) spec.kkt_tol = *kkt_tol;
    if (max_iters) spec.max_iters = *max_iters;
    if (timeout_secs) spec.timeout_secs = *timeout_secs;
    if (threads) spec.threads = threads;
    if (config_path.empty() || bench_cmd->count("--output-dir") || sweep->count("--output-dir")) {
      spec.output_dir = output_dir;
    }
    return spec;
  };

  try {
    if (gen->parsed()) return run_gen(kind, n, m, k, seed, output_dir);
    if (solve_qpsm->parsed()) return run_solve_qpsm(input, output_dir, flags);
    if (solve_uopp->parsed()) return run_solve_uopp(input, output_dir, flags);
    if (solve_olsr->parsed()) return run_solve_olsr(input, output_dir, flags);
    if (sweep->parsed()) {
      bench::ExperimentSpec spec = experiment(bench::ExperimentKind::DeltaSweep, false);
      if (spec.kind != bench::ExperimentKind::DeltaSweep) {
        throw InvalidInput("sweep-delta needs a delta_sweep spec");
      }
      return run_bench(spec);
    }
    if (bench_cmd->parsed()) {
      return run_bench(experiment(bench::ExperimentKind::Uopp, bench_cmd->count("--kind") > 0));
    }
  } catch (const InvalidInput& e) {
    std::cerr << "stiefel-qp: invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const SolverError& e) {
    std::cerr << "stiefel-qp: solver failed at iteration " << e.iteration() << ": "
              << e.what() << "\n";
    return kExitNotConverged;
  } catch (const std::exception& e) {
    std::cerr << "stiefel-qp: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
