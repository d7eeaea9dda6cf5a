#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stiefel_qp/gpi.hpp"
#include "stiefel_qp/problems.hpp"

namespace stiefel_qp::bench {

enum class ExperimentKind { Qpsm, Uopp, Olsr, Lsqe, DeltaSweep, Scaling };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

/// (n, m, k): E is n x m and Q is m x k; for OLSR X is m x n and Y is n x k.
struct Dims {
  long n = 0;
  long m = 0;
  long k = 0;

  bool operator==(const Dims&) const = default;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Uopp;
  Dims dims;
  std::vector<std::uint64_t> seeds{0};
  std::vector<double> delta_values{1.01};
  double tau = 1e-3;
  std::optional<double> kkt_tol;
  long max_iters = 10000;
  double timeout_secs = 600.0;
  /// Scaling mode: k values swept at n = m = dims.m.
  std::vector<long> k_values;
  /// Timing mode: explicit (n, m, k) cells; defaults to {dims}.
  std::vector<Dims> cells;
  std::filesystem::path output_dir = ".";
  /// 0 -> STIEFEL_QP_THREADS, or the number of logical processors.
  unsigned threads = 0;

  void validate() const;
};

/// Defaults for a kind: tau = 1e-3 everywhere except OLSR, whose planted-fit
/// check needs a tight solve (tau = 1e-12, kkt_tol = 1e-10), and the delta
/// sweep (tau = 1e-9, kkt_tol = 1e-8).
ExperimentSpec default_spec(ExperimentKind kind);

nlohmann::json to_json(const ExperimentSpec& spec);
/// Missing keys keep the kind's defaults. Throws InvalidInput.
ExperimentSpec spec_from_json(const nlohmann::json& j);

struct GeneratedInstance {
  ProcrustesProblem problem;
  /// Singular values of E in descending order.
  Vector singular_values;
};

/// E = P diag(s) R^T with P, R the orthonormal QR factors of seeded Gaussian
/// matrices and s_i = |N(0,1)| sorted descending; G is seeded Gaussian.
GeneratedInstance gen_instance(long n, long m, long k, std::uint64_t seed);

/// Symmetrized Gaussian A (indefinite in general) and Gaussian B.
QpsmProblem random_qpsm(long m, long k, std::uint64_t seed);

struct RunSummary {
  Dims dims;
  std::uint64_t seed = 0;
  std::optional<double> delta;
  long iterations = 0;
  double final_objective = 0.0;
  double final_residual = 0.0;
  double kkt_residual = 0.0;
  double alpha = 0.0;
  bool converged = false;
  bool timed_out = false;
  double cpu_seconds = 0.0;
  std::string trajectory_file;
  std::optional<std::string> error;
  nlohmann::json checks = nlohmann::json::object();
};

struct RunRecord {
  ExperimentSpec spec;
  std::vector<RunSummary> runs;
  nlohmann::json checks = nlohmann::json::object();
  double wall_seconds = 0.0;
};

nlohmann::json to_json(const RunRecord& record, bool include_timing = true);

/// Trajectory CSV with columns iteration,objective,residual,kkt. The residual
/// column is the objective plus the problem constant (||G||^2 for
/// Procrustes, ||HY||^2 for OLSR, 0 for a raw QPSM instance).
std::string trajectory_csv(const SolveReport& report, double residual_offset);

/// Number of parallel runs: STIEFEL_QP_THREADS if set, else logical CPUs.
unsigned thread_budget();

/// |a - b| / max(|a|, |b|), 0 when both vanish.
double relative_gap(double a, double b);

/// One record per (seed, delta). Writes one trajectory CSV per pair and
/// checks that the final objectives of each seed agree within 1e-4 relative.
RunRecord run_delta_sweep(const ExperimentSpec& spec);

/// CPU time, iterations and final residual per (n, m, k) cell and seed.
/// Cells exceeding timeout_secs are recorded as timed out.
RunRecord run_timing(const ExperimentSpec& spec);

/// Planted OLSR instances with exact-fit, bias-stationarity and
/// translation-invariance checks.
RunRecord run_olsr(const ExperimentSpec& spec);

/// Random QPSM instances with indefinite A.
RunRecord run_qpsm(const ExperimentSpec& spec);

/// Dispatch on spec.kind, then write summary.json (and timing.csv for timing
/// kinds) into spec.output_dir.
RunRecord run_experiment(const ExperimentSpec& spec);

struct TimingCell {
  Dims dims;
  std::uint64_t seed = 0;
  /// Empty when the cell timed out ("-" in the table).
  std::optional<double> cpu_seconds;
  std::optional<long> iterations;
  std::optional<double> residual;

  bool operator==(const TimingCell&) const = default;
};

std::vector<TimingCell> timing_cells(const RunRecord& record);
std::string format_timing_table(const std::vector<TimingCell>& cells);
std::vector<TimingCell> parse_timing_table(const std::string& text);

}  // namespace stiefel_qp::bench
