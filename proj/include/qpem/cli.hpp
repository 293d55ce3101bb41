#pragma once

// Command-line front end plumbing: run configuration, the points/propagate/
// benchmark pipelines, and the CSV/JSON exchange formats. Kept out of
// main.cpp so the pipelines are directly testable.

#include "qpem/benchmarks.hpp"
#include "qpem/core.hpp"
#include "qpem/transform.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qpem::cli {

enum class Method {
  qpem,            // scaled, zeta = -8, xi = 60 unless overridden
  qpem_unscaled,   // zeta = xi = 0
  hpem,
  sgh3,
  mc,
  lhs,
  sobol,
};

std::string_view to_string(Method method);
std::optional<Method> method_from_string(std::string_view name);

struct RunConfig {
  Method method = Method::qpem;
  Index dim = 0;

  std::optional<Scalar> r;       // qpem variants only
  std::optional<Scalar> zeta;    // qpem only
  std::optional<Scalar> xi;      // qpem only
  std::optional<Index> count;    // sampling methods only
  std::optional<std::uint64_t> seed;  // mc, lhs only
  std::optional<std::uint64_t> skip;  // sobol only

  std::string case_name;              // built-in benchmark case
  std::optional<Index> case_dim;      // polynomial dimension
  std::string external_command;       // external model (needs dist_file)
  std::string dist_file;              // input-distribution JSON

  FactorMethod factor = FactorMethod::cholesky;
  Index workers = 1;
  double timeout_seconds = 300;
};

/// Rejects parameter combinations that do not belong to the method (e.g. a
/// seed for a deterministic rule) and enforces per-method requirements.
void validate_config(const RunConfig& config);

/// Point-set construction for the configured method at dimension n.
std::pair<SigmaPointSet, WeightTable> build_points(const RunConfig& config, Index n);

// --- points CSV: header "kind,w1,w2,w3,w4,z1,...,zn", one row per point,
//     decimals with 17 significant digits so a round trip is bit-exact.
void write_points_csv(std::ostream& out, const SigmaPointSet& set, const WeightTable& weights);
void write_points_csv(const std::string& path, const SigmaPointSet& set,
                      const WeightTable& weights);
std::pair<SigmaPointSet, WeightTable> read_points_csv(std::istream& in);
std::pair<SigmaPointSet, WeightTable> read_points_csv(const std::string& path);

// --- input-distribution JSON: {"mean": [...]} plus either {"cov": [[...]]}
//     or {"std": [...], "corr": [[...]]}.
GaussianSpec read_dist_json(const std::string& path);
void write_dist_json(const std::string& path, const GaussianSpec& spec,
                     const std::string& note = {});

nlohmann::json summary_to_json(const MomentSummary& summary);
nlohmann::json config_to_json(const RunConfig& config);

/// cmd_points: writes the configured point set; returns the JSON echo.
nlohmann::json cmd_points(const RunConfig& config, const std::string& out_path);

/// cmd_propagate: full pipeline (points, transform, evaluate, estimate).
/// Returns the JSON report; optionally writes it to out_path.
nlohmann::json cmd_propagate(const RunConfig& config, const std::string& out_path = {});

/// Deterministic model value at the input mean (z = 0 check mode).
nlohmann::json cmd_check_mean(const RunConfig& config);

struct BenchmarkOptions {
  std::string case_name;
  std::vector<Index> dims;          // polynomial sweep; empty = case default
  std::vector<std::string> methods; // empty = the full published comparison set
  std::uint64_t seed = 2024;
  Index workers = 1;
  std::string table_path;           // wide CSV mirroring the published layout
  std::string long_path;            // long format for plotting
};

/// cmd_benchmark: runs each method on the case, compares against the stored
/// MC reference row (or the analytic oracle for the polynomial case), and
/// writes both CSV layouts. Returns the long-format rows as JSON.
nlohmann::json cmd_benchmark(const BenchmarkOptions& options);

/// Writes every built-in case's input distribution as JSON files under dir.
void dump_case_files(const std::string& dir);

}  // namespace qpem::cli
