#include "qpem/cli.hpp"
#include "qpem/errors.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitParameter = 2;
constexpr int kExitModel = 3;
constexpr int kExitProtocol = 4;

struct MethodFlags {
  std::string method;
  std::optional<double> r, zeta, xi;
  std::optional<qpem::Index> count;
  std::optional<std::uint64_t> seed, skip;
};

void add_method_flags(CLI::App* cmd, MethodFlags& flags, qpem::cli::RunConfig& config) {
  cmd->add_option("--method", flags.method,
                  "qpem | qpem-unscaled | hpem | sgh3 | mc | lhs | sobol")
      ->required();
  cmd->add_option("--r", flags.r, "QPEM axis radius (> sqrt(2); default 3)");
  cmd->add_option("--zeta", flags.zeta, "QPEM third-order central scaling (default -8)");
  cmd->add_option("--xi", flags.xi, "QPEM fourth-order central scaling (default 60)");
  cmd->add_option("--count", flags.count, "sample count (mc, lhs, sobol)");
  cmd->add_option("--seed", flags.seed, "stream seed (mc, lhs)");
  cmd->add_option("--skip", flags.skip, "sobol burn-in; >= 1 (the index-0 point is the origin)");
  cmd->add_option("--workers", config.workers, "model evaluation worker count")
      ->check(CLI::PositiveNumber);
}

void apply_method_flags(const MethodFlags& flags, qpem::cli::RunConfig& config) {
  const auto method = qpem::cli::method_from_string(flags.method);
  if (!method) {
    throw qpem::ParameterError("unknown method '" + flags.method +
                               "'; expected qpem, qpem-unscaled, hpem, sgh3, mc, lhs or sobol");
  }
  config.method = *method;
  config.r = flags.r;
  config.zeta = flags.zeta;
  config.xi = flags.xi;
  config.count = flags.count;
  config.seed = flags.seed;
  config.skip = flags.skip;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);
  CLI::App app{
      "Deterministic-sampling uncertainty propagation: first four output moments of models "
      "under correlated Gaussian inputs (QPEM, HPEM, sparse Gauss-Hermite, MC/LHS/Sobol)"};
  app.require_subcommand(1);

  // --- points ---------------------------------------------------------------
  auto* points = app.add_subcommand("points", "generate a point set and weight table as CSV");
  MethodFlags points_flags;
  qpem::cli::RunConfig points_config;
  std::string points_out;
  qpem::Index points_dim = 0;
  add_method_flags(points, points_flags, points_config);
  points->add_option("--dim", points_dim, "input dimension");
  points->add_option("--case", points_config.case_name, "take the dimension from a built-in case");
  points->add_option("--out", points_out, "output CSV path")->required();

  // --- propagate ------------------------------------------------------------
  auto* propagate =
      app.add_subcommand("propagate", "generate, transform, evaluate and estimate moments");
  MethodFlags prop_flags;
  qpem::cli::RunConfig prop_config;
  std::string prop_out;
  std::string prop_factor = "cholesky";
  std::optional<qpem::Index> prop_dim;
  bool prop_check_mean = false;
  add_method_flags(propagate, prop_flags, prop_config);
  propagate->add_option("--case", prop_config.case_name,
                        "built-in case: polynomial | rooftruss | sixstory | elasticbar");
  propagate->add_option("--dim", prop_dim, "polynomial case dimension");
  propagate->add_option("--external", prop_config.external_command,
                        "external model command (line protocol over stdin/stdout)");
  propagate->add_option("--dist", prop_config.dist_file,
                        "input-distribution JSON for --external");
  propagate->add_option("--factor", prop_factor, "covariance factorization: cholesky | eigen");
  propagate->add_option("--timeout", prop_config.timeout_seconds,
                        "external model timeout in seconds (<= 0 disables)");
  propagate->add_option("--out", prop_out, "write the JSON report here (also printed)");
  propagate->add_flag("--check-mean", prop_check_mean,
                      "only evaluate the model at the input mean (z = 0) and print the value");

  // --- benchmark ------------------------------------------------------------
  auto* benchmark =
      app.add_subcommand("benchmark", "compare methods on a case against its reference");
  qpem::cli::BenchmarkOptions bench_options;
  benchmark->add_option("--case", bench_options.case_name, "case name")->required();
  benchmark->add_option("--dims", bench_options.dims, "polynomial sweep dimensions")
      ->delimiter(',');
  benchmark
      ->add_option("--methods", bench_options.methods,
                   "subset of: lhs sobol mc sgh3 hpem qpem-sqrt3 qpem-sqrt3-scaled "
                   "qpem-r3 qpem-r3-scaled")
      ->delimiter(',');
  benchmark->add_option("--seed", bench_options.seed, "seed for the sampling methods");
  benchmark->add_option("--workers", bench_options.workers, "model evaluation worker count")
      ->check(CLI::PositiveNumber);
  benchmark->add_option("--table", bench_options.table_path, "wide-format CSV path");
  benchmark->add_option("--long", bench_options.long_path, "long-format CSV path (for plotting)");

  // --- cases ----------------------------------------------------------------
  auto* cases = app.add_subcommand("cases", "write built-in input distributions as JSON files");
  std::string cases_dir = "cases";
  cases->add_option("--dir", cases_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitParameter;
  }

  try {
    if (points->parsed()) {
      apply_method_flags(points_flags, points_config);
      points_config.dim = points_dim;
      const auto echo = qpem::cli::cmd_points(points_config, points_out);
      std::cout << echo.dump(2) << "\n";
    } else if (propagate->parsed()) {
      apply_method_flags(prop_flags, prop_config);
      prop_config.case_dim = prop_dim;
      const auto factor = qpem::factor_method_from_string(prop_factor);
      if (!factor) {
        throw qpem::ParameterError("unknown factorization '" + prop_factor +
                                   "'; expected cholesky or eigen");
      }
      prop_config.factor = *factor;
      const auto report = prop_check_mean ? qpem::cli::cmd_check_mean(prop_config)
                                          : qpem::cli::cmd_propagate(prop_config, prop_out);
      std::cout << report.dump(2) << "\n";
    } else if (benchmark->parsed()) {
      const auto rows = qpem::cli::cmd_benchmark(bench_options);
      std::cout << rows.dump(2) << "\n";
    } else if (cases->parsed()) {
      qpem::cli::dump_case_files(cases_dir);
      std::cout << "wrote case files to " << cases_dir << "\n";
    }
  } catch (const qpem::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitParameter;
  } catch (const qpem::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kExitModel;
  } catch (const qpem::ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kExitProtocol;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
