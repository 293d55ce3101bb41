#include "qpem/cli.hpp"

#include "qpem/errors.hpp"
#include "qpem/external_model.hpp"
#include "qpem/quadratic.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace qpem;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qpem-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("points CSV round trip is bit-exact") {
  cli::RunConfig config;
  config.method = cli::Method::qpem;
  config.r = 3.0;
  auto [set, weights] = cli::build_points(config, 4);

  std::stringstream buffer;
  cli::write_points_csv(buffer, set, weights);
  auto [set2, weights2] = cli::read_points_csv(buffer);

  REQUIRE(set2.count() == set.count());
  REQUIRE(set2.dim() == set.dim());
  CHECK((set2.points.array() == set.points.array()).all());
  CHECK((weights2.w1.array() == weights.w1.array()).all());
  CHECK((weights2.w3.array() == weights.w3.array()).all());
  CHECK((weights2.w4.array() == weights.w4.array()).all());
  for (Index i = 0; i < set.count(); ++i) {
    CHECK(set2.kind[static_cast<std::size_t>(i)] == set.kind[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("cmd_points writes Table-2-sized files and validates parameters") {
  TempDir tmp;
  cli::RunConfig config;
  config.method = cli::Method::qpem;
  config.dim = 10;
  config.r = 3.0;
  const auto echo = cli::cmd_points(config, tmp.file("qpem.csv"));
  CHECK(echo["points"] == 201);

  auto [set, weights] = cli::read_points_csv(tmp.file("qpem.csv"));
  CHECK(set.count() == 201);

  cli::RunConfig hpem;
  hpem.method = cli::Method::hpem;
  hpem.dim = 10;
  CHECK(cli::cmd_points(hpem, tmp.file("hpem.csv"))["points"] == 21);

  cli::RunConfig bad;
  bad.method = cli::Method::qpem;
  bad.dim = 1;
  CHECK_THROWS_WITH_AS(cli::cmd_points(bad, tmp.file("bad.csv")),
                       doctest::Contains("dimension"), ParameterError);
}

TEST_CASE("config validation rejects mismatched parameters") {
  cli::RunConfig config;
  config.method = cli::Method::sgh3;
  config.seed = 7;
  CHECK_THROWS_AS(cli::validate_config(config), ParameterError);

  cli::RunConfig mc;
  mc.method = cli::Method::mc;
  mc.count = 100;
  CHECK_THROWS_WITH_AS(cli::validate_config(mc), doctest::Contains("seed"), ParameterError);

  cli::RunConfig sobol;
  sobol.method = cli::Method::sobol;
  sobol.count = 100;
  sobol.seed = 1;
  CHECK_THROWS_AS(cli::validate_config(sobol), ParameterError);

  cli::RunConfig unscaled;
  unscaled.method = cli::Method::qpem_unscaled;
  unscaled.zeta = -8.0;
  CHECK_THROWS_AS(cli::validate_config(unscaled), ParameterError);
}

TEST_CASE("distribution JSON round trip, both encodings") {
  TempDir tmp;
  GaussianSpec spec;
  spec.mean = Vector(2);
  spec.mean << 1.5, -2.0;
  spec.covariance = Matrix(2, 2);
  spec.covariance << 4.0, 1.0, 1.0, 9.0;
  cli::write_dist_json(tmp.file("cov.json"), spec, "test spec");
  const GaussianSpec read = cli::read_dist_json(tmp.file("cov.json"));
  CHECK((read.mean - spec.mean).cwiseAbs().maxCoeff() == 0.0);
  CHECK((read.covariance - spec.covariance).cwiseAbs().maxCoeff() == 0.0);

  {
    std::ofstream out(tmp.file("corr.json"));
    out << R"({"mean": [0, 0], "std": [1, 2], "corr": [[1, 0.5], [0.5, 1]]})";
  }
  const GaussianSpec from_corr = cli::read_dist_json(tmp.file("corr.json"));
  CHECK(from_corr.covariance(0, 1) == 1.0);
  CHECK(from_corr.covariance(1, 1) == 4.0);

  {
    std::ofstream out(tmp.file("bad.json"));
    out << R"({"mean": [0, 0], "cov": [[1, 2], [2, 1]]})";
  }
  CHECK_THROWS_AS(cli::read_dist_json(tmp.file("bad.json")), ParameterError);
}

TEST_CASE("cmd_propagate on the six-story case reproduces the published row") {
  cli::RunConfig config;
  config.method = cli::Method::qpem;
  config.case_name = "sixstory";
  const auto report = cli::cmd_propagate(config);
  CHECK(report["points"] == 649);
  CHECK(report["result"]["mean"].get<double>() == doctest::Approx(112.6266).epsilon(2e-6));
  CHECK(report["result"]["skew"].get<double>() == doctest::Approx(0.0492).epsilon(2e-3));
  CHECK(report["config"]["zeta_effective"] == -8.0);
}

TEST_CASE("cmd_propagate check-mean mode") {
  cli::RunConfig config;
  config.method = cli::Method::qpem;
  config.case_name = "elasticbar";
  const auto report = cli::cmd_check_mean(config);
  CHECK(report["value_at_mean"].get<double>() == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("external model echo and doubling scripts") {
  // Identity on the first coordinate.
  cli::RunConfig config;
  config.method = cli::Method::qpem;
  config.external_command = "awk -F, '{ printf \"%.17g\\n\", $1; fflush() }'";
  TempDir tmp;
  {
    GaussianSpec spec;
    spec.mean = Vector::Zero(2);
    spec.covariance = Matrix::Identity(2, 2);
    cli::write_dist_json(tmp.file("std2.json"), spec);
  }
  config.dist_file = tmp.file("std2.json");
  const auto report = cli::cmd_propagate(config);
  CHECK(report["result"]["mean"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(report["result"]["std"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));

  // Doubling the model doubles the standard deviation.
  cli::RunConfig doubled = config;
  doubled.external_command = "awk -F, '{ printf \"%.17g\\n\", 2 * $1; fflush() }'";
  const auto report2 = cli::cmd_propagate(doubled);
  CHECK(report2["result"]["std"].get<double>() ==
        doctest::Approx(2 * report["result"]["std"].get<double>()).epsilon(1e-12));
}

TEST_CASE("external model protocol failures") {
  Matrix xs = Matrix::Zero(5, 2);
  for (Index i = 0; i < 5; ++i) xs(i, 0) = static_cast<Scalar>(i);

  // Process dies mid-batch after two outputs: error names the missing range.
  ExternalModelOptions options;
  options.command = "awk -F, 'NR <= 2 { print $1; fflush() } NR == 3 { exit 9 }'";
  CHECK_THROWS_WITH_AS(ExternalModel(options).evaluate(xs), doctest::Contains("status 9"),
                       ProtocolError);

  // Clean exit but short output: missing index range is named.
  options.command = "awk -F, 'NR <= 2 { print $1; fflush() }'";
  CHECK_THROWS_WITH_AS(ExternalModel(options).evaluate(xs), doctest::Contains("2..4"),
                       ProtocolError);

  // Garbage output.
  options.command = "awk -F, '{ print \"not-a-number\" }'";
  CHECK_THROWS_AS(ExternalModel(options).evaluate(xs), ProtocolError);
}

TEST_CASE("external model worker slicing preserves order") {
  Matrix xs(7, 1);
  for (Index i = 0; i < 7; ++i) xs(i, 0) = static_cast<Scalar>(i) + 0.25;
  ExternalModelOptions options;
  options.command = "awk -F, '{ printf \"%.17g\\n\", $1; fflush() }'";
  options.workers = 3;
  const Vector out = ExternalModel(options).evaluate(xs);
  for (Index i = 0; i < 7; ++i) CHECK(out[i] == xs(i, 0));
}

TEST_CASE("constant external model flags undefined shape") {
  TempDir tmp;
  {
    GaussianSpec spec;
    spec.mean = Vector::Zero(2);
    spec.covariance = Matrix::Identity(2, 2);
    cli::write_dist_json(tmp.file("std2.json"), spec);
  }
  cli::RunConfig config;
  config.method = cli::Method::qpem;
  config.external_command = "awk '{ print 3.25; fflush() }'";
  config.dist_file = tmp.file("std2.json");
  const auto report = cli::cmd_propagate(config);
  CHECK(report["result"]["mean"].get<double>() == 3.25);
  CHECK(report["result"]["std"].get<double>() == 0.0);
  CHECK(report["result"]["skew"].is_null());
  CHECK(report["result"]["kurt"].is_null());
}

TEST_CASE("cmd_benchmark writes both CSV layouts") {
  TempDir tmp;
  cli::BenchmarkOptions options;
  options.case_name = "polynomial";
  options.dims = {5};
  options.methods = {"hpem", "qpem-r3-scaled", "sgh3"};
  options.table_path = tmp.file("table.csv");
  options.long_path = tmp.file("long.csv");
  const auto rows = cli::cmd_benchmark(options);
  CHECK(rows.size() == 3 * 5);  // methods x metrics

  std::ifstream table(options.table_path);
  std::string header;
  std::getline(table, header);
  CHECK(header.find("err_skew") != std::string::npos);
  int lines = 0;
  for (std::string line; std::getline(table, line);) ++lines;
  CHECK(lines == 4);  // reference + three methods

  std::ifstream longfmt(options.long_path);
  std::getline(longfmt, header);
  CHECK(header == "case,n,method,points,metric,value,reference_value,rel_error");

  cli::BenchmarkOptions unknown = options;
  unknown.methods = {"bogus"};
  CHECK_THROWS_WITH_AS(cli::cmd_benchmark(unknown), doctest::Contains("bogus"), ParameterError);
}

TEST_CASE("case files dump") {
  TempDir tmp;
  cli::dump_case_files(tmp.file("cases"));
  for (const auto& name : benchmark_case_names()) {
    CHECK(fs::exists(tmp.file("cases") + "/" + name + ".json"));
  }
  const GaussianSpec truss = cli::read_dist_json(tmp.file("cases") + "/rooftruss.json");
  CHECK(truss.dim() == 6);
}
