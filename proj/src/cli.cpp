#include "qpem/cli.hpp"

#include "qpem/errors.hpp"
#include "qpem/estimator.hpp"
#include "qpem/external_model.hpp"
#include "qpem/hpem.hpp"
#include "qpem/quadratic.hpp"
#include "qpem/sampling.hpp"
#include "qpem/sparse_grid.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qpem::cli {
namespace {

std::string format_number(Scalar v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Scalar parse_number(std::string_view token, const char* what) {
  Scalar value = 0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    std::ostringstream os;
    os << "malformed " << what << " value '" << token << "'";
    throw ParameterError(os.str());
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

constexpr Scalar kSqrt3 = 1.7320508075688772;

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::qpem: return "qpem";
    case Method::qpem_unscaled: return "qpem-unscaled";
    case Method::hpem: return "hpem";
    case Method::sgh3: return "sgh3";
    case Method::mc: return "mc";
    case Method::lhs: return "lhs";
    case Method::sobol: return "sobol";
  }
  return "unknown";
}

std::optional<Method> method_from_string(std::string_view name) {
  if (name == "qpem") return Method::qpem;
  if (name == "qpem-unscaled") return Method::qpem_unscaled;
  if (name == "hpem") return Method::hpem;
  if (name == "sgh3") return Method::sgh3;
  if (name == "mc") return Method::mc;
  if (name == "lhs") return Method::lhs;
  if (name == "sobol") return Method::sobol;
  return std::nullopt;
}

void validate_config(const RunConfig& config) {
  const auto reject = [&](bool present, const char* flag, const char* reason) {
    if (present) {
      std::ostringstream os;
      os << "--" << flag << " does not apply to method '" << to_string(config.method) << "' ("
         << reason << ")";
      throw ParameterError(os.str());
    }
  };
  const bool is_qpem = config.method == Method::qpem || config.method == Method::qpem_unscaled;
  const bool is_sampling = config.method == Method::mc || config.method == Method::lhs ||
                           config.method == Method::sobol;

  if (!is_qpem) {
    reject(config.r.has_value(), "r", "the radius is a QPEM parameter");
    reject(config.zeta.has_value(), "zeta", "scaling applies to QPEM only");
    reject(config.xi.has_value(), "xi", "scaling applies to QPEM only");
  }
  if (config.method == Method::qpem_unscaled) {
    reject(config.zeta.has_value(), "zeta", "qpem-unscaled pins zeta = 0");
    reject(config.xi.has_value(), "xi", "qpem-unscaled pins xi = 0");
  }
  if (!is_sampling) {
    reject(config.count.has_value(), "count", "deterministic rules fix their point count");
  } else if (!config.count.has_value() || *config.count < 1) {
    throw ParameterError("sampling methods require --count >= 1");
  }
  if (config.method == Method::mc || config.method == Method::lhs) {
    if (!config.seed.has_value()) {
      throw ParameterError("mc and lhs require --seed (runs are seeded, never ambient-random)");
    }
  } else {
    reject(config.seed.has_value(), "seed", "seed applies to mc and lhs only");
  }
  if (config.method != Method::sobol) {
    reject(config.skip.has_value(), "skip", "skip applies to sobol only");
  }
  if (!config.external_command.empty() && !config.case_name.empty()) {
    throw ParameterError("choose either a built-in --case or an --external command, not both");
  }
}

std::pair<SigmaPointSet, WeightTable> build_points(const RunConfig& config, Index n) {
  validate_config(config);
  switch (config.method) {
    case Method::qpem: {
      QpemParams params{n, config.r.value_or(3.0), config.zeta.value_or(-8.0),
                        config.xi.value_or(60.0)};
      return build_qpem(params);
    }
    case Method::qpem_unscaled: {
      QpemParams params{n, config.r.value_or(3.0), 0.0, 0.0};
      return build_qpem(params);
    }
    case Method::hpem:
      return build_hpem(n, standard_normal_shape(n));
    case Method::sgh3:
      return smolyak_grid(n, 2);
    case Method::mc:
    case Method::lhs:
    case Method::sobol: {
      SamplePlan plan;
      plan.method = config.method == Method::mc    ? SamplePlan::Method::mc
                    : config.method == Method::lhs ? SamplePlan::Method::lhs
                                                   : SamplePlan::Method::sobol;
      plan.count = *config.count;
      plan.seed = config.seed.value_or(0);
      plan.skip = config.skip.value_or(1);
      return generate_samples(plan, n);
    }
  }
  throw ParameterError("unreachable method");
}

// ---------------------------------------------------------------------------
// Points CSV

void write_points_csv(std::ostream& out, const SigmaPointSet& set, const WeightTable& weights) {
  out << "kind,w1,w2,w3,w4";
  for (Index j = 0; j < set.dim(); ++j) out << ",z" << (j + 1);
  out << "\n";
  for (Index i = 0; i < set.count(); ++i) {
    out << to_string(set.kind[static_cast<std::size_t>(i)]) << ',' << format_number(weights.w1[i])
        << ',' << format_number(weights.w2[i]) << ',' << format_number(weights.w3[i]) << ','
        << format_number(weights.w4[i]);
    for (Index j = 0; j < set.dim(); ++j) out << ',' << format_number(set.points(i, j));
    out << "\n";
  }
}

void write_points_csv(const std::string& path, const SigmaPointSet& set,
                      const WeightTable& weights) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot open output file '" + path + "'");
  write_points_csv(out, set, weights);
}

std::pair<SigmaPointSet, WeightTable> read_points_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParameterError("points file is empty");
  const auto header = split(line, ',');
  if (header.size() < 6 || header[0] != "kind") {
    throw ParameterError("points file header must be kind,w1,w2,w3,w4,z1,...");
  }
  const Index n = static_cast<Index>(header.size()) - 5;

  std::vector<PointKind> kinds;
  std::vector<std::array<Scalar, 4>> ws;
  std::vector<Scalar> coords;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (static_cast<Index>(fields.size()) != n + 5) {
      throw ParameterError("points file row has the wrong number of columns");
    }
    const auto kind = point_kind_from_string(fields[0]);
    if (!kind) throw ParameterError("unknown point kind '" + std::string(fields[0]) + "'");
    kinds.push_back(*kind);
    ws.push_back({parse_number(fields[1], "w1"), parse_number(fields[2], "w2"),
                  parse_number(fields[3], "w3"), parse_number(fields[4], "w4")});
    for (Index j = 0; j < n; ++j) {
      coords.push_back(parse_number(fields[static_cast<std::size_t>(5 + j)], "coordinate"));
    }
  }

  const Index count = static_cast<Index>(kinds.size());
  SigmaPointSet set;
  set.kind = std::move(kinds);
  set.points = Matrix(count, n);
  for (Index i = 0; i < count; ++i) {
    for (Index j = 0; j < n; ++j) {
      set.points(i, j) = coords[static_cast<std::size_t>(i * n + j)];
    }
  }
  WeightTable weights;
  weights.w1 = Vector(count);
  weights.w2 = Vector(count);
  weights.w3 = Vector(count);
  weights.w4 = Vector(count);
  for (Index i = 0; i < count; ++i) {
    weights.w1[i] = ws[static_cast<std::size_t>(i)][0];
    weights.w2[i] = ws[static_cast<std::size_t>(i)][1];
    weights.w3[i] = ws[static_cast<std::size_t>(i)][2];
    weights.w4[i] = ws[static_cast<std::size_t>(i)][3];
  }
  return {std::move(set), std::move(weights)};
}

std::pair<SigmaPointSet, WeightTable> read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open points file '" + path + "'");
  return read_points_csv(in);
}

// ---------------------------------------------------------------------------
// Input-distribution JSON

GaussianSpec read_dist_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open distribution file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("distribution file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.contains("mean") || !doc["mean"].is_array()) {
    throw ParameterError("distribution file needs a 'mean' array");
  }
  GaussianSpec spec;
  const auto& mean = doc["mean"];
  spec.mean = Vector(static_cast<Index>(mean.size()));
  for (Index i = 0; i < spec.mean.size(); ++i) {
    spec.mean[i] = mean[static_cast<std::size_t>(i)].get<Scalar>();
  }
  const Index n = spec.mean.size();

  auto read_matrix = [&](const nlohmann::json& rows, const char* what) {
    if (!rows.is_array() || static_cast<Index>(rows.size()) != n) {
      throw ParameterError(std::string(what) + " must be an n x n array");
    }
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Index>(row.size()) != n) {
        throw ParameterError(std::string(what) + " must be an n x n array");
      }
      for (Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<Scalar>();
    }
    return m;
  };

  if (doc.contains("cov")) {
    spec.covariance = read_matrix(doc["cov"], "'cov'");
  } else if (doc.contains("std") && doc.contains("corr")) {
    const auto& stds_json = doc["std"];
    if (!stds_json.is_array() || static_cast<Index>(stds_json.size()) != n) {
      throw ParameterError("'std' must be an array matching 'mean'");
    }
    Vector stds(n);
    for (Index i = 0; i < n; ++i) stds[i] = stds_json[static_cast<std::size_t>(i)].get<Scalar>();
    spec.covariance = corr_to_cov(stds, read_matrix(doc["corr"], "'corr'"));
  } else {
    throw ParameterError("distribution file needs either 'cov' or 'std' + 'corr'");
  }

  const auto violations = validate_spec(spec);
  if (!violations.empty()) {
    throw ParameterError("invalid distribution in '" + path + "': " + violations.front());
  }
  return spec;
}

void write_dist_json(const std::string& path, const GaussianSpec& spec, const std::string& note) {
  nlohmann::json doc;
  if (!note.empty()) doc["note"] = note;
  doc["mean"] = std::vector<Scalar>(spec.mean.data(), spec.mean.data() + spec.mean.size());
  nlohmann::json cov = nlohmann::json::array();
  for (Index i = 0; i < spec.dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < spec.dim(); ++j) row.push_back(spec.covariance(i, j));
    cov.push_back(std::move(row));
  }
  doc["cov"] = std::move(cov);
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot open output file '" + path + "'");
  out << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Reports

nlohmann::json summary_to_json(const MomentSummary& summary) {
  nlohmann::json j;
  j["mean"] = summary.mean;
  j["std"] = summary.std;
  j["skew"] = summary.skew ? nlohmann::json(*summary.skew) : nlohmann::json(nullptr);
  j["kurt"] = summary.kurt ? nlohmann::json(*summary.kurt) : nlohmann::json(nullptr);
  j["m2"] = summary.m2;
  j["m3"] = summary.m3;
  j["m4"] = summary.m4;
  return j;
}

nlohmann::json config_to_json(const RunConfig& config) {
  nlohmann::json j;
  j["method"] = std::string(to_string(config.method));
  j["dim"] = config.dim;
  if (config.r) j["r"] = *config.r;
  if (config.zeta) j["zeta"] = *config.zeta;
  if (config.xi) j["xi"] = *config.xi;
  if (config.method == Method::qpem) {
    j["r_effective"] = config.r.value_or(3.0);
    j["zeta_effective"] = config.zeta.value_or(-8.0);
    j["xi_effective"] = config.xi.value_or(60.0);
  } else if (config.method == Method::qpem_unscaled) {
    j["r_effective"] = config.r.value_or(3.0);
    j["zeta_effective"] = 0.0;
    j["xi_effective"] = 0.0;
  }
  if (config.count) j["count"] = *config.count;
  if (config.seed) j["seed"] = *config.seed;
  if (config.skip) j["skip"] = *config.skip;
  if (!config.case_name.empty()) j["case"] = config.case_name;
  if (config.case_dim) j["case_dim"] = *config.case_dim;
  if (!config.external_command.empty()) j["external"] = config.external_command;
  if (!config.dist_file.empty()) j["dist"] = config.dist_file;
  j["factor"] = std::string(to_string(config.factor));
  j["workers"] = config.workers;
  return j;
}

nlohmann::json cmd_points(const RunConfig& config, const std::string& out_path) {
  Index n = config.dim;
  if (!config.case_name.empty()) {
    n = make_benchmark_case(config.case_name, config.case_dim).dim;
  }
  if (n < 1) throw ParameterError("points needs --dim >= 1 (or a --case)");
  auto [set, weights] = build_points(config, n);
  write_points_csv(out_path, set, weights);

  nlohmann::json j;
  j["config"] = config_to_json(config);
  j["points"] = set.count();
  j["stability_factor"] = stability_factor(weights);
  j["file"] = out_path;
  return j;
}

namespace {

struct ResolvedProblem {
  GaussianSpec input;
  std::function<Scalar(const Vector&)> model;  // empty when external
  std::optional<ExternalModel> external;
  std::string units_note;
  std::string model_name;
};

ResolvedProblem resolve_problem(const RunConfig& config) {
  ResolvedProblem problem;
  if (!config.case_name.empty()) {
    BenchmarkCase bench = make_benchmark_case(config.case_name, config.case_dim);
    problem.input = std::move(bench.input);
    problem.model = std::move(bench.model);
    problem.units_note = std::move(bench.units_note);
    problem.model_name = bench.name;
    return problem;
  }
  if (config.external_command.empty()) {
    throw ParameterError("propagate needs a --case name or an --external command");
  }
  if (config.dist_file.empty()) {
    throw ParameterError("--external needs --dist <file.json> describing the input distribution");
  }
  problem.input = read_dist_json(config.dist_file);
  ExternalModelOptions options;
  options.command = config.external_command;
  options.timeout_seconds = config.timeout_seconds;
  options.workers = config.workers;
  problem.external.emplace(std::move(options));
  problem.model_name = "external:" + config.external_command;
  return problem;
}

}  // namespace

nlohmann::json cmd_propagate(const RunConfig& config, const std::string& out_path) {
  const auto start = std::chrono::steady_clock::now();
  ResolvedProblem problem = resolve_problem(config);
  const Index n = problem.input.dim();

  auto [set, weights] = build_points(config, n);
  const CovFactor factor = factor_covariance(problem.input, config.factor);
  const Matrix xs = to_x_space(set, problem.input, factor);

  EvaluationBatch batch;
  if (problem.external) {
    batch.outputs = problem.external->evaluate(xs);
    batch.provenance = problem.model_name;
  } else {
    batch = evaluate_model(problem.model, xs, problem.model_name, config.workers);
  }
  const MomentSummary summary = estimate_moments(batch, weights);
  const double elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  nlohmann::json report;
  report["config"] = config_to_json(config);
  report["model"] = problem.model_name;
  if (!problem.units_note.empty()) report["units_note"] = problem.units_note;
  report["points"] = set.count();
  report["stability_factor"] = stability_factor(weights);
  report["result"] = summary_to_json(summary);
  report["elapsed_ms"] = elapsed_ms;

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw ParameterError("cannot open output file '" + out_path + "'");
    out << report.dump(2) << "\n";
  }
  return report;
}

nlohmann::json cmd_check_mean(const RunConfig& config) {
  ResolvedProblem problem = resolve_problem(config);
  Scalar value = 0;
  if (problem.external) {
    Matrix one_row = problem.input.mean.transpose();
    value = problem.external->evaluate(one_row)[0];
  } else {
    value = problem.model(problem.input.mean);
  }
  nlohmann::json j;
  j["model"] = problem.model_name;
  j["value_at_mean"] = value;
  if (!problem.units_note.empty()) j["units_note"] = problem.units_note;
  return j;
}

// ---------------------------------------------------------------------------
// Benchmark comparison

namespace {

struct MethodSpec {
  std::string token;
  RunConfig config;
};

MethodSpec benchmark_method(const std::string& token, Index n, std::uint64_t seed) {
  MethodSpec spec;
  spec.token = token;
  RunConfig& c = spec.config;
  const Index matched_count = 2 * n * n + 1;  // sampling budget matched to QPEM
  if (token == "lhs") {
    c.method = Method::lhs;
    c.count = matched_count;
    c.seed = seed;
  } else if (token == "sobol" || token == "qmc") {
    spec.token = "sobol";
    c.method = Method::sobol;
    c.count = matched_count;
  } else if (token == "mc") {
    c.method = Method::mc;
    c.count = matched_count;
    c.seed = seed;
  } else if (token == "sgh3") {
    c.method = Method::sgh3;
  } else if (token == "hpem") {
    c.method = Method::hpem;
  } else if (token == "qpem-sqrt3") {
    c.method = Method::qpem_unscaled;
    c.r = kSqrt3;
  } else if (token == "qpem-sqrt3-scaled") {
    c.method = Method::qpem;
    c.r = kSqrt3;
  } else if (token == "qpem-r3") {
    c.method = Method::qpem_unscaled;
    c.r = 3.0;
  } else if (token == "qpem-r3-scaled") {
    c.method = Method::qpem;
    c.r = 3.0;
  } else {
    throw ParameterError(
        "unknown benchmark method '" + token +
        "'; available: lhs sobol mc sgh3 hpem qpem-sqrt3 qpem-sqrt3-scaled qpem-r3 "
        "qpem-r3-scaled");
  }
  return spec;
}

std::string cell(const std::optional<Scalar>& v) { return v ? format_number(*v) : ""; }

}  // namespace

nlohmann::json cmd_benchmark(const BenchmarkOptions& options) {
  std::vector<std::string> methods = options.methods;
  if (methods.empty()) {
    methods = {"lhs",        "sobol",          "sgh3",    "hpem",
               "qpem-sqrt3", "qpem-sqrt3-scaled", "qpem-r3", "qpem-r3-scaled"};
  }
  std::vector<Index> dims = options.dims;
  if (!dims.empty() && options.case_name != "polynomial") {
    throw ParameterError("--dims sweeps apply to the polynomial case only");
  }
  if (dims.empty()) dims = {make_benchmark_case(options.case_name, std::nullopt).dim};

  std::ostringstream table;
  std::ostringstream longfmt;
  table << "case,n,method,points,mean,std,skew,kurt,cov,err_mean,err_std,err_skew,err_kurt,"
           "err_cov,reference\n";
  longfmt << "case,n,method,points,metric,value,reference_value,rel_error\n";

  nlohmann::json rows = nlohmann::json::array();
  static const char* kMetrics[5] = {"mean", "std", "skew", "kurt", "cov"};

  for (const Index n : dims) {
    const BenchmarkCase bench = make_benchmark_case(
        options.case_name, options.case_name == "polynomial" ? std::optional<Index>(n)
                                                             : std::nullopt);
    MomentSummary reference;
    std::string reference_name;
    if (bench.analytic) {
      reference = *bench.analytic;
      reference_name = "analytic oracle";
    } else if (const ReferenceRow* row = bench.reference("mc")) {
      reference = row->moments;
      reference_name = row->provenance;
    } else {
      throw ParameterError("case '" + bench.name + "' has no MC reference row and no oracle");
    }
    const std::optional<Scalar> ref_cov =
        reference.mean != 0 ? std::optional<Scalar>(reference.std / reference.mean) : std::nullopt;

    // Reference row first, mirroring the published layout.
    table << bench.name << ',' << n << ",reference,," << format_number(reference.mean) << ','
          << format_number(reference.std) << ',' << cell(reference.skew) << ','
          << cell(reference.kurt) << ',' << cell(ref_cov) << ",,,,,," << reference_name << "\n";

    const CovFactor factor = factor_covariance(bench.input, FactorMethod::cholesky);
    for (const auto& token : methods) {
      const MethodSpec ms = benchmark_method(token, n, options.seed);
      auto [set, weights] = build_points(ms.config, n);
      const Matrix xs = to_x_space(set, bench.input, factor);
      const EvaluationBatch batch =
          evaluate_model(bench.model, xs, bench.name + "/" + ms.token, options.workers);
      const MomentSummary summary = estimate_moments(batch, weights);
      const ErrorReport errors = relative_errors(summary, reference, reference_name);

      const std::optional<Scalar> est_cov =
          summary.mean != 0 ? std::optional<Scalar>(summary.std / summary.mean) : std::nullopt;
      std::optional<Scalar> cov_err;
      if (est_cov && ref_cov && *ref_cov != 0) cov_err = std::abs(*est_cov - *ref_cov) / std::abs(*ref_cov);

      table << bench.name << ',' << n << ',' << ms.token << ',' << set.count() << ','
            << format_number(summary.mean) << ',' << format_number(summary.std) << ','
            << cell(summary.skew) << ',' << cell(summary.kurt) << ',' << cell(est_cov) << ','
            << cell(errors.mean_error) << ',' << cell(errors.std_error) << ','
            << cell(errors.skew_error) << ',' << cell(errors.kurt_error) << ',' << cell(cov_err)
            << ',' << reference_name << "\n";

      const std::optional<Scalar> values[5] = {summary.mean, summary.std, summary.skew,
                                               summary.kurt, est_cov};
      const std::optional<Scalar> refs[5] = {reference.mean, reference.std, reference.skew,
                                             reference.kurt, ref_cov};
      const std::optional<Scalar> errs[5] = {errors.mean_error, errors.std_error,
                                             errors.skew_error, errors.kurt_error, cov_err};
      for (int metric = 0; metric < 5; ++metric) {
        longfmt << bench.name << ',' << n << ',' << ms.token << ',' << set.count() << ','
                << kMetrics[metric] << ',' << cell(values[metric]) << ',' << cell(refs[metric])
                << ',' << cell(errs[metric]) << "\n";
        nlohmann::json row;
        row["case"] = bench.name;
        row["n"] = n;
        row["method"] = ms.token;
        row["points"] = set.count();
        row["metric"] = kMetrics[metric];
        row["value"] = values[metric] ? nlohmann::json(*values[metric]) : nlohmann::json(nullptr);
        row["reference"] = refs[metric] ? nlohmann::json(*refs[metric]) : nlohmann::json(nullptr);
        row["rel_error"] = errs[metric] ? nlohmann::json(*errs[metric]) : nlohmann::json(nullptr);
        rows.push_back(std::move(row));
      }
    }
  }

  if (!options.table_path.empty()) {
    std::ofstream out(options.table_path);
    if (!out) throw ParameterError("cannot open output file '" + options.table_path + "'");
    out << table.str();
  }
  if (!options.long_path.empty()) {
    std::ofstream out(options.long_path);
    if (!out) throw ParameterError("cannot open output file '" + options.long_path + "'");
    out << longfmt.str();
  }
  return rows;
}

void dump_case_files(const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& name : benchmark_case_names()) {
    const BenchmarkCase bench =
        make_benchmark_case(name, name == "polynomial" ? std::optional<Index>(5) : std::nullopt);
    const std::string path = dir + "/" + bench.name + ".json";
    write_dist_json(path, bench.input, bench.description + "; " + bench.units_note);
  }
}

}  // namespace qpem::cli
