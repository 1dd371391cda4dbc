#include "pbmf/benchmark.hpp"

#include <algorithm>

#include "pbmf/baselines.hpp"
#include "pbmf/error.hpp"

namespace pbmf {

bool is_known_algorithm(std::string_view name) noexcept {
  return parse_algorithm(name).has_value() || name == "random" || name == "zipf";
}

std::vector<RunSpec> expand_runs(std::span<const std::string> algorithms,
                                 std::span<const double> betas) {
  if (algorithms.empty()) throw Error(ErrorCode::kInvalidArgument, "no algorithms selected");
  for (const double beta : betas) {
    if (!(beta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta must be >= 0");
  }
  std::vector<RunSpec> runs;
  for (const std::string& name : algorithms) {
    if (!is_known_algorithm(name)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown algorithm '" + name +
                      "' (expected classic_mf, cosine_mf, position_bias_mf, random or zipf)");
    }
    if (name == "position_bias_mf") {
      if (betas.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "position_bias_mf needs at least one beta");
      }
      for (const double beta : betas) runs.push_back({name, beta});
    } else {
      runs.push_back({name, 0.0});
    }
  }
  return runs;
}

std::vector<RunSpec> sweep_runs(std::span<const double> betas) {
  if (betas.size() < 2) throw Error(ErrorCode::kInvalidArgument, "a sweep needs at least two betas");
  std::vector<double> sorted(betas.begin(), betas.end());
  std::sort(sorted.begin(), sorted.end());
  const std::string name = "position_bias_mf";
  return expand_runs(std::span<const std::string>(&name, 1), sorted);
}

MetricsReport run_one(const RatingsDataset& train, const RatingsDataset& test,
                      const RunSpec& run, const BenchmarkSpec& spec) {
  MetricsReport report;
  try {
    if (run.algorithm == "random" || run.algorithm == "zipf") {
      const auto baseline = run.algorithm == "random"
                                ? BaselineScorer::random(spec.train.seed, train.r_max())
                                : BaselineScorer::zipf(train);
      report = evaluate_all(BaselineAdapter(baseline), train, test, spec.k_top, spec.variant);
    } else {
      const auto algorithm = parse_algorithm(run.algorithm);
      if (!algorithm) throw Error(ErrorCode::kInvalidArgument, "unknown algorithm " + run.algorithm);
      TrainConfig config = spec.train;
      config.algorithm = *algorithm;
      config.beta = run.beta;
      const TrainResult trained = pbmf::train(train, config);
      report = evaluate_all(ModelScorer(trained.model), train, test, spec.k_top, spec.variant);
      report.k = config.k;
      report.epochs = config.epochs;
    }
  } catch (const Error& e) {
    report = MetricsReport{};
    report.k_top = spec.k_top;
    report.error = e.what();
    if (parse_algorithm(run.algorithm)) {
      report.k = spec.train.k;
      report.epochs = spec.train.epochs;
    }
  }
  report.algorithm = run.algorithm;
  report.beta = run.beta;
  report.seed = spec.train.seed;
  return report;
}

std::vector<MetricsReport> run_benchmark(const RatingsDataset& train, const RatingsDataset& test,
                                         const BenchmarkSpec& spec) {
  std::vector<MetricsReport> reports;
  reports.reserve(spec.runs.size());
  for (const RunSpec& run : spec.runs) reports.push_back(run_one(train, test, run, spec));
  return reports;
}

}  // namespace pbmf
