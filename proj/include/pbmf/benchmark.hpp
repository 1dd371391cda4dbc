#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pbmf/dataset.hpp"
#include "pbmf/evaluation.hpp"
#include "pbmf/trainer.hpp"

namespace pbmf {

// One benchmark row: a learned algorithm or a baseline ("random", "zipf").
struct RunSpec {
  std::string algorithm;
  double beta = 0.0;
};

bool is_known_algorithm(std::string_view name) noexcept;

// position_bias_mf expands to one run per beta, in the given order; every
// other algorithm contributes a single run. Throws on unknown names or when
// position_bias_mf is requested without betas.
std::vector<RunSpec> expand_runs(std::span<const std::string> algorithms,
                                 std::span<const double> betas);

// position_bias_mf at each beta, ascending. Needs at least two betas.
std::vector<RunSpec> sweep_runs(std::span<const double> betas);

struct BenchmarkSpec {
  std::vector<RunSpec> runs;
  TrainConfig train;  // algorithm and beta are taken from each run
  std::size_t k_top = kDefaultTopK;
  MatthewVariant variant = MatthewVariant::kLiteralXmax;
};

// Trains (or builds) one run on `train` and evaluates it on `test`.
// Library errors are captured in the report's error field.
MetricsReport run_one(const RatingsDataset& train, const RatingsDataset& test,
                      const RunSpec& run, const BenchmarkSpec& spec);

// Rows come back in spec.runs order; all runs share the same split.
std::vector<MetricsReport> run_benchmark(const RatingsDataset& train,
                                         const RatingsDataset& test,
                                         const BenchmarkSpec& spec);

}  // namespace pbmf
