#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pbmf/dataset.hpp"
#include "pbmf/factor_model.hpp"

namespace pbmf {

enum class Algorithm { kClassicMf, kCosineMf, kPositionBiasMf };

std::string_view to_string(Algorithm algorithm) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

struct TrainConfig {
  std::size_t k = 32;
  double learning_rate = 0.01;
  double beta = 0.0;
  std::size_t epochs = 20;
  std::uint64_t seed = 42;
  double init_scale = 0.1;
  double norm_epsilon = kDefaultNormEpsilon;
  bool shuffle_each_epoch = true;
  Algorithm algorithm = Algorithm::kPositionBiasMf;
};

// Throws Error(kInvalidArgument) naming the first offending field.
void validate(const TrainConfig& config);

struct SampleLoss {
  double fit = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

// With c = cosine(u, v):
//   fit = (r / r_max - c)^2,  penalty = (c - 1/m)^2,  total = fit + beta * penalty.
SampleLoss sample_loss(std::span<const double> u, std::span<const double> v, double rating,
                       double r_max, std::size_t num_items, double beta,
                       double epsilon = kDefaultNormEpsilon);

// Gradient of sample_loss().total with respect to u and v. Writes into
// grad_u / grad_v, which must have the same length as u / v.
void sample_gradients(std::span<const double> u, std::span<const double> v, double rating,
                      double r_max, std::size_t num_items, double beta,
                      std::span<double> grad_u, std::span<double> grad_v,
                      double epsilon = kDefaultNormEpsilon);

// (r - u . v)^2 and its gradient.
double classic_sample_loss(std::span<const double> u, std::span<const double> v, double rating);
void classic_sample_gradients(std::span<const double> u, std::span<const double> v,
                              double rating, std::span<double> grad_u,
                              std::span<double> grad_v);

struct EpochLoss {
  std::size_t epoch = 0;
  double fit = 0.0;
  double penalty = 0.0;
  double total = 0.0;

  friend bool operator==(const EpochLoss&, const EpochLoss&) = default;
};

// Loss summed over every interaction of `data` under the config's algorithm.
// cosine_mf reports the penalty sum but weights it by zero.
EpochLoss full_loss(const RatingsDataset& data, const FactorModel& model,
                    const TrainConfig& config);

struct TrainResult {
  FactorModel model;
  std::vector<EpochLoss> history;  // one entry per epoch, after its updates
};

// Per-sample SGD. Both gradients are evaluated at the pre-update vectors.
// Throws Error(kDivergence) when the epoch loss stops being finite.
TrainResult train(const RatingsDataset& data, const TrainConfig& config);

// `epoch,fit_loss,penalty_loss,total_loss`
void write_loss_history_csv(std::span<const EpochLoss> history,
                            const std::filesystem::path& path);

}  // namespace pbmf
