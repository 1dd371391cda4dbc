#include "pbmf/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "pbmf/error.hpp"
#include "pbmf/rng.hpp"

namespace pbmf {

std::string_view to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::kClassicMf: return "classic_mf";
    case Algorithm::kCosineMf: return "cosine_mf";
    case Algorithm::kPositionBiasMf: return "position_bias_mf";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
  if (name == "classic_mf") return Algorithm::kClassicMf;
  if (name == "cosine_mf") return Algorithm::kCosineMf;
  if (name == "position_bias_mf") return Algorithm::kPositionBiasMf;
  return std::nullopt;
}

void validate(const TrainConfig& config) {
  const auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (config.k == 0) fail("k must be >= 1");
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    fail("learning_rate must be finite and > 0");
  }
  if (!(config.beta >= 0.0) || !std::isfinite(config.beta)) fail("beta must be finite and >= 0");
  if (config.epochs == 0) fail("epochs must be >= 1");
  if (!(config.init_scale > 0.0) || !std::isfinite(config.init_scale)) {
    fail("init_scale must be finite and > 0");
  }
  if (!(config.norm_epsilon > 0.0)) fail("norm_epsilon must be > 0");
}

SampleLoss sample_loss(std::span<const double> u, std::span<const double> v, double rating,
                       double r_max, std::size_t num_items, double beta, double epsilon) {
  const double c = cosine(u, v, epsilon);
  const double residual = rating / r_max - c;
  const double excess = c - 1.0 / static_cast<double>(num_items);
  SampleLoss loss;
  loss.fit = residual * residual;
  loss.penalty = excess * excess;
  loss.total = loss.fit + beta * loss.penalty;
  return loss;
}

void sample_gradients(std::span<const double> u, std::span<const double> v, double rating,
                      double r_max, std::size_t num_items, double beta,
                      std::span<double> grad_u, std::span<double> grad_v, double epsilon) {
  const double nu = norm(u);
  const double nv = norm(v);
  const double uv = dot(u, v);
  const double denom = std::max(nu * nv, epsilon);
  const double c = uv / denom;

  // dL/dc
  const double g = -2.0 * (rating / r_max - c) +
                   2.0 * beta * (c - 1.0 / static_cast<double>(num_items));

  if (nu * nv <= epsilon) {
    // Clamped denominator: c is linear in u and v.
    for (std::size_t d = 0; d < u.size(); ++d) {
      grad_u[d] = g * v[d] / epsilon;
      grad_v[d] = g * u[d] / epsilon;
    }
    return;
  }
  // dc/du = v / (|u||v|) - c u / |u|^2, symmetric for v.
  const double cu = c / (nu * nu);
  const double cv = c / (nv * nv);
  for (std::size_t d = 0; d < u.size(); ++d) {
    grad_u[d] = g * (v[d] / denom - cu * u[d]);
    grad_v[d] = g * (u[d] / denom - cv * v[d]);
  }
}

double classic_sample_loss(std::span<const double> u, std::span<const double> v, double rating) {
  const double residual = rating - dot(u, v);
  return residual * residual;
}

void classic_sample_gradients(std::span<const double> u, std::span<const double> v,
                              double rating, std::span<double> grad_u,
                              std::span<double> grad_v) {
  const double scale = -2.0 * (rating - dot(u, v));
  for (std::size_t d = 0; d < u.size(); ++d) {
    grad_u[d] = scale * v[d];
    grad_v[d] = scale * u[d];
  }
}

namespace {

// cosine_mf is the penalized model with the penalty switched off.
double effective_beta(const TrainConfig& config) {
  return config.algorithm == Algorithm::kPositionBiasMf ? config.beta : 0.0;
}

}  // namespace

EpochLoss full_loss(const RatingsDataset& data, const FactorModel& model,
                    const TrainConfig& config) {
  EpochLoss loss;
  if (config.algorithm == Algorithm::kClassicMf) {
    for (const Rating& r : data.ratings()) {
      loss.fit += classic_sample_loss(model.user(r.user), model.item(r.item), r.value);
    }
    loss.total = loss.fit;
    return loss;
  }
  for (const Rating& r : data.ratings()) {
    const SampleLoss s = sample_loss(model.user(r.user), model.item(r.item), r.value,
                                     data.r_max(), data.num_items(), 0.0, config.norm_epsilon);
    loss.fit += s.fit;
    loss.penalty += s.penalty;
  }
  loss.total = loss.fit + effective_beta(config) * loss.penalty;
  return loss;
}

TrainResult train(const RatingsDataset& data, const TrainConfig& config) {
  validate(config);
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot train on an empty dataset");

  const bool classic = config.algorithm == Algorithm::kClassicMf;
  const double beta = effective_beta(config);
  const std::size_t m = data.num_items();

  TrainResult result;
  result.model = init_model(data.num_users(), m, config.k, config.seed, config.init_scale,
                            classic ? PredictionMode::kDot : PredictionMode::kCosine,
                            data.r_max());
  result.model.set_norm_epsilon(config.norm_epsilon);
  FactorModel& model = result.model;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng visit_rng(mix64(config.seed));
  std::vector<double> grad_u(config.k);
  std::vector<double> grad_v(config.k);
  const auto ratings = data.ratings();

  result.history.reserve(config.epochs);
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.shuffle_each_epoch) visit_rng.shuffle(std::span<std::size_t>(order));
    for (const std::size_t idx : order) {
      const Rating& r = ratings[idx];
      auto u = model.user(r.user);
      auto v = model.item(r.item);
      if (classic) {
        classic_sample_gradients(u, v, r.value, grad_u, grad_v);
      } else {
        sample_gradients(u, v, r.value, data.r_max(), m, beta, grad_u, grad_v,
                         config.norm_epsilon);
      }
      for (std::size_t d = 0; d < config.k; ++d) {
        u[d] -= config.learning_rate * grad_u[d];
        v[d] -= config.learning_rate * grad_v[d];
      }
    }
    EpochLoss loss = full_loss(data, model, config);
    loss.epoch = epoch;
    if (!std::isfinite(loss.total)) {
      throw Error(ErrorCode::kDivergence,
                  std::string(to_string(config.algorithm)) + " diverged at epoch " +
                      std::to_string(epoch) + " (non-finite loss); try a smaller learning_rate than " +
                      std::to_string(config.learning_rate));
    }
    result.history.push_back(loss);
  }
  return result;
}

void write_loss_history_csv(std::span<const EpochLoss> history,
                            const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << "epoch,fit_loss,penalty_loss,total_loss\n";
  char buf[128];
  for (const EpochLoss& e : history) {
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.12g\n", e.epoch, e.fit, e.penalty, e.total);
    out << buf;
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed on '" + path.string() + "'");
}

}  // namespace pbmf
