#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "pbmf/dataset.hpp"

namespace pbmf {

enum class PredictionMode : std::uint8_t { kDot = 0, kCosine = 1 };

inline constexpr double kDefaultNormEpsilon = 1e-12;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

// (a . b) / max(|a| |b|, epsilon)
double cosine(std::span<const double> a, std::span<const double> b,
              double epsilon = kDefaultNormEpsilon);

// User factors U (n x k) and item factors V (m x k), both row-major.
class FactorModel {
 public:
  FactorModel() = default;
  FactorModel(std::size_t n, std::size_t m, std::size_t k, PredictionMode mode,
              double r_max, double norm_epsilon = kDefaultNormEpsilon);

  std::size_t num_users() const noexcept { return n_; }
  std::size_t num_items() const noexcept { return m_; }
  std::size_t dim() const noexcept { return k_; }
  PredictionMode mode() const noexcept { return mode_; }
  double r_max() const noexcept { return r_max_; }
  double norm_epsilon() const noexcept { return norm_epsilon_; }

  void set_mode(PredictionMode mode) noexcept { mode_ = mode; }
  void set_r_max(double r_max);
  void set_norm_epsilon(double epsilon);

  std::span<double> user(std::size_t i) { return {user_factors_.data() + i * k_, k_}; }
  std::span<const double> user(std::size_t i) const {
    return {user_factors_.data() + i * k_, k_};
  }
  std::span<double> item(std::size_t j) { return {item_factors_.data() + j * k_, k_}; }
  std::span<const double> item(std::size_t j) const {
    return {item_factors_.data() + j * k_, k_};
  }

  std::span<double> user_factors() noexcept { return user_factors_; }
  std::span<const double> user_factors() const noexcept { return user_factors_; }
  std::span<double> item_factors() noexcept { return item_factors_; }
  std::span<const double> item_factors() const noexcept { return item_factors_; }

  double predict_dot(std::size_t i, std::size_t j) const;
  double predict_cosine(std::size_t i, std::size_t j) const;

  // Score used for ranking: cosine or dot depending on mode().
  double score(std::size_t i, std::size_t j) const;

  // Score on the rating scale: clamp(c, 0, 1) * r_max in cosine mode,
  // clamp(u . v, 0, r_max) in dot mode.
  double predicted_rating(std::size_t i, std::size_t j) const;

  // Score mapped to [0, 1]-ish normalized scale: the raw cosine in cosine
  // mode, predicted_rating / r_max in dot mode.
  double normalized_score(std::size_t i, std::size_t j) const;

  friend bool operator==(const FactorModel&, const FactorModel&) = default;

 private:
  void check_index(std::size_t i, std::size_t j) const;

  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t k_ = 0;
  PredictionMode mode_ = PredictionMode::kCosine;
  double r_max_ = 1.0;
  double norm_epsilon_ = kDefaultNormEpsilon;
  std::vector<double> user_factors_;
  std::vector<double> item_factors_;
};

// Entries i.i.d. uniform on (0, scale]; bit-deterministic per seed.
FactorModel init_model(std::size_t n, std::size_t m, std::size_t k, std::uint64_t seed,
                       double scale, PredictionMode mode = PredictionMode::kCosine,
                       double r_max = 1.0);

// Binary layout, all integers and floats little-endian:
//   "PBMF" | version u8 | n u64 | m u64 | k u64 | mode u8 | r_max f64 | U | V
// norm_epsilon is not stored; loaded models use kDefaultNormEpsilon.
inline constexpr std::uint8_t kModelFormatVersion = 1;

void save_model(const FactorModel& model, const std::filesystem::path& path);
FactorModel load_model(const std::filesystem::path& path);

struct ScoredItem {
  Index item;
  double score;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

struct TopKLists {
  std::size_t k_top = 0;
  std::vector<std::vector<ScoredItem>> lists;  // one per user, best first
};

using ScoreFunction = std::function<double(Index user, Index item)>;

// Highest-scoring items per user, skipping each user's items in `exclude`
// (normally the training split). Ties go to the smaller item index.
TopKLists top_k(const ScoreFunction& score, std::size_t num_users, std::size_t num_items,
                std::size_t k_top, const RatingsDataset* exclude = nullptr);

}  // namespace pbmf
