#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pbmf/dataset.hpp"

namespace pbmf {

// Non-learned placements. Random scores are a pure function of
// (seed, user, item); Zipf scores are 1 / popularity rank from training counts.
class BaselineScorer {
 public:
  enum class Kind { kRandom, kZipf };

  static BaselineScorer random(std::uint64_t seed, double r_max);
  // Rank 1 is the most-rated item; equal counts go to the smaller index.
  static BaselineScorer zipf(const RatingsDataset& train);

  Kind kind() const noexcept { return kind_; }
  double r_max() const noexcept { return r_max_; }

  // Uniform in [0, 1] for random, 1 / rank for zipf.
  double score(Index user, Index item) const;
  double predicted_rating(Index user, Index item) const { return score(user, item) * r_max_; }

  // 1-based popularity rank; zipf only.
  std::size_t rank(Index item) const;
  const std::vector<std::size_t>& ranks() const noexcept { return rank_; }

 private:
  BaselineScorer(Kind kind, double r_max) : kind_(kind), r_max_(r_max) {}

  Kind kind_;
  double r_max_;
  std::uint64_t seed_ = 0;
  std::vector<std::size_t> rank_;
};

}  // namespace pbmf
