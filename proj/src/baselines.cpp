#include "pbmf/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "pbmf/error.hpp"
#include "pbmf/rng.hpp"

namespace pbmf {

BaselineScorer BaselineScorer::random(std::uint64_t seed, double r_max) {
  if (!(r_max > 0.0)) throw Error(ErrorCode::kInvalidArgument, "r_max must be > 0");
  BaselineScorer scorer(Kind::kRandom, r_max);
  scorer.seed_ = seed;
  return scorer;
}

BaselineScorer BaselineScorer::zipf(const RatingsDataset& train) {
  if (train.num_items() == 0) throw Error(ErrorCode::kEmptyDataset, "no items to rank");
  const std::size_t m = train.num_items();
  std::vector<std::size_t> counts(m, 0);
  for (const Rating& r : train.ratings()) ++counts[r.item];

  std::vector<Index> order(m);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return counts[a] > counts[b]; });

  BaselineScorer scorer(Kind::kZipf, train.r_max());
  scorer.rank_.assign(m, 0);
  for (std::size_t pos = 0; pos < m; ++pos) scorer.rank_[order[pos]] = pos + 1;
  return scorer;
}

double BaselineScorer::score(Index user, Index item) const {
  if (kind_ == Kind::kZipf) return 1.0 / static_cast<double>(rank(item));
  const std::uint64_t key = mix64(mix64(mix64(seed_) ^ user) ^ item);
  // 53 random bits onto [0, 1].
  return static_cast<double>(key >> 11) / static_cast<double>((std::uint64_t{1} << 53) - 1);
}

std::size_t BaselineScorer::rank(Index item) const {
  if (kind_ != Kind::kZipf) throw Error(ErrorCode::kInvalidArgument, "rank() needs a zipf scorer");
  if (item >= rank_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "item " + std::to_string(item) + " out of range");
  }
  return rank_[item];
}

}  // namespace pbmf
