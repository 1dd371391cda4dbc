#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pbmf {

using Index = std::uint32_t;

struct Rating {
  Index user;
  Index item;
  double value;

  friend bool operator==(const Rating&, const Rating&) = default;
};

// Dense index assignment for external ids, in first-appearance order.
class IdMap {
 public:
  // Returns the dense index of `id`, assigning the next one if unseen.
  Index intern(std::string_view id);

  std::size_t size() const noexcept { return ids_.size(); }
  const std::string& id(Index index) const { return ids_.at(index); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  bool contains(std::string_view id) const;
  Index at(std::string_view id) const;

  friend bool operator==(const IdMap& a, const IdMap& b) { return a.ids_ == b.ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, Index> index_;
};

struct LoadStats {
  std::size_t malformed_lines = 0;
  std::size_t duplicates = 0;
};

// Immutable set of (user, item, rating) triples. Train and test splits share
// the parent's id maps, so n, m and the rating scale stay global.
class RatingsDataset {
 public:
  RatingsDataset() = default;
  RatingsDataset(std::vector<Rating> ratings, std::shared_ptr<const IdMap> users,
                 std::shared_ptr<const IdMap> items, double r_min, double r_max,
                 LoadStats stats = {});

  // Builds a dataset from already-dense triples. Ids become the decimal index.
  static RatingsDataset from_triples(std::vector<Rating> ratings, std::size_t n,
                                     std::size_t m);

  std::span<const Rating> ratings() const noexcept { return ratings_; }
  std::size_t size() const noexcept { return ratings_.size(); }
  bool empty() const noexcept { return ratings_.empty(); }

  std::size_t num_users() const noexcept { return users_ ? users_->size() : 0; }
  std::size_t num_items() const noexcept { return items_ ? items_->size() : 0; }
  double r_max() const noexcept { return r_max_; }
  double r_min() const noexcept { return r_min_; }
  const LoadStats& stats() const noexcept { return stats_; }

  const IdMap& users() const { return *users_; }
  const IdMap& items() const { return *items_; }

  // Same index space and scale, different interactions.
  RatingsDataset with_ratings(std::vector<Rating> ratings) const;

  friend bool operator==(const RatingsDataset& a, const RatingsDataset& b);

 private:
  std::vector<Rating> ratings_;
  std::shared_ptr<const IdMap> users_;
  std::shared_ptr<const IdMap> items_;
  double r_min_ = 0.0;
  double r_max_ = 0.0;
  LoadStats stats_;
};

// `UserID::MovieID::Rating::Timestamp` lines. Lines with fewer than three
// fields are skipped and counted as malformed; a rating that is not a
// positive finite number is a parse error.
RatingsDataset load_movielens(const std::filesystem::path& path);

struct CsvOptions {
  std::size_t user_col = 0;
  std::size_t item_col = 1;
  std::size_t rating_col = 2;
  char delimiter = ',';
  bool has_header = false;
};

// Delimited text with arbitrary extra columns. Duplicate (user, item) pairs
// keep the last occurrence; the number removed is in stats().duplicates.
RatingsDataset load_csv(const std::filesystem::path& path, const CsvOptions& options);

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  bool drop_unseen = true;
};

struct Split {
  RatingsDataset train;
  RatingsDataset test;
  std::size_t dropped = 0;
};

// Seeded uniform holdout of round(test_fraction * size) interactions.
// Relative order of interactions is preserved within each side.
Split split(const RatingsDataset& dataset, const SplitSpec& spec);

}  // namespace pbmf
