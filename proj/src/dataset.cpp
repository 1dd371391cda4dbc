#include "pbmf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>

#include "pbmf/error.hpp"
#include "pbmf/rng.hpp"

namespace pbmf {

Index IdMap::intern(std::string_view id) {
  auto it = index_.find(std::string(id));
  if (it != index_.end()) return it->second;
  if (ids_.size() >= std::numeric_limits<Index>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "too many distinct ids");
  }
  const auto next = static_cast<Index>(ids_.size());
  ids_.emplace_back(id);
  index_.emplace(ids_.back(), next);
  return next;
}

bool IdMap::contains(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

Index IdMap::at(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown id '" + std::string(id) + "'");
  }
  return it->second;
}

RatingsDataset::RatingsDataset(std::vector<Rating> ratings,
                               std::shared_ptr<const IdMap> users,
                               std::shared_ptr<const IdMap> items, double r_min,
                               double r_max, LoadStats stats)
    : ratings_(std::move(ratings)),
      users_(std::move(users)),
      items_(std::move(items)),
      r_min_(r_min),
      r_max_(r_max),
      stats_(stats) {
  if (!users_ || !items_) {
    throw Error(ErrorCode::kInvalidArgument, "dataset requires user and item maps");
  }
  if (!(r_min_ > 0.0) || !(r_max_ >= r_min_) || !std::isfinite(r_max_)) {
    throw Error(ErrorCode::kInvalidArgument, "rating scale must satisfy 0 < r_min <= r_max");
  }
  for (const Rating& r : ratings_) {
    if (r.user >= users_->size() || r.item >= items_->size()) {
      throw Error(ErrorCode::kInvalidArgument, "rating index outside the id maps");
    }
    if (!(r.value >= r_min_ && r.value <= r_max_)) {
      throw Error(ErrorCode::kInvalidArgument, "rating outside [r_min, r_max]");
    }
  }
}

RatingsDataset RatingsDataset::from_triples(std::vector<Rating> ratings,
                                            std::size_t n, std::size_t m) {
  if (ratings.empty()) throw Error(ErrorCode::kEmptyDataset, "no ratings");
  auto users = std::make_shared<IdMap>();
  auto items = std::make_shared<IdMap>();
  for (std::size_t i = 0; i < n; ++i) users->intern(std::to_string(i));
  for (std::size_t j = 0; j < m; ++j) items->intern(std::to_string(j));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Rating& r : ratings) {
    lo = std::min(lo, r.value);
    hi = std::max(hi, r.value);
  }
  return RatingsDataset(std::move(ratings), std::move(users), std::move(items), lo, hi);
}

RatingsDataset RatingsDataset::with_ratings(std::vector<Rating> ratings) const {
  return RatingsDataset(std::move(ratings), users_, items_, r_min_, r_max_);
}

bool operator==(const RatingsDataset& a, const RatingsDataset& b) {
  return a.ratings_ == b.ratings_ && a.r_min_ == b.r_min_ && a.r_max_ == b.r_max_ &&
         *a.users_ == *b.users_ && *a.items_ == *b.items_;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line, std::string_view delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + delim.size();
  }
}

double parse_rating(std::string_view text, std::size_t line_no) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                       ": rating '" + std::string(text) +
                                       "' is not a number");
  }
  if (!std::isfinite(value) || value <= 0.0) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": rating " +
                                       std::string(text) + " must be finite and > 0");
  }
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return in;
}

// Collects triples, interning ids and applying the keep-last rule.
class Builder {
 public:
  void add(std::string_view user, std::string_view item, double value) {
    const Index u = users_->intern(user);
    const Index i = items_->intern(item);
    const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | i;
    auto [it, inserted] = position_.try_emplace(key, ratings_.size());
    if (!inserted) {
      superseded_[it->second] = true;
      it->second = ratings_.size();
      ++stats_.duplicates;
    }
    ratings_.push_back({u, i, value});
    superseded_.push_back(false);
  }

  void count_malformed() { ++stats_.malformed_lines; }

  RatingsDataset finish(const std::filesystem::path& path) && {
    std::vector<Rating> kept;
    kept.reserve(ratings_.size() - stats_.duplicates);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < ratings_.size(); ++k) {
      if (superseded_[k]) continue;
      kept.push_back(ratings_[k]);
      lo = std::min(lo, ratings_[k].value);
      hi = std::max(hi, ratings_[k].value);
    }
    if (kept.empty()) {
      throw Error(ErrorCode::kEmptyDataset, "'" + path.string() + "' has no valid ratings");
    }
    return RatingsDataset(std::move(kept), std::move(users_), std::move(items_), lo, hi,
                          stats_);
  }

 private:
  std::shared_ptr<IdMap> users_ = std::make_shared<IdMap>();
  std::shared_ptr<IdMap> items_ = std::make_shared<IdMap>();
  std::vector<Rating> ratings_;
  std::vector<bool> superseded_;
  std::unordered_map<std::uint64_t, std::size_t> position_;
  LoadStats stats_;
};

}  // namespace

RatingsDataset load_movielens(const std::filesystem::path& path) {
  auto in = open_input(path);
  Builder builder;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, "::");
    if (fields.size() < 3 || fields.size() > 4 || fields[0].empty() || fields[1].empty()) {
      builder.count_malformed();
      continue;
    }
    builder.add(fields[0], fields[1], parse_rating(fields[2], line_no));
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read error on '" + path.string() + "'");
  return std::move(builder).finish(path);
}

RatingsDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  auto in = open_input(path);
  Builder builder;
  const std::string delim(1, options.delimiter);
  const std::size_t needed =
      std::max({options.user_col, options.item_col, options.rating_col}) + 1;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = options.has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split_fields(line, delim);
    if (fields.size() < needed) {
      throw Error(ErrorCode::kSchema, "line " + std::to_string(line_no) + ": expected at least " +
                                          std::to_string(needed) + " columns, found " +
                                          std::to_string(fields.size()));
    }
    const auto user = fields[options.user_col];
    const auto item = fields[options.item_col];
    if (user.empty() || item.empty()) {
      throw Error(ErrorCode::kSchema,
                  "line " + std::to_string(line_no) + ": empty user or item id");
    }
    builder.add(user, item, parse_rating(fields[options.rating_col], line_no));
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read error on '" + path.string() + "'");
  return std::move(builder).finish(path);
}

Split split(const RatingsDataset& dataset, const SplitSpec& spec) {
  if (dataset.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot split an empty dataset");
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "test_fraction must lie strictly in (0, 1)");
  }
  const std::size_t total = dataset.size();
  const auto test_count =
      static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(total)));
  if (test_count == 0 || test_count == total) {
    throw Error(ErrorCode::kSplit, "test_fraction " + std::to_string(spec.test_fraction) +
                                       " leaves an empty side for " + std::to_string(total) +
                                       " interactions");
  }

  std::vector<std::size_t> order(total);
  for (std::size_t k = 0; k < total; ++k) order[k] = k;
  Rng rng(spec.seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<bool> in_test(total, false);
  for (std::size_t k = 0; k < test_count; ++k) in_test[order[k]] = true;

  const auto all = dataset.ratings();
  std::vector<Rating> train;
  std::vector<Rating> test;
  train.reserve(total - test_count);
  test.reserve(test_count);
  for (std::size_t k = 0; k < total; ++k) (in_test[k] ? test : train).push_back(all[k]);

  std::size_t dropped = 0;
  if (spec.drop_unseen) {
    std::vector<bool> user_seen(dataset.num_users(), false);
    std::vector<bool> item_seen(dataset.num_items(), false);
    for (const Rating& r : train) {
      user_seen[r.user] = true;
      item_seen[r.item] = true;
    }
    const auto before = test.size();
    std::erase_if(test, [&](const Rating& r) { return !user_seen[r.user] || !item_seen[r.item]; });
    dropped = before - test.size();
  }
  if (test.empty()) {
    throw Error(ErrorCode::kSplit, "every test interaction was dropped as unseen");
  }
  return {dataset.with_ratings(std::move(train)), dataset.with_ratings(std::move(test)), dropped};
}

}  // namespace pbmf
