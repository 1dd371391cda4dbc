#include <algorithm>
#include <vector>

#include "doctest.h"
#include "pbmf/baselines.hpp"
#include "support/oracles.hpp"

using namespace pbmf;

namespace {

// Items 0..4 rated (7, 7, 3, 1, 0) times.
RatingsDataset counted_train() {
  std::vector<Rating> r;
  const std::vector<std::size_t> counts = {7, 7, 3, 1, 0};
  Index user = 0;
  for (Index j = 0; j < counts.size(); ++j) {
    for (std::size_t c = 0; c < counts[j]; ++c) r.push_back({user++, j, 3.0});
  }
  return RatingsDataset::from_triples(r, user, 5);
}

}  // namespace

TEST_CASE("random scores are deterministic, bounded and seed dependent") {
  const auto a = BaselineScorer::random(9, 5.0);
  const auto b = BaselineScorer::random(10, 5.0);
  int differ = 0;
  for (Index u = 0; u < 50; ++u) {
    for (Index j = 0; j < 50; ++j) {
      const double s = a.score(u, j);
      CHECK(s == a.score(u, j));
      CHECK((s >= 0.0 && s <= 1.0));
      CHECK(a.predicted_rating(u, j) == s * 5.0);
      differ += s != b.score(u, j);
    }
  }
  CHECK(differ > 2400);
}

TEST_CASE("random scores: Monte-Carlo mean and decile uniformity") {
  const auto scorer = BaselineScorer::random(123, 1.0);
  std::vector<int> deciles(10, 0);
  double sum = 0.0;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    const double s = scorer.score(static_cast<Index>(k / 400), static_cast<Index>(k % 400));
    sum += s;
    ++deciles[std::min(9, static_cast<int>(s * 10))];
  }
  CHECK(sum / draws == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(sum / draws - 0.5) < 0.01);
  for (int count : deciles) CHECK(std::abs(count - draws / 10) < draws / 100);
}

TEST_CASE("zipf ranks follow training counts with index tie break") {
  const auto scorer = BaselineScorer::zipf(counted_train());
  CHECK(scorer.ranks() == std::vector<std::size_t>{1, 2, 3, 4, 5});
  CHECK(scorer.score(0, 0) == 1.0);
  CHECK(scorer.score(0, 1) == 0.5);
  CHECK(scorer.score(0, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(scorer.score(0, 3) == 0.25);
  CHECK(scorer.score(0, 4) == 0.2);
  CHECK(scorer.predicted_rating(0, 1) == 1.5);  // r_max 3 / rank 2
}

TEST_CASE("zipf ranks match the selection oracle and cover 1..m") {
  std::vector<Rating> r;
  const std::vector<std::size_t> counts = {2, 5, 0, 5, 1, 2, 9, 0, 3};
  Index user = 0;
  for (Index j = 0; j < counts.size(); ++j) {
    for (std::size_t c = 0; c < counts[j]; ++c) r.push_back({user++, j, 4.0});
  }
  const auto train = RatingsDataset::from_triples(r, user, counts.size());
  const auto scorer = BaselineScorer::zipf(train);
  CHECK(scorer.ranks() == pbmf::testing::oracle_popularity_ranks(counts));

  std::vector<double> scores;
  for (Index j = 0; j < counts.size(); ++j) scores.push_back(scorer.score(0, j));
  std::sort(scores.begin(), scores.end());
  std::vector<double> expected;
  for (std::size_t k = 1; k <= counts.size(); ++k) expected.push_back(1.0 / static_cast<double>(k));
  std::sort(expected.begin(), expected.end());
  CHECK(scores == expected);

  for (Index j = 0; j < counts.size(); ++j) {
    CHECK(scorer.score(0, j) == scorer.score(17, j));
  }
}
