#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "pbmf/error.hpp"
#include "pbmf/evaluation.hpp"
#include "support/oracles.hpp"

using namespace pbmf;

namespace {

// Fixed per-pair predictions; the normalized score is rating / r_max.
class TableScorer final : public Scorer {
 public:
  TableScorer(std::map<std::pair<Index, Index>, double> table, double r_max, double fallback = 0)
      : table_(std::move(table)), r_max_(r_max), fallback_(fallback) {}
  double score(Index u, Index i) const override { return predicted_rating(u, i); }
  double predicted_rating(Index u, Index i) const override {
    auto it = table_.find({u, i});
    return it == table_.end() ? fallback_ : it->second;
  }
  double normalized_score(Index u, Index i) const override { return predicted_rating(u, i) / r_max_; }

 private:
  std::map<std::pair<Index, Index>, double> table_;
  double r_max_;
  double fallback_;
};

class ConstantScorer final : public Scorer {
 public:
  ConstantScorer(double normalized, double r_max) : value_(normalized), r_max_(r_max) {}
  double score(Index, Index) const override { return value_; }
  double predicted_rating(Index, Index) const override { return value_ * r_max_; }
  double normalized_score(Index, Index) const override { return value_; }

 private:
  double value_;
  double r_max_;
};

RatingsDataset four_ratings() {
  return RatingsDataset::from_triples({{0, 0, 5}, {0, 1, 2}, {1, 2, 5}, {1, 3, 3}}, 2, 4);
}

}  // namespace

TEST_CASE("mae examples") {
  const auto test = four_ratings();
  TableScorer perfect({{{0, 0}, 5}, {{0, 1}, 2}, {{1, 2}, 5}, {{1, 3}, 3}}, 5);
  CHECK(mae(perfect, test) == 0.0);

  const auto threes = RatingsDataset::from_triples({{0, 0, 3}, {0, 1, 3}, {1, 1, 3}}, 2, 2);
  CHECK(mae(ConstantScorer(1.0, 5.0), threes) == 2.0);

  TableScorer hand({{{0, 0}, 4.0}, {{0, 1}, 2.5}, {{1, 2}, 5.0}, {{1, 3}, 1.0}}, 5);
  CHECK(mae(hand, test) == doctest::Approx(0.875).epsilon(1e-15));
}

TEST_CASE("mae is invariant under test permutation") {
  std::vector<Rating> r;
  std::mt19937_64 rng(8);
  for (Index k = 0; k < 50; ++k) r.push_back({k % 7, k % 11, 1.0 + static_cast<double>(rng() % 5)});
  const auto a = RatingsDataset::from_triples(r, 7, 11);
  std::shuffle(r.begin(), r.end(), rng);
  const auto b = RatingsDataset::from_triples(r, 7, 11);
  const auto scorer = BaselineScorer::random(1, 5.0);
  CHECK(mae(BaselineAdapter(scorer), a) == doctest::Approx(mae(BaselineAdapter(scorer), b)));
}

TEST_CASE("matthew degree formula") {
  const std::vector<std::size_t> counts = {4, 2, 1};
  CHECK(matthew_degree(counts, MatthewVariant::kLiteralXmax) == doctest::Approx(-0.44270).epsilon(1e-4));
  CHECK(matthew_degree(counts, MatthewVariant::kParetoXmin) == doctest::Approx(2.44270).epsilon(1e-4));

  const double log_sum = std::log(1.0 / 4.0) + std::log(2.0 / 4.0);
  CHECK(matthew_degree(counts) == doctest::Approx(1.0 + 3.0 / log_sum).epsilon(1e-14));

  const std::vector<std::size_t> equal = {3, 0, 3, 3};
  CHECK(matthew_degree(equal) == kMatthewInfinite);
  CHECK(matthew_degree(equal, MatthewVariant::kParetoXmin) == kMatthewInfinite);
}

TEST_CASE("matthew degree from lists ignores unrecommended items and user order") {
  TopKLists lists{2, {{{0, 1}, {1, 1}}, {{0, 1}, {2, 1}}, {{0, 1}, {1, 1}}, {{0, 1}, {5, 1}}}};
  // frequencies: item0 4, item1 2, item2 1, item5 1
  const std::vector<std::size_t> counts = {4, 2, 1, 0, 0, 1};
  CHECK(matthew_degree(lists) == doctest::Approx(matthew_degree(counts)));
  std::reverse(lists.lists.begin(), lists.lists.end());
  CHECK(matthew_degree(lists) == doctest::Approx(matthew_degree(counts)));
}

TEST_CASE("matthew variants bracket 1 whenever finite") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> counts(1 + rng() % 20);
    for (auto& c : counts) c = rng() % 30;
    bool any = false;
    for (auto c : counts) any |= c > 0;
    if (!any) continue;
    const double literal = matthew_degree(counts, MatthewVariant::kLiteralXmax);
    const double pareto = matthew_degree(counts, MatthewVariant::kParetoXmin);
    if (std::isinf(literal)) {
      CHECK(std::isinf(pareto));
      continue;
    }
    CHECK(literal <= 1.0);
    CHECK(pareto >= 1.0);
  }
}

TEST_CASE("position bias metric examples") {
  const auto test = four_ratings();
  CHECK(position_bias_metric(ConstantScorer(0.25, 5.0), test, 4) == 0.0);
  CHECK(position_bias_metric(ConstantScorer(1.0, 5.0), test, 10) ==
        doctest::Approx(0.81).epsilon(1e-14));

  const auto three = RatingsDataset::from_triples({{0, 0, 1}, {0, 1, 1}, {1, 0, 1}}, 2, 2);
  TableScorer hand({{{0, 0}, 0.2}, {{0, 1}, 0.5}, {{1, 0}, 0.1}}, 1.0);
  CHECK(position_bias_metric(hand, three, 10) == doctest::Approx(0.17 / 3.0).epsilon(1e-14));
  CHECK(position_bias_metric(hand, three, 10) == doctest::Approx(0.056667).epsilon(1e-5));
}

TEST_CASE("position bias metric is nonnegative and zero only at 1/m") {
  const auto test = four_ratings();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double v = value(rng);
    const double metric = position_bias_metric(ConstantScorer(v, 5.0), test, 4);
    CHECK(metric >= 0.0);
    CHECK((metric == 0.0) == (v == 0.25));
  }
}

TEST_CASE("metrics reject an empty test set") {
  const RatingsDataset empty = four_ratings().with_ratings({});
  const ConstantScorer s(0.5, 5.0);
  CHECK_THROWS_AS(mae(s, empty), Error);
  CHECK_THROWS_AS(position_bias_metric(s, empty, 4), Error);
}

TEST_CASE("evaluate_all composes the three metrics") {
  // 4 users x 5 items
  const auto train = RatingsDataset::from_triples(
      {{0, 0, 5}, {0, 1, 4}, {1, 0, 3}, {1, 2, 4}, {2, 0, 2}, {2, 1, 5}, {3, 3, 1}, {3, 0, 4}},
      4, 5);
  const auto test = train.with_ratings({{0, 2, 3}, {1, 1, 5}, {2, 3, 2}, {3, 1, 4}});
  const auto zipf = BaselineScorer::zipf(train);
  const auto report = evaluate_all(BaselineAdapter(zipf), train, test, 2);

  // item counts in train: 0 -> 4, 1 -> 2, 2 -> 1, 3 -> 1, 4 -> 0 => ranks 1,2,3,4,5
  const std::vector<double> inv_rank = {1.0, 0.5, 1.0 / 3, 0.25, 0.2};
  double abs_err = 0.0, bias = 0.0;
  for (const Rating& r : test.ratings()) {
    abs_err += std::abs(5.0 * inv_rank[r.item] - r.value);
    bias += (inv_rank[r.item] - 0.2) * (inv_rank[r.item] - 0.2);
  }
  CHECK(report.mae == doctest::Approx(abs_err / 4));
  CHECK(report.position_bias == doctest::Approx(bias / 4));

  // top-2 over non-train items by 1/rank:
  // u0 {2,3}, u1 {1,3}, u2 {2,3}, u3 {1,2} -> counts item1 2, item2 3, item3 3
  const std::vector<std::size_t> freq = {0, 2, 3, 3, 0};
  CHECK(report.matthew_degree == doctest::Approx(matthew_degree(freq)));
  CHECK(report.k_top == 2);
  CHECK(report.test_size == 4);
}

TEST_CASE("evaluate_all: monotone score transforms leave matthew degree unchanged") {
  const auto train = RatingsDataset::from_triples(
      {{0, 0, 5}, {0, 1, 4}, {1, 0, 3}, {1, 2, 4}, {2, 0, 2}, {2, 1, 5}, {3, 3, 1}, {3, 0, 4}},
      4, 6);
  const auto test = train.with_ratings({{0, 2, 3}, {1, 1, 5}});
  const auto model = init_model(4, 6, 3, 2, 1.0);

  class Squashed final : public Scorer {
   public:
    explicit Squashed(const FactorModel& m) : m_(m) {}
    double score(Index u, Index i) const override { return std::tanh(m_.score(u, i)) * 3 + 1; }
    double predicted_rating(Index u, Index i) const override { return m_.predicted_rating(u, i); }
    double normalized_score(Index u, Index i) const override { return m_.normalized_score(u, i); }

   private:
    const FactorModel& m_;
  };
  CHECK(evaluate_all(ModelScorer(model), train, test, 3).matthew_degree ==
        evaluate_all(Squashed(model), train, test, 3).matthew_degree);
}

TEST_CASE("report CSV rows round trip") {
  MetricsReport r;
  r.algorithm = "position_bias_mf";
  r.beta = 0.1;
  r.k = 32;
  r.epochs = 20;
  r.seed = 42;
  r.k_top = 10;
  r.mae = 0.8123456789;
  r.matthew_degree = kMatthewInfinite;
  r.position_bias = 0.056666666;
  r.test_size = 1234;
  const std::string row = format_report_row(r);
  CHECK(row == "position_bias_mf,0.1,32,20,42,10,0.812346,inf,0.0566667,1234,");

  const auto back = parse_report_row(row);
  CHECK(back.algorithm == r.algorithm);
  CHECK(back.beta == 0.1);
  CHECK(back.mae == 0.812346);
  CHECK(std::isinf(back.matthew_degree));
  CHECK(back.test_size == 1234);
  CHECK(back.ok());
  CHECK(format_report_row(back) == row);

  MetricsReport failed;
  failed.algorithm = "classic_mf";
  failed.error = "diverged at epoch 3, try smaller\nlr";
  const auto failed_back = parse_report_row(format_report_row(failed));
  CHECK_FALSE(failed_back.ok());
  CHECK(failed_back.error == "diverged at epoch 3; try smaller;lr");

  std::ostringstream out;
  write_reports_csv(out, std::vector<MetricsReport>{r, failed});
  CHECK(out.str().rfind(std::string(kReportCsvHeader) + "\n", 0) == 0);
  CHECK_THROWS_AS(parse_report_row("a,b,c"), Error);
}
