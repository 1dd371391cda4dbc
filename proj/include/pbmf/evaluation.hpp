#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pbmf/baselines.hpp"
#include "pbmf/dataset.hpp"
#include "pbmf/factor_model.hpp"

namespace pbmf {

// What the metrics need from any recommender, learned or not.
class Scorer {
 public:
  virtual ~Scorer() = default;
  // Ranking score; only the order matters.
  virtual double score(Index user, Index item) const = 0;
  // Prediction on the dataset's rating scale.
  virtual double predicted_rating(Index user, Index item) const = 0;
  // Prediction on the normalized click-probability scale compared against 1/m.
  virtual double normalized_score(Index user, Index item) const = 0;
};

class ModelScorer final : public Scorer {
 public:
  explicit ModelScorer(const FactorModel& model) : model_(model) {}
  double score(Index u, Index i) const override { return model_.score(u, i); }
  double predicted_rating(Index u, Index i) const override {
    return model_.predicted_rating(u, i);
  }
  double normalized_score(Index u, Index i) const override {
    return model_.normalized_score(u, i);
  }

 private:
  const FactorModel& model_;
};

class BaselineAdapter final : public Scorer {
 public:
  explicit BaselineAdapter(const BaselineScorer& baseline) : baseline_(baseline) {}
  double score(Index u, Index i) const override { return baseline_.score(u, i); }
  double predicted_rating(Index u, Index i) const override {
    return baseline_.predicted_rating(u, i);
  }
  double normalized_score(Index u, Index i) const override { return baseline_.score(u, i); }

 private:
  const BaselineScorer& baseline_;
};

enum class MatthewVariant { kLiteralXmax, kParetoXmin };

inline constexpr double kMatthewInfinite = std::numeric_limits<double>::infinity();

double mae(const Scorer& scorer, const RatingsDataset& test);

// Degree of Matthew Effect over item appearance counts (zeros are ignored):
//   D = 1 + n' / sum_i ln(x_i / x_ref),  x_ref = max (literal) or min (pareto).
// Returns kMatthewInfinite when every counted item appears equally often.
double matthew_degree(std::span<const std::size_t> appearance_counts,
                      MatthewVariant variant = MatthewVariant::kLiteralXmax);
double matthew_degree(const TopKLists& lists,
                      MatthewVariant variant = MatthewVariant::kLiteralXmax);

// Mean over test pairs of (normalized_score - 1/m)^2.
double position_bias_metric(const Scorer& scorer, const RatingsDataset& test,
                            std::size_t num_items);

struct MetricsReport {
  std::string algorithm;
  double beta = 0.0;
  std::size_t k = 0;
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
  std::size_t k_top = 0;
  double mae = 0.0;
  double matthew_degree = 0.0;
  double position_bias = 0.0;
  std::size_t test_size = 0;
  std::string error;  // empty on success; metric fields are meaningless otherwise

  bool ok() const noexcept { return error.empty(); }
};

inline constexpr std::size_t kDefaultTopK = 10;

// Top-k lists exclude each user's training items and span all m items.
MetricsReport evaluate_all(const Scorer& scorer, const RatingsDataset& train,
                           const RatingsDataset& test, std::size_t k_top = kDefaultTopK,
                           MatthewVariant variant = MatthewVariant::kLiteralXmax);

// Report CSV: the header below, one row per report, floats with 6
// significant digits and `inf` for the Matthew sentinel.
inline constexpr std::string_view kReportCsvHeader =
    "algorithm,beta,k,epochs,seed,k_top,mae,matthew_degree,position_bias,test_size,error";

std::string format_report_row(const MetricsReport& report);
MetricsReport parse_report_row(std::string_view line);
void write_reports_csv(std::ostream& out, std::span<const MetricsReport> reports);
void write_reports_csv(const std::filesystem::path& path, std::span<const MetricsReport> reports);
std::vector<MetricsReport> read_reports_csv(const std::filesystem::path& path);

}  // namespace pbmf
