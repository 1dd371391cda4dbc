#include "pbmf/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "pbmf/error.hpp"

namespace pbmf {

double mae(const Scorer& scorer, const RatingsDataset& test) {
  if (test.empty()) throw Error(ErrorCode::kEmptyDataset, "MAE needs a nonempty test set");
  double sum = 0.0;
  for (const Rating& r : test.ratings()) {
    sum += std::abs(scorer.predicted_rating(r.user, r.item) - r.value);
  }
  return sum / static_cast<double>(test.size());
}

double matthew_degree(std::span<const std::size_t> appearance_counts, MatthewVariant variant) {
  std::size_t present = 0;
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (const std::size_t x : appearance_counts) {
    if (x == 0) continue;
    lo = present == 0 ? x : std::min(lo, x);
    hi = std::max(hi, x);
    ++present;
  }
  if (present == 0) throw Error(ErrorCode::kInvalidArgument, "no recommended items");
  if (lo == hi) return kMatthewInfinite;

  const double ref = static_cast<double>(variant == MatthewVariant::kLiteralXmax ? hi : lo);
  double log_sum = 0.0;
  for (const std::size_t x : appearance_counts) {
    if (x != 0) log_sum += std::log(static_cast<double>(x) / ref);
  }
  return 1.0 + static_cast<double>(present) / log_sum;
}

double matthew_degree(const TopKLists& lists, MatthewVariant variant) {
  std::size_t m = 0;
  for (const auto& list : lists.lists) {
    for (const ScoredItem& s : list) m = std::max<std::size_t>(m, s.item + 1);
  }
  std::vector<std::size_t> counts(m, 0);
  for (const auto& list : lists.lists) {
    for (const ScoredItem& s : list) ++counts[s.item];
  }
  return matthew_degree(counts, variant);
}

double position_bias_metric(const Scorer& scorer, const RatingsDataset& test,
                            std::size_t num_items) {
  if (test.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "position bias metric needs a nonempty test set");
  }
  if (num_items == 0) throw Error(ErrorCode::kInvalidArgument, "num_items must be >= 1");
  const double uniform = 1.0 / static_cast<double>(num_items);
  double sum = 0.0;
  for (const Rating& r : test.ratings()) {
    const double excess = scorer.normalized_score(r.user, r.item) - uniform;
    sum += excess * excess;
  }
  return sum / static_cast<double>(test.size());
}

MetricsReport evaluate_all(const Scorer& scorer, const RatingsDataset& train,
                           const RatingsDataset& test, std::size_t k_top,
                           MatthewVariant variant) {
  MetricsReport report;
  report.k_top = k_top;
  report.test_size = test.size();
  report.mae = mae(scorer, test);
  report.position_bias = position_bias_metric(scorer, test, test.num_items());
  const auto lists =
      top_k([&](Index u, Index i) { return scorer.score(u, i); }, train.num_users(),
            train.num_items(), k_top, &train);
  report.matthew_degree = matthew_degree(lists, variant);
  return report;
}

namespace {

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string sanitize(std::string_view text) {
  std::string out(text);
  std::replace_if(out.begin(), out.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; },
                  ';');
  return out;
}

template <typename T>
T parse_number(std::string_view field, std::string_view name) {
  T value{};
  if (field.empty()) return value;
  if constexpr (std::is_floating_point_v<T>) {
    if (field == "inf") return std::numeric_limits<T>::infinity();
    if (field == "-inf") return -std::numeric_limits<T>::infinity();
  }
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kParse,
                "report field " + std::string(name) + ": bad value '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::string format_report_row(const MetricsReport& r) {
  std::string row = sanitize(r.algorithm);
  row += ',' + format_real(r.beta);
  row += ',' + std::to_string(r.k);
  row += ',' + std::to_string(r.epochs);
  row += ',' + std::to_string(r.seed);
  row += ',' + std::to_string(r.k_top);
  if (r.ok()) {
    row += ',' + format_real(r.mae);
    row += ',' + format_real(r.matthew_degree);
    row += ',' + format_real(r.position_bias);
    row += ',' + std::to_string(r.test_size);
    row += ',';
  } else {
    row += ",,,,,";
    row += sanitize(r.error);
  }
  return row;
}

MetricsReport parse_report_row(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  std::vector<std::string_view> f;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    f.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (f.size() != 11) {
    throw Error(ErrorCode::kParse,
                "report row has " + std::to_string(f.size()) + " fields, expected 11");
  }
  MetricsReport r;
  r.algorithm = std::string(f[0]);
  r.beta = parse_number<double>(f[1], "beta");
  r.k = parse_number<std::size_t>(f[2], "k");
  r.epochs = parse_number<std::size_t>(f[3], "epochs");
  r.seed = parse_number<std::uint64_t>(f[4], "seed");
  r.k_top = parse_number<std::size_t>(f[5], "k_top");
  r.mae = parse_number<double>(f[6], "mae");
  r.matthew_degree = parse_number<double>(f[7], "matthew_degree");
  r.position_bias = parse_number<double>(f[8], "position_bias");
  r.test_size = parse_number<std::size_t>(f[9], "test_size");
  r.error = std::string(f[10]);
  return r;
}

void write_reports_csv(std::ostream& out, std::span<const MetricsReport> reports) {
  out << kReportCsvHeader << '\n';
  for (const MetricsReport& r : reports) out << format_report_row(r) << '\n';
}

void write_reports_csv(const std::filesystem::path& path, std::span<const MetricsReport> reports) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  write_reports_csv(out, reports);
  if (!out) throw Error(ErrorCode::kIo, "write failed on '" + path.string() + "'");
}

std::vector<MetricsReport> read_reports_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kReportCsvHeader) {
    throw Error(ErrorCode::kFormat, "'" + path.string() + "' lacks the report header");
  }
  std::vector<MetricsReport> reports;
  while (std::getline(in, line)) {
    if (!line.empty()) reports.push_back(parse_report_row(line));
  }
  return reports;
}

}  // namespace pbmf
