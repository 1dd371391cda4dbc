#include "pbmf/factor_model.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "pbmf/error.hpp"
#include "pbmf/rng.hpp"

namespace pbmf {

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) sum += a[d] * b[d];
  return sum;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double cosine(std::span<const double> a, std::span<const double> b, double epsilon) {
  return dot(a, b) / std::max(norm(a) * norm(b), epsilon);
}

FactorModel::FactorModel(std::size_t n, std::size_t m, std::size_t k, PredictionMode mode,
                         double r_max, double norm_epsilon)
    : n_(n), m_(m), k_(k), mode_(mode), r_max_(r_max), norm_epsilon_(norm_epsilon) {
  if (n == 0 || m == 0 || k == 0) {
    throw Error(ErrorCode::kInvalidArgument, "model dimensions must be >= 1");
  }
  if (!(norm_epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "norm_epsilon must be > 0");
  }
  set_r_max(r_max);
  user_factors_.assign(n * k, 0.0);
  item_factors_.assign(m * k, 0.0);
}

void FactorModel::set_r_max(double r_max) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw Error(ErrorCode::kInvalidArgument, "r_max must be finite and > 0");
  }
  r_max_ = r_max;
}

void FactorModel::check_index(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= m_) {
    throw Error(ErrorCode::kInvalidArgument,
                "index (" + std::to_string(i) + ", " + std::to_string(j) +
                    ") outside model of " + std::to_string(n_) + " x " + std::to_string(m_));
  }
}

void FactorModel::set_norm_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "norm_epsilon must be > 0");
  norm_epsilon_ = epsilon;
}

double FactorModel::predict_dot(std::size_t i, std::size_t j) const {
  check_index(i, j);
  return dot(user(i), item(j));
}

double FactorModel::predict_cosine(std::size_t i, std::size_t j) const {
  check_index(i, j);
  return cosine(user(i), item(j), norm_epsilon_);
}

double FactorModel::score(std::size_t i, std::size_t j) const {
  return mode_ == PredictionMode::kCosine ? predict_cosine(i, j) : predict_dot(i, j);
}

double FactorModel::predicted_rating(std::size_t i, std::size_t j) const {
  if (mode_ == PredictionMode::kCosine) {
    return std::clamp(predict_cosine(i, j), 0.0, 1.0) * r_max_;
  }
  return std::clamp(predict_dot(i, j), 0.0, r_max_);
}

double FactorModel::normalized_score(std::size_t i, std::size_t j) const {
  if (mode_ == PredictionMode::kCosine) return predict_cosine(i, j);
  return predicted_rating(i, j) / r_max_;
}

FactorModel init_model(std::size_t n, std::size_t m, std::size_t k, std::uint64_t seed,
                       double scale, PredictionMode mode, double r_max) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::kInvalidArgument, "init scale must be finite and > 0");
  }
  FactorModel model(n, m, k, mode, r_max);
  Rng rng(seed);
  for (double& x : model.user_factors()) x = rng.uniform_open_closed() * scale;
  for (double& x : model.item_factors()) x = rng.uniform_open_closed() * scale;
  return model;
}

namespace {

constexpr std::array<char, 4> kMagic = {'P', 'B', 'M', 'F'};
constexpr std::size_t kHeaderSize = 4 + 1 + 3 * 8 + 1 + 8;

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(const std::string& in, std::size_t offset) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + b])) << (8 * b);
  }
  return v;
}

double get_f64(const std::string& in, std::size_t offset) {
  return std::bit_cast<double>(get_u64(in, offset));
}

}  // namespace

void save_model(const FactorModel& model, const std::filesystem::path& path) {
  std::string out;
  out.reserve(kHeaderSize + 8 * (model.user_factors().size() + model.item_factors().size()));
  out.append(kMagic.data(), kMagic.size());
  out.push_back(static_cast<char>(kModelFormatVersion));
  put_u64(out, model.num_users());
  put_u64(out, model.num_items());
  put_u64(out, model.dim());
  out.push_back(static_cast<char>(model.mode()));
  put_f64(out, model.r_max());
  for (double x : model.user_factors()) put_f64(out, x);
  for (double x : model.item_factors()) put_f64(out, x);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIo, "write failed on '" + path.string() + "'");
}

FactorModel load_model(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  const std::string in((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  const std::string where = "'" + path.string() + "': ";

  if (in.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), in.begin())) {
    throw Error(ErrorCode::kFormat, where + "not a model file (bad magic)");
  }
  if (in.size() < kHeaderSize) throw Error(ErrorCode::kCorruption, where + "truncated header");
  const auto version = static_cast<std::uint8_t>(in[4]);
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::kFormat, where + "unsupported format version " + std::to_string(version));
  }
  const std::uint64_t n = get_u64(in, 5);
  const std::uint64_t m = get_u64(in, 13);
  const std::uint64_t k = get_u64(in, 21);
  const auto mode_byte = static_cast<std::uint8_t>(in[29]);
  const double r_max = get_f64(in, 30);
  if (mode_byte > 1) throw Error(ErrorCode::kFormat, where + "unknown prediction mode");
  if (n == 0 || m == 0 || k == 0) throw Error(ErrorCode::kCorruption, where + "zero dimension");

  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max() / 8;
  if (n > kMax / k || m > kMax / k || n * k > kMax - m * k) {
    throw Error(ErrorCode::kCorruption, where + "dimensions overflow");
  }
  const std::uint64_t payload = 8 * (n * k + m * k);
  if (in.size() - kHeaderSize != payload) {
    throw Error(ErrorCode::kCorruption,
                where + "expected " + std::to_string(payload) + " payload bytes for " +
                    std::to_string(n) + "x" + std::to_string(m) + "x" + std::to_string(k) +
                    ", found " + std::to_string(in.size() - kHeaderSize));
  }
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw Error(ErrorCode::kCorruption, where + "invalid r_max");
  }

  FactorModel model(n, m, k, static_cast<PredictionMode>(mode_byte), r_max);
  std::size_t offset = kHeaderSize;
  for (double& x : model.user_factors()) {
    x = get_f64(in, offset);
    offset += 8;
  }
  for (double& x : model.item_factors()) {
    x = get_f64(in, offset);
    offset += 8;
  }
  return model;
}

TopKLists top_k(const ScoreFunction& score, std::size_t num_users, std::size_t num_items,
                std::size_t k_top, const RatingsDataset* exclude) {
  if (k_top == 0) throw Error(ErrorCode::kInvalidArgument, "k_top must be >= 1");
  std::vector<std::vector<Index>> seen(num_users);
  if (exclude != nullptr) {
    for (const Rating& r : exclude->ratings()) {
      if (r.user < num_users) seen[r.user].push_back(r.item);
    }
    for (auto& items : seen) std::sort(items.begin(), items.end());
  }

  const auto better = [](const ScoredItem& a, const ScoredItem& b) {
    return a.score > b.score || (a.score == b.score && a.item < b.item);
  };

  TopKLists result{k_top, std::vector<std::vector<ScoredItem>>(num_users)};
  std::vector<ScoredItem> candidates;
  candidates.reserve(num_items);
  for (std::size_t u = 0; u < num_users; ++u) {
    candidates.clear();
    const auto& skip = seen[u];
    for (std::size_t j = 0; j < num_items; ++j) {
      const auto item = static_cast<Index>(j);
      if (std::binary_search(skip.begin(), skip.end(), item)) continue;
      candidates.push_back({item, score(static_cast<Index>(u), item)});
    }
    const std::size_t keep = std::min(k_top, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), better);
    result.lists[u].assign(candidates.begin(),
                           candidates.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  return result;
}

}  // namespace pbmf
