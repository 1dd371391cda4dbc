#include "pbmf/pbmf.h"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pbmf/benchmark.hpp"
#include "pbmf/dataset.hpp"
#include "pbmf/error.hpp"
#include "pbmf/evaluation.hpp"
#include "pbmf/factor_model.hpp"
#include "pbmf/trainer.hpp"

struct pbmf_dataset {
  pbmf::RatingsDataset data;
};

struct pbmf_model {
  pbmf::FactorModel model;
};

namespace {

thread_local std::string last_error;

pbmf_status fail(pbmf_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

pbmf_status to_status(pbmf::ErrorCode code) {
  switch (code) {
    case pbmf::ErrorCode::kInvalidArgument: return PBMF_ERR_INVALID_ARGUMENT;
    case pbmf::ErrorCode::kIo: return PBMF_ERR_IO;
    case pbmf::ErrorCode::kEmptyDataset: return PBMF_ERR_EMPTY_DATASET;
    case pbmf::ErrorCode::kParse: return PBMF_ERR_PARSE;
    case pbmf::ErrorCode::kSchema: return PBMF_ERR_SCHEMA;
    case pbmf::ErrorCode::kSplit: return PBMF_ERR_SPLIT;
    case pbmf::ErrorCode::kFormat: return PBMF_ERR_FORMAT;
    case pbmf::ErrorCode::kCorruption: return PBMF_ERR_CORRUPTION;
    case pbmf::ErrorCode::kDivergence: return PBMF_ERR_DIVERGENCE;
  }
  return PBMF_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
pbmf_status guarded(F&& body) noexcept {
  try {
    body();
    return PBMF_OK;
  } catch (const pbmf::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PBMF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PBMF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PBMF_ERR_INTERNAL, "unknown error");
  }
}

void require(bool condition, const char* what) {
  if (!condition) throw pbmf::Error(pbmf::ErrorCode::kInvalidArgument, what);
}

pbmf::TrainConfig to_config(const pbmf_train_config& c) {
  pbmf::TrainConfig config;
  config.k = c.k;
  config.learning_rate = c.learning_rate;
  config.beta = c.beta;
  config.epochs = c.epochs;
  config.seed = c.seed;
  config.init_scale = c.init_scale;
  config.norm_epsilon = c.norm_epsilon;
  config.shuffle_each_epoch = c.shuffle_each_epoch != 0;
  switch (c.algorithm) {
    case PBMF_CLASSIC_MF: config.algorithm = pbmf::Algorithm::kClassicMf; break;
    case PBMF_COSINE_MF: config.algorithm = pbmf::Algorithm::kCosineMf; break;
    case PBMF_POSITION_BIAS_MF: config.algorithm = pbmf::Algorithm::kPositionBiasMf; break;
    default: throw pbmf::Error(pbmf::ErrorCode::kInvalidArgument, "unknown algorithm");
  }
  return config;
}

pbmf::MatthewVariant to_variant(pbmf_matthew_variant v) {
  switch (v) {
    case PBMF_MATTHEW_LITERAL: return pbmf::MatthewVariant::kLiteralXmax;
    case PBMF_MATTHEW_PARETO: return pbmf::MatthewVariant::kParetoXmin;
  }
  throw pbmf::Error(pbmf::ErrorCode::kInvalidArgument, "unknown Matthew variant");
}

}  // namespace

extern "C" {

const char* pbmf_version(void) { return "1.0.0"; }

const char* pbmf_status_string(pbmf_status status) {
  switch (status) {
    case PBMF_OK: return "ok";
    case PBMF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PBMF_ERR_IO: return "i/o error";
    case PBMF_ERR_EMPTY_DATASET: return "empty dataset";
    case PBMF_ERR_PARSE: return "parse error";
    case PBMF_ERR_SCHEMA: return "schema error";
    case PBMF_ERR_SPLIT: return "split error";
    case PBMF_ERR_FORMAT: return "format error";
    case PBMF_ERR_CORRUPTION: return "corruption error";
    case PBMF_ERR_DIVERGENCE: return "divergence";
    case PBMF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pbmf_last_error(void) { return last_error.c_str(); }

void pbmf_csv_options_default(pbmf_csv_options* options) {
  if (options == nullptr) return;
  const pbmf::CsvOptions d;
  *options = {d.user_col, d.item_col, d.rating_col, d.delimiter, d.has_header ? 1 : 0};
}

void pbmf_split_spec_default(pbmf_split_spec* spec) {
  if (spec == nullptr) return;
  const pbmf::SplitSpec d;
  *spec = {d.test_fraction, d.seed, d.drop_unseen ? 1 : 0};
}

pbmf_status pbmf_dataset_load_movielens(const char* path, pbmf_dataset** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out must be non-null");
    *out = new pbmf_dataset{pbmf::load_movielens(path)};
  });
}

pbmf_status pbmf_dataset_load_csv(const char* path, const pbmf_csv_options* options,
                                  pbmf_dataset** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out must be non-null");
    pbmf::CsvOptions opts;
    if (options != nullptr) {
      opts = {options->user_col, options->item_col, options->rating_col, options->delimiter,
              options->has_header != 0};
    }
    *out = new pbmf_dataset{pbmf::load_csv(path, opts)};
  });
}

pbmf_status pbmf_dataset_get_info(const pbmf_dataset* dataset, pbmf_dataset_info* out) {
  return guarded([&] {
    require(dataset != nullptr && out != nullptr, "dataset and out must be non-null");
    const auto& d = dataset->data;
    *out = {d.num_users(), d.num_items(), d.size(), d.r_min(), d.r_max(),
            d.stats().malformed_lines, d.stats().duplicates};
  });
}

pbmf_status pbmf_dataset_split(const pbmf_dataset* dataset, const pbmf_split_spec* spec,
                               pbmf_dataset** train, pbmf_dataset** test, size_t* dropped) {
  return guarded([&] {
    require(dataset != nullptr && spec != nullptr && train != nullptr && test != nullptr,
            "dataset, spec, train and test must be non-null");
    auto parts = pbmf::split(dataset->data,
                             {spec->test_fraction, spec->seed, spec->drop_unseen != 0});
    auto train_handle = std::make_unique<pbmf_dataset>(pbmf_dataset{std::move(parts.train)});
    auto test_handle = std::make_unique<pbmf_dataset>(pbmf_dataset{std::move(parts.test)});
    *train = train_handle.release();
    *test = test_handle.release();
    if (dropped != nullptr) *dropped = parts.dropped;
  });
}

void pbmf_dataset_free(pbmf_dataset* dataset) { delete dataset; }

void pbmf_train_config_default(pbmf_train_config* config) {
  if (config == nullptr) return;
  const pbmf::TrainConfig d;
  *config = {d.k,          d.learning_rate, d.beta,
             d.epochs,     d.seed,          d.init_scale,
             d.norm_epsilon, d.shuffle_each_epoch ? 1 : 0, PBMF_POSITION_BIAS_MF};
}

pbmf_status pbmf_algorithm_parse(const char* name, pbmf_algorithm* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "name and out must be non-null");
    const auto algorithm = pbmf::parse_algorithm(name);
    if (!algorithm) {
      throw pbmf::Error(pbmf::ErrorCode::kInvalidArgument,
                        std::string("unknown algorithm '") + name + "'");
    }
    switch (*algorithm) {
      case pbmf::Algorithm::kClassicMf: *out = PBMF_CLASSIC_MF; break;
      case pbmf::Algorithm::kCosineMf: *out = PBMF_COSINE_MF; break;
      case pbmf::Algorithm::kPositionBiasMf: *out = PBMF_POSITION_BIAS_MF; break;
    }
  });
}

pbmf_status pbmf_train(const pbmf_dataset* train, const pbmf_train_config* config,
                       pbmf_model** out, pbmf_epoch_loss* history, size_t history_capacity,
                       size_t* history_len) {
  return guarded([&] {
    require(train != nullptr && config != nullptr && out != nullptr,
            "train, config and out must be non-null");
    auto result = pbmf::train(train->data, to_config(*config));
    if (history != nullptr) {
      const std::size_t count = std::min(history_capacity, result.history.size());
      for (std::size_t e = 0; e < count; ++e) {
        const auto& h = result.history[e];
        history[e] = {h.epoch, h.fit, h.penalty, h.total};
      }
    }
    if (history_len != nullptr) *history_len = result.history.size();
    *out = new pbmf_model{std::move(result.model)};
  });
}

pbmf_status pbmf_write_loss_history_csv(const char* path, const pbmf_epoch_loss* history,
                                        size_t count) {
  return guarded([&] {
    require(path != nullptr && (history != nullptr || count == 0),
            "path and history must be non-null");
    std::vector<pbmf::EpochLoss> losses(count);
    for (std::size_t e = 0; e < count; ++e) {
      losses[e] = {history[e].epoch, history[e].fit, history[e].penalty, history[e].total};
    }
    pbmf::write_loss_history_csv(losses, path);
  });
}

pbmf_status pbmf_model_save(const pbmf_model* model, const char* path) {
  return guarded([&] {
    require(model != nullptr && path != nullptr, "model and path must be non-null");
    pbmf::save_model(model->model, path);
  });
}

pbmf_status pbmf_model_load(const char* path, pbmf_model** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out must be non-null");
    *out = new pbmf_model{pbmf::load_model(path)};
  });
}

pbmf_status pbmf_model_get_info(const pbmf_model* model, pbmf_model_info* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "model and out must be non-null");
    const auto& m = model->model;
    *out = {m.num_users(), m.num_items(), m.dim(),
            m.mode() == pbmf::PredictionMode::kCosine ? 1 : 0, m.r_max()};
  });
}

pbmf_status pbmf_model_predict(const pbmf_model* model, size_t user, size_t item,
                               double* out_rating) {
  return guarded([&] {
    require(model != nullptr && out_rating != nullptr, "model and out must be non-null");
    *out_rating = model->model.predicted_rating(user, item);
  });
}

void pbmf_model_free(pbmf_model* model) { delete model; }

pbmf_status pbmf_evaluate_model(const pbmf_model* model, const pbmf_dataset* train,
                                const pbmf_dataset* test, size_t k_top,
                                pbmf_matthew_variant variant, pbmf_metrics* out) {
  return guarded([&] {
    require(model != nullptr && train != nullptr && test != nullptr && out != nullptr,
            "model, train, test and out must be non-null");
    const auto& m = model->model;
    if (m.num_users() != train->data.num_users() || m.num_items() != train->data.num_items()) {
      throw pbmf::Error(pbmf::ErrorCode::kInvalidArgument,
                        "model is " + std::to_string(m.num_users()) + "x" +
                            std::to_string(m.num_items()) + " but the dataset is " +
                            std::to_string(train->data.num_users()) + "x" +
                            std::to_string(train->data.num_items()));
    }
    const auto report =
        pbmf::evaluate_all(pbmf::ModelScorer(m), train->data, test->data, k_top, to_variant(variant));
    *out = {report.mae, report.matthew_degree, report.position_bias, report.k_top,
            report.test_size};
  });
}

pbmf_status pbmf_write_reports_csv(const char* path, const pbmf_report* reports, size_t count) {
  return guarded([&] {
    require(path != nullptr && (reports != nullptr || count == 0),
            "path and reports must be non-null");
    std::vector<pbmf::MetricsReport> rows(count);
    for (std::size_t r = 0; r < count; ++r) {
      const pbmf_report& in = reports[r];
      auto& row = rows[r];
      row.algorithm = in.algorithm != nullptr ? in.algorithm : "";
      row.beta = in.beta;
      row.k = in.k;
      row.epochs = in.epochs;
      row.seed = in.seed;
      row.k_top = in.metrics.k_top;
      row.mae = in.metrics.mae;
      row.matthew_degree = in.metrics.matthew_degree;
      row.position_bias = in.metrics.position_bias;
      row.test_size = in.metrics.test_size;
    }
    pbmf::write_reports_csv(std::filesystem::path(path), rows);
  });
}

void pbmf_benchmark_spec_default(pbmf_benchmark_spec* spec) {
  if (spec == nullptr) return;
  *spec = pbmf_benchmark_spec{};
  pbmf_train_config_default(&spec->train);
  spec->k_top = pbmf::kDefaultTopK;
  spec->variant = PBMF_MATTHEW_LITERAL;
}

pbmf_status pbmf_benchmark_run(const pbmf_dataset* train, const pbmf_dataset* test,
                               const pbmf_benchmark_spec* spec, const char* csv_path,
                               size_t* failed_runs) {
  return guarded([&] {
    require(train != nullptr && test != nullptr && spec != nullptr && csv_path != nullptr,
            "train, test, spec and csv_path must be non-null");
    require(spec->betas != nullptr || spec->num_betas == 0, "betas must be non-null");
    const std::span<const double> betas(spec->betas, spec->num_betas);

    pbmf::BenchmarkSpec bench;
    if (spec->sweep != 0) {
      bench.runs = pbmf::sweep_runs(betas);
    } else {
      require(spec->algorithms != nullptr || spec->num_algorithms == 0,
              "algorithms must be non-null");
      std::vector<std::string> names;
      for (std::size_t a = 0; a < spec->num_algorithms; ++a) {
        require(spec->algorithms[a] != nullptr, "algorithm names must be non-null");
        names.emplace_back(spec->algorithms[a]);
      }
      bench.runs = pbmf::expand_runs(names, betas);
    }
    bench.train = to_config(spec->train);
    pbmf::validate(bench.train);
    require(spec->k_top >= 1, "k_top must be >= 1");
    bench.k_top = spec->k_top;
    bench.variant = to_variant(spec->variant);

    const auto reports = pbmf::run_benchmark(train->data, test->data, bench);
    pbmf::write_reports_csv(std::filesystem::path(csv_path), reports);
    if (failed_runs != nullptr) {
      *failed_runs = static_cast<std::size_t>(
          std::count_if(reports.begin(), reports.end(), [](const auto& r) { return !r.ok(); }));
    }
  });
}

}  // extern "C"
