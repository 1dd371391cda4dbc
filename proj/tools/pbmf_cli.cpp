// pbmf: train, evaluate and benchmark position-bias regularized matrix
// factorization from the command line. Talks to the library only through
// the C API in pbmf/pbmf.h.

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pbmf/pbmf.h"

namespace {

constexpr int kExitLibraryError = 2;
constexpr int kExitRunFailures = 3;

struct DatasetDeleter {
  void operator()(pbmf_dataset* d) const { pbmf_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(pbmf_model* m) const { pbmf_model_free(m); }
};
using DatasetPtr = std::unique_ptr<pbmf_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<pbmf_model, ModelDeleter>;

struct LibraryError {
  pbmf_status status;
  std::string message;
};

void check(pbmf_status status) {
  if (status != PBMF_OK) throw LibraryError{status, pbmf_last_error()};
}

struct Options {
  std::string input;
  std::string format = "movielens";
  std::size_t user_col = 0;
  std::size_t item_col = 1;
  std::size_t rating_col = 2;
  char delimiter = ',';
  bool header = false;

  double test_fraction = 0.2;
  bool keep_unseen = false;
  std::uint64_t seed = 42;

  std::size_t k = 32;
  double lr = 0.01;
  std::size_t epochs = 20;
  double init_scale = 0.1;
  std::vector<std::string> algorithms;
  std::vector<double> betas;

  std::size_t k_top = 10;
  std::string matthew_variant = "literal";

  std::string output;
  std::string history;
  std::string model;
};

struct Splits {
  DatasetPtr train;
  DatasetPtr test;
};

Splits load_and_split(const Options& opt) {
  pbmf_dataset* raw = nullptr;
  if (opt.format == "movielens") {
    check(pbmf_dataset_load_movielens(opt.input.c_str(), &raw));
  } else {
    pbmf_csv_options csv;
    pbmf_csv_options_default(&csv);
    csv.user_col = opt.user_col;
    csv.item_col = opt.item_col;
    csv.rating_col = opt.rating_col;
    csv.delimiter = opt.delimiter;
    csv.has_header = opt.header ? 1 : 0;
    check(pbmf_dataset_load_csv(opt.input.c_str(), &csv, &raw));
  }
  DatasetPtr all(raw);

  pbmf_dataset_info info;
  check(pbmf_dataset_get_info(all.get(), &info));
  std::cerr << "loaded " << info.num_ratings << " ratings: " << info.num_users << " users, "
            << info.num_items << " items, r_max " << info.r_max;
  if (info.malformed_lines > 0) std::cerr << ", " << info.malformed_lines << " malformed lines";
  if (info.duplicates > 0) std::cerr << ", " << info.duplicates << " duplicates replaced";
  std::cerr << '\n';

  pbmf_split_spec spec;
  pbmf_split_spec_default(&spec);
  spec.test_fraction = opt.test_fraction;
  spec.seed = opt.seed;
  spec.drop_unseen = opt.keep_unseen ? 0 : 1;
  pbmf_dataset* train = nullptr;
  pbmf_dataset* test = nullptr;
  std::size_t dropped = 0;
  check(pbmf_dataset_split(all.get(), &spec, &train, &test, &dropped));
  Splits splits{DatasetPtr(train), DatasetPtr(test)};
  if (dropped > 0) std::cerr << "dropped " << dropped << " test ratings with unseen users/items\n";
  return splits;
}

pbmf_train_config train_config(const Options& opt) {
  pbmf_train_config config;
  pbmf_train_config_default(&config);
  config.k = opt.k;
  config.learning_rate = opt.lr;
  config.epochs = opt.epochs;
  config.seed = opt.seed;
  config.init_scale = opt.init_scale;
  return config;
}

pbmf_matthew_variant matthew_variant(const Options& opt) {
  return opt.matthew_variant == "pareto" ? PBMF_MATTHEW_PARETO : PBMF_MATTHEW_LITERAL;
}

int cmd_train(const Options& opt) {
  const std::string algorithm = opt.algorithms.empty() ? "position_bias_mf" : opt.algorithms[0];
  if (opt.algorithms.size() > 1 || opt.betas.size() > 1) {
    throw CLI::ValidationError("train takes a single --algorithm and a single --beta");
  }
  pbmf_train_config config = train_config(opt);
  check(pbmf_algorithm_parse(algorithm.c_str(), &config.algorithm));
  config.beta = opt.betas.empty() ? 0.0 : opt.betas[0];

  const Splits splits = load_and_split(opt);
  std::vector<pbmf_epoch_loss> history(config.epochs);
  std::size_t epochs_run = 0;
  pbmf_model* raw = nullptr;
  check(pbmf_train(splits.train.get(), &config, &raw, history.data(), history.size(),
                   &epochs_run));
  ModelPtr model(raw);
  history.resize(epochs_run);

  const std::string model_path = opt.output.empty() ? "model.pbmf" : opt.output;
  const std::string history_path = opt.history.empty() ? model_path + ".loss.csv" : opt.history;
  check(pbmf_model_save(model.get(), model_path.c_str()));
  check(pbmf_write_loss_history_csv(history_path.c_str(), history.data(), history.size()));

  const auto& last = history.back();
  std::printf("final loss %.6g (fit %.6g, penalty %.6g) after %zu epochs\n", last.total,
              last.fit, last.penalty, last.epoch);
  std::printf("model written to %s, loss history to %s\n", model_path.c_str(),
              history_path.c_str());
  return 0;
}

int cmd_evaluate(const Options& opt) {
  if (opt.model.empty()) throw CLI::RequiredError("--model");
  pbmf_model* raw = nullptr;
  check(pbmf_model_load(opt.model.c_str(), &raw));
  ModelPtr model(raw);
  pbmf_model_info info;
  check(pbmf_model_get_info(model.get(), &info));

  const Splits splits = load_and_split(opt);
  pbmf_metrics metrics;
  check(pbmf_evaluate_model(model.get(), splits.train.get(), splits.test.get(), opt.k_top,
                            matthew_variant(opt), &metrics));
  std::printf("mae %.6g\nmatthew_degree %.6g\nposition_bias %.6g\ntest_size %zu\n", metrics.mae,
              metrics.matthew_degree, metrics.position_bias, metrics.test_size);

  if (!opt.output.empty()) {
    const std::string label = opt.algorithms.empty()
                                  ? (info.cosine_mode ? "cosine_model" : "dot_model")
                                  : opt.algorithms[0];
    const pbmf_report report{label.c_str(), opt.betas.empty() ? 0.0 : opt.betas[0],
                             info.dim, 0, opt.seed, metrics};
    check(pbmf_write_reports_csv(opt.output.c_str(), &report, 1));
  }
  return 0;
}

int run_benchmark(const Options& opt, bool sweep) {
  std::vector<std::string> names = opt.algorithms;
  if (names.empty()) names = {"classic_mf", "cosine_mf", "position_bias_mf", "random", "zipf"};
  std::vector<double> betas = opt.betas;
  if (betas.empty()) betas = {0.0, 0.1, 1.0};
  if (sweep && betas.size() < 2) throw CLI::ValidationError("sweep needs at least two --beta values");

  std::vector<const char*> name_ptrs;
  for (const auto& n : names) name_ptrs.push_back(n.c_str());

  pbmf_benchmark_spec spec;
  pbmf_benchmark_spec_default(&spec);
  spec.algorithms = name_ptrs.data();
  spec.num_algorithms = name_ptrs.size();
  spec.betas = betas.data();
  spec.num_betas = betas.size();
  spec.sweep = sweep ? 1 : 0;
  spec.train = train_config(opt);
  spec.k_top = opt.k_top;
  spec.variant = matthew_variant(opt);

  const Splits splits = load_and_split(opt);
  const std::string out = opt.output.empty() ? (sweep ? "sweep.csv" : "results.csv") : opt.output;
  std::size_t failures = 0;
  check(pbmf_benchmark_run(splits.train.get(), splits.test.get(), &spec, out.c_str(), &failures));
  std::printf("results written to %s\n", out.c_str());
  if (failures > 0) {
    std::fprintf(stderr, "%zu run(s) failed; see the error column\n", failures);
    return kExitRunFailures;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Position-bias regularized matrix factorization toolkit"};
  app.set_config("--config", "", "Read `key = value` options from a file (flags override it)");
  app.require_subcommand(1, 1);
  // Subcommands only select the mode, so the root usage lists every flag.
  app.failure_message([](const CLI::App* root, const CLI::Error& e) {
    return std::string("ERROR: ") + e.what() + "\n\n" +
           root->get_formatter()->make_help(root, root->get_name(), CLI::AppFormatMode::Normal);
  });

  Options opt;
  app.add_option("--input", opt.input, "Ratings file")->check(CLI::ExistingFile);
  app.add_option("--format", opt.format, "Input format")
      ->check(CLI::IsMember({"movielens", "csv"}))
      ->capture_default_str();
  app.add_option("--user-col", opt.user_col, "CSV user column (0-based)")->capture_default_str();
  app.add_option("--item-col", opt.item_col, "CSV item column (0-based)")->capture_default_str();
  app.add_option("--rating-col", opt.rating_col, "CSV rating column (0-based)")
      ->capture_default_str();
  app.add_option("--delimiter", opt.delimiter, "CSV delimiter")->capture_default_str();
  app.add_flag("--header", opt.header, "CSV has a header row");
  app.add_option("--test-fraction", opt.test_fraction, "Held-out fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_flag("--keep-unseen", opt.keep_unseen,
               "Keep test ratings whose user or item never appears in training");
  app.add_option("--seed", opt.seed, "Seed for the split, initialization and shuffling")
      ->capture_default_str();
  app.add_option("--k", opt.k, "Latent dimension")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--lr", opt.lr, "SGD learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--epochs", opt.epochs, "SGD epochs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--init-scale", opt.init_scale, "Upper bound of the uniform initialization")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--algorithm", opt.algorithms,
                 "classic_mf, cosine_mf, position_bias_mf, random, zipf (comma list for benchmark)")
      ->delimiter(',');
  app.add_option("--beta", opt.betas, "Penalty weight(s), comma list for benchmark/sweep")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);
  app.add_option("--k-top", opt.k_top, "Recommendation list length for the Matthew metric")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--matthew-variant", opt.matthew_variant, "Reference frequency: literal (max) or pareto (min)")
      ->check(CLI::IsMember({"literal", "pareto"}))
      ->capture_default_str();
  app.add_option("--output", opt.output, "Output path (model file or results CSV)");
  app.add_option("--history", opt.history, "Loss history CSV for train (default <output>.loss.csv)");
  app.add_option("--model", opt.model, "Model file for evaluate")->check(CLI::ExistingFile);

  auto* train = app.add_subcommand("train", "Train one model and save it with its loss history");
  auto* evaluate = app.add_subcommand("evaluate", "Score a saved model on the held-out split");
  auto* benchmark = app.add_subcommand("benchmark", "Compare algorithms on one shared split");
  auto* sweep = app.add_subcommand("sweep", "position_bias_mf across ascending beta values");
  for (auto* sub : {train, evaluate, benchmark, sweep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
    if (opt.input.empty()) throw CLI::RequiredError("--input");
    if (opt.test_fraction <= 0.0 || opt.test_fraction >= 1.0) {
      throw CLI::ValidationError("--test-fraction", "must lie strictly between 0 and 1");
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (train->parsed()) return cmd_train(opt);
    if (evaluate->parsed()) return cmd_evaluate(opt);
    if (benchmark->parsed()) return run_benchmark(opt, false);
    return run_benchmark(opt, true);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const LibraryError& e) {
    std::cerr << "error (" << pbmf_status_string(e.status) << "): " << e.message << '\n';
    return kExitLibraryError;
  }
}
