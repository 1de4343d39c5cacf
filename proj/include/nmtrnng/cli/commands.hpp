#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nmtrnng/core/graph.hpp"
#include "nmtrnng/train/config.hpp"

namespace nmtrnng::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kValidationFailure = 3 };

// Maps an exception escaping a command onto the process exit code.
int exit_code_for(const std::exception& e);

// File names inside a preprocessed data directory.
struct DataLayout {
  fs::path dir;
  fs::path source_vocab() const { return dir / "vocab.src"; }
  fs::path target_vocab() const { return dir / "vocab.tgt"; }
  fs::path labels() const { return dir / "labels.txt"; }
  fs::path ids(const std::string& split, const std::string& side) const {
    return dir / (split + "." + side + ".ids");
  }
  fs::path actions(const std::string& split) const { return dir / (split + ".actions"); }
  fs::path stats() const { return dir / "stats.txt"; }
};

// Hash over the three vocabulary files, stored in checkpoints.
std::uint64_t vocabulary_hash(const DataLayout& layout);

struct PreprocessOptions {
  fs::path train_source, train_target, train_parse;
  fs::path dev_source, dev_target, dev_parse;
  fs::path out_dir;
  std::size_t source_min_frequency = 1;
  std::size_t target_min_frequency = 1;
  std::size_t max_length = 50;
};

struct PreprocessStats {
  std::size_t train_pairs = 0;
  std::size_t dev_pairs = 0;
  std::size_t source_vocab = 0;
  std::size_t target_vocab = 0;
  std::size_t action_vocab = 0;
  std::size_t labels = 0;
  std::size_t dropped_empty = 0;
  std::size_t dropped_length = 0;
  std::size_t skipped_nonprojective = 0;
  std::size_t dev_skipped = 0;
};

PreprocessStats run_preprocess(const PreprocessOptions& options, std::ostream& log);

struct TrainOptions {
  fs::path data_dir;
  fs::path out_dir;
  train::TrainConfig config;
  bool resume = false;
};

fs::path last_checkpoint_path(const fs::path& out_dir);
fs::path best_checkpoint_path(const fs::path& out_dir);

// Returns the best dev perplexity reached.
double run_train(const TrainOptions& options, std::ostream& log);

struct TranslateOptions {
  fs::path checkpoint;
  fs::path data_dir;
  fs::path input;
  fs::path output;
  fs::path parse_output;  // joint mode
  std::size_t beam = 5;
  std::size_t max_length = 0;
  bool length_normalize = false;
  bool joint = false;
  // Load only the translator slots, as a model built without the parser.
  bool translator_only = false;
};

void run_translate(const TranslateOptions& options, std::ostream& log);

struct SweepOptions {
  fs::path checkpoint;
  fs::path data_dir;
  fs::path input;
  fs::path reference;
  std::vector<std::size_t> beams{1, 2, 5, 10};
  std::size_t max_length = 0;
  bool length_normalize = false;
};

struct SweepPoint {
  std::size_t beam = 0;
  double bleu = 0.0;
  double ribes = 0.0;
  std::size_t unfinished = 0;
};

// Beam search at every width in `beams`, scored against `reference`; one
// key=value line per width goes to `log`.
std::vector<SweepPoint> run_beam_sweep(const SweepOptions& options, std::ostream& log);

struct EvalOptions {
  fs::path hypothesis;
  fs::path reference;
  fs::path hypothesis_b;  // optional second system
  std::size_t resamples = 1000;
  std::uint64_t seed = 1;
};

struct EvalReport {
  double bleu = 0.0;
  double ribes = 0.0;
  std::optional<double> bleu_b, ribes_b;
  std::optional<double> p_bleu, p_ribes;

  // "key=value" lines
  std::string key_values() const;
};

EvalReport run_eval(const EvalOptions& options, std::ostream& log);

struct GradcheckOptions {
  std::size_t dim = 4;
  std::size_t vocab = 8;
  std::size_t labels = 2;
  std::size_t max_length = 3;
  std::uint64_t seed = 1;
  double epsilon = 1e-5;
  double threshold = 1e-4;
  // Applied to every loss before checking; lets tests plant a broken rule.
  std::function<core::Expr(core::Graph&, core::Expr)> transform;
};

struct GradcheckEntry {
  std::string loss;
  double max_relative_error = 0.0;
  std::string worst_slot;
  std::size_t checked_scalars = 0;
};

struct GradcheckReport {
  std::vector<GradcheckEntry> entries;
  double max_relative_error = 0.0;
  std::string worst_slot;
  bool passed = false;
};

// Full joint loss plus word-only, action-only and translator-only losses
// on two toy pairs with every slot drawn at random.
GradcheckReport run_gradcheck(const GradcheckOptions& options, std::ostream& log);

}  // namespace nmtrnng::cli
