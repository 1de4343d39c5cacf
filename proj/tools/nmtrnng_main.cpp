// nmtrnng: preprocess, train, translate, eval and gradcheck commands.
//
// Every option can also come from a TOML/INI file given with --config; the
// effective configuration of train and preprocess runs is written to
// <out_dir>/effective_config.toml and can be replayed with
// `nmtrnng --config <out_dir>/effective_config.toml <subcommand>`.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "nmtrnng/cli/commands.hpp"
#include "nmtrnng/core/errors.hpp"
#include "nmtrnng/model/model.hpp"

using namespace nmtrnng;

namespace {

// Keeps only the lines of the running subcommand, so the file can be fed
// back with `--config <file> <subcommand>`.
void echo_config(const CLI::App& app, const CLI::App& sub, const cli::fs::path& out_dir) {
  cli::fs::create_directories(out_dir);
  std::ofstream out(out_dir / "effective_config.toml");
  std::istringstream all(app.config_to_str(true, false));
  const std::string prefix = sub.get_name() + ".";
  for (std::string line; std::getline(all, line);) {
    if (line.rfind(prefix, 0) == 0) out << line << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attentional translator with a jointly trained dependency-parse decoder"};
  app.set_config("--config", "", "TOML/INI file with option values");
  app.require_subcommand(1);

  cli::PreprocessOptions pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "Build vocabularies, encode and filter a corpus");
  pre_cmd->add_option("--train-source", pre.train_source)->required();
  pre_cmd->add_option("--train-target", pre.train_target)->required();
  pre_cmd->add_option("--train-parse", pre.train_parse, "CoNLL parses of the target side");
  pre_cmd->add_option("--dev-source", pre.dev_source);
  pre_cmd->add_option("--dev-target", pre.dev_target);
  pre_cmd->add_option("--dev-parse", pre.dev_parse);
  pre_cmd->add_option("--out-dir", pre.out_dir)->required();
  pre_cmd->add_option("--source-min-frequency", pre.source_min_frequency)->capture_default_str();
  pre_cmd->add_option("--target-min-frequency", pre.target_min_frequency)->capture_default_str();
  pre_cmd->add_option("--max-length", pre.max_length)->capture_default_str();

  cli::TrainOptions tr;
  std::vector<std::string> ablations;
  bool no_rnng = false;
  bool no_shuffle = false;
  auto* tr_cmd = app.add_subcommand("train", "Train with the dev-perplexity schedule");
  tr_cmd->add_option("--data-dir", tr.data_dir)->required();
  tr_cmd->add_option("--out-dir", tr.out_dir)->required();
  tr_cmd->add_option("--word-dim", tr.config.word_dim)->capture_default_str();
  tr_cmd->add_option("--action-dim", tr.config.action_dim)->capture_default_str();
  tr_cmd->add_option("--hidden-dim", tr.config.hidden_dim)->capture_default_str();
  tr_cmd->add_option("--learning-rate", tr.config.learning_rate)->capture_default_str();
  tr_cmd->add_option("--clip", tr.config.clip_threshold)->capture_default_str();
  tr_cmd->add_option("--batch-size", tr.config.batch_size)->capture_default_str();
  tr_cmd->add_option("--epochs", tr.config.max_epochs)->capture_default_str();
  tr_cmd->add_option("--seed", tr.config.seed)->capture_default_str();
  tr_cmd->add_option("--ablate", ablations,
                     "without_buffer, without_action or without_stack (repeatable)");
  tr_cmd->add_flag("--no-rnng", no_rnng, "Train the translator alone");
  tr_cmd->add_flag("--no-shuffle", no_shuffle);
  bool fixed_lr = false;
  tr_cmd->add_flag("--fixed-lr", fixed_lr, "Disable the halve-and-reload schedule");
  tr_cmd->add_flag("--resume", tr.resume, "Continue from <out-dir>/last.ckpt");

  cli::TranslateOptions tl;
  auto* tl_cmd = app.add_subcommand("translate", "Decode a source file");
  tl_cmd->add_option("--checkpoint", tl.checkpoint)->required();
  tl_cmd->add_option("--data-dir", tl.data_dir, "Directory holding the vocabulary files")
      ->required();
  tl_cmd->add_option("--input", tl.input)->required();
  tl_cmd->add_option("--output", tl.output)->required();
  tl_cmd->add_option("--beam", tl.beam)->capture_default_str();
  tl_cmd->add_option("--max-length", tl.max_length, "0: 2 * source length + 10")
      ->capture_default_str();
  tl_cmd->add_flag("--length-normalize", tl.length_normalize);
  tl_cmd->add_flag("--joint", tl.joint, "Greedy translate-and-parse");
  tl_cmd->add_option("--parse-output", tl.parse_output, "CoNLL output of --joint");
  tl_cmd->add_flag("--translator-only", tl.translator_only,
                   "Instantiate the model without parser slots");

  cli::EvalOptions ev;
  cli::SweepOptions sw;
  auto* sw_cmd = app.add_subcommand("sweep", "BLEU and RIBES of beam search at several widths");
  sw_cmd->add_option("--checkpoint", sw.checkpoint)->required();
  sw_cmd->add_option("--data-dir", sw.data_dir)->required();
  sw_cmd->add_option("--input", sw.input)->required();
  sw_cmd->add_option("--reference", sw.reference)->required();
  sw_cmd->add_option("--beams", sw.beams)->delimiter(',')->capture_default_str();
  sw_cmd->add_option("--max-length", sw.max_length)->capture_default_str();
  sw_cmd->add_flag("--length-normalize", sw.length_normalize);

  auto* ev_cmd = app.add_subcommand("eval", "BLEU, RIBES and paired bootstrap");
  ev_cmd->add_option("--hypothesis", ev.hypothesis)->required();
  ev_cmd->add_option("--reference", ev.reference)->required();
  ev_cmd->add_option("--hypothesis-b", ev.hypothesis_b, "Second system for significance");
  ev_cmd->add_option("--resamples", ev.resamples)->capture_default_str();
  ev_cmd->add_option("--seed", ev.seed)->capture_default_str();

  cli::GradcheckOptions gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference check of the joint loss");
  gc_cmd->add_option("--dim", gc.dim)->capture_default_str();
  gc_cmd->add_option("--vocab", gc.vocab)->capture_default_str();
  gc_cmd->add_option("--labels", gc.labels)->capture_default_str();
  gc_cmd->add_option("--max-length", gc.max_length)->capture_default_str();
  gc_cmd->add_option("--seed", gc.seed)->capture_default_str();
  gc_cmd->add_option("--epsilon", gc.epsilon)->capture_default_str();
  gc_cmd->add_option("--threshold", gc.threshold)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kUsage;
  }

  try {
    if (*pre_cmd) {
      echo_config(app, *pre_cmd, pre.out_dir);
      cli::run_preprocess(pre, std::cout);
    } else if (*tr_cmd) {
      for (const auto& flag : ablations) model::set_ablation_flag(tr.config.ablation, flag);
      tr.config.with_rnng = !no_rnng;
      tr.config.shuffle = !no_shuffle;
      tr.config.lr_schedule = !fixed_lr;
      echo_config(app, *tr_cmd, tr.out_dir);
      cli::run_train(tr, std::cout);
    } else if (*tl_cmd) {
      cli::run_translate(tl, std::cerr);
    } else if (*sw_cmd) {
      cli::run_beam_sweep(sw, std::cout);
    } else if (*ev_cmd) {
      const auto report = cli::run_eval(ev, std::cerr);
      std::cout << report.key_values();
    } else if (*gc_cmd) {
      const auto report = cli::run_gradcheck(gc, std::cout);
      if (!report.passed) return cli::kValidationFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code_for(e);
  }
  return cli::kOk;
}
