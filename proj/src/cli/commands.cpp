#include "nmtrnng/cli/commands.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include "nmtrnng/cli/toy.hpp"
#include "nmtrnng/core/errors.hpp"
#include "nmtrnng/core/grad_check.hpp"
#include "nmtrnng/core/ops.hpp"
#include "nmtrnng/data/corpus.hpp"
#include "nmtrnng/data/dep_tree.hpp"
#include "nmtrnng/data/vocabulary.hpp"
#include "nmtrnng/decode/beam.hpp"
#include "nmtrnng/decode/greedy.hpp"
#include "nmtrnng/eval/bleu.hpp"
#include "nmtrnng/eval/bootstrap.hpp"
#include "nmtrnng/eval/ribes.hpp"
#include "nmtrnng/rnng/joint.hpp"
#include "nmtrnng/train/checkpoint.hpp"
#include "nmtrnng/train/init.hpp"
#include "nmtrnng/train/trainer.hpp"

namespace nmtrnng::cli {

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input file " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::vector<data::Sentence> read_sentence_file(const fs::path& path) {
  auto in = open_input(path);
  return data::read_sentences(in);
}

std::string read_bytes(const fs::path& path) {
  auto in = open_input(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

data::Vocabulary load_vocab(const fs::path& path) {
  auto in = open_input(path);
  return data::Vocabulary::load(in);
}

data::LabelSet load_labels(const fs::path& path) {
  if (!fs::exists(path)) return data::LabelSet::build({});
  auto in = open_input(path);
  return data::LabelSet::load(in);
}

std::optional<std::vector<data::ConllSentence>> read_parses(const fs::path& path) {
  if (path.empty()) return std::nullopt;
  auto in = open_input(path);
  return data::read_conll(in);
}

struct EncodedSplit {
  std::vector<std::vector<int>> source, target;
  std::vector<rnng::ActionSequence> actions;
  std::size_t skipped = 0;
};

// Encodes pairs; parses that are non-projective or carry labels outside
// `labels` are skipped together with their pair.
EncodedSplit encode_split(const std::vector<data::RawPair>& pairs, const data::Vocabulary& src,
                          const data::Vocabulary& tgt, const data::LabelSet& labels,
                          const std::string& split, std::ostream& log) {
  EncodedSplit out;
  for (const auto& pair : pairs) {
    rnng::ActionSequence actions;
    if (pair.parse) {
      bool known = true;
      for (std::size_t i = 0; i + 1 < pair.parse->labels.size(); ++i) {
        known = known && labels.find(pair.parse->labels[i]) >= 0;
      }
      if (!known) {
        log << "warning: " << split << " line " << pair.line
            << ": parse uses a label unseen in training, pair skipped\n";
        ++out.skipped;
        continue;
      }
      const data::DepTree tree = data::to_dep_tree(*pair.parse, labels);
      if (!data::is_projective(tree)) {
        log << "warning: " << split << " line " << pair.line
            << ": non-projective parse, pair skipped\n";
        ++out.skipped;
        continue;
      }
      actions = data::tree_to_actions(tree);
    }
    out.source.push_back(src.encode(pair.source));
    out.target.push_back(tgt.encode(pair.target));
    if (pair.parse) out.actions.push_back(std::move(actions));
  }
  return out;
}

void write_split(const DataLayout& layout, const std::string& split,
                 const EncodedSplit& encoded, bool with_actions, const data::LabelSet& labels) {
  auto src = open_output(layout.ids(split, "src"));
  data::write_id_lines(src, encoded.source);
  auto tgt = open_output(layout.ids(split, "tgt"));
  data::write_id_lines(tgt, encoded.target);
  if (with_actions) {
    auto act = open_output(layout.actions(split));
    for (const auto& a : encoded.actions) data::write_action_line(act, a, labels);
  }
}

std::vector<data::SentencePair> load_split(const DataLayout& layout, const std::string& split,
                                           const data::LabelSet& labels, bool with_actions) {
  std::vector<data::SentencePair> pairs;
  const auto src_path = layout.ids(split, "src");
  if (!fs::exists(src_path)) return pairs;
  auto src_in = open_input(src_path);
  auto tgt_in = open_input(layout.ids(split, "tgt"));
  const auto src = data::read_id_lines(src_in);
  const auto tgt = data::read_id_lines(tgt_in);
  if (src.size() != tgt.size()) {
    throw ParseError(split + ": " + std::to_string(src.size()) + " source lines vs " +
                     std::to_string(tgt.size()) + " target lines");
  }
  std::vector<rnng::ActionSequence> actions;
  if (with_actions && fs::exists(layout.actions(split))) {
    auto in = open_input(layout.actions(split));
    actions = data::read_action_lines(in, labels);
    if (actions.size() != src.size()) {
      throw ParseError(split + ": action file has " + std::to_string(actions.size()) +
                       " lines for " + std::to_string(src.size()) + " pairs");
    }
  }
  for (std::size_t i = 0; i < src.size(); ++i) {
    pairs.push_back(data::SentencePair{src[i], tgt[i],
                                       actions.empty() ? rnng::ActionSequence{} : actions[i]});
  }
  return pairs;
}

std::string join(const data::Sentence& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kUsage;
  if (dynamic_cast<const NumericError*>(&e)) return kValidationFailure;
  return kDataError;
}

std::uint64_t vocabulary_hash(const DataLayout& layout) {
  std::uint64_t h = data::content_hash(read_bytes(layout.source_vocab()));
  h = data::content_hash(read_bytes(layout.target_vocab()), h);
  if (fs::exists(layout.labels())) h = data::content_hash(read_bytes(layout.labels()), h);
  return h;
}

PreprocessStats run_preprocess(const PreprocessOptions& o, std::ostream& log) {
  fs::create_directories(o.out_dir);
  const DataLayout layout{o.out_dir};
  PreprocessStats stats;

  const auto train_parses = read_parses(o.train_parse);
  auto raw = data::align_corpus(read_sentence_file(o.train_source),
                                read_sentence_file(o.train_target),
                                train_parses ? &*train_parses : nullptr);
  auto filtered = data::filter_corpus(std::move(raw), o.max_length);
  stats.dropped_empty = filtered.dropped_empty;
  stats.dropped_length = filtered.dropped_length;

  std::vector<data::Sentence> sources, targets;
  std::map<std::string, std::size_t> label_counts;
  for (const auto& p : filtered.kept) {
    sources.push_back(p.source);
    targets.push_back(p.target);
    if (p.parse) {
      for (std::size_t i = 0; i + 1 < p.parse->labels.size(); ++i) ++label_counts[p.parse->labels[i]];
    }
  }
  const auto src_vocab = data::Vocabulary::build(sources, o.source_min_frequency);
  const auto tgt_vocab = data::Vocabulary::build(targets, o.target_min_frequency);
  const auto labels = data::LabelSet::build({label_counts.begin(), label_counts.end()});
  {
    auto out = open_output(layout.source_vocab());
    src_vocab.save(out);
  }
  {
    auto out = open_output(layout.target_vocab());
    tgt_vocab.save(out);
  }
  if (train_parses) {
    auto out = open_output(layout.labels());
    labels.save(out);
  }

  const auto train = encode_split(filtered.kept, src_vocab, tgt_vocab, labels, "train", log);
  stats.skipped_nonprojective = train.skipped;
  write_split(layout, "train", train, train_parses.has_value(), labels);
  stats.train_pairs = train.source.size();

  if (!o.dev_source.empty()) {
    const auto dev_parses = read_parses(o.dev_parse);
    auto dev_raw = data::align_corpus(read_sentence_file(o.dev_source),
                                      read_sentence_file(o.dev_target),
                                      dev_parses ? &*dev_parses : nullptr);
    // The length limit applies to training only.
    auto dev_kept = data::filter_corpus(std::move(dev_raw), static_cast<std::size_t>(-1));
    const auto dev = encode_split(dev_kept.kept, src_vocab, tgt_vocab, labels, "dev", log);
    stats.dev_skipped = dev.skipped + dev_kept.dropped_empty;
    write_split(layout, "dev", dev, dev_parses.has_value(), labels);
    stats.dev_pairs = dev.source.size();
  }

  stats.source_vocab = src_vocab.size();
  stats.target_vocab = tgt_vocab.size();
  stats.labels = labels.size();
  stats.action_vocab = train_parses ? rnng::action_count(labels.size()) : 0;

  auto out = open_output(layout.stats());
  out << "# train dev src_voc tgt_voc act_voc\n"
      << stats.train_pairs << ' ' << stats.dev_pairs << ' ' << stats.source_vocab << ' '
      << stats.target_vocab << ' ' << stats.action_vocab << '\n'
      << "train_pairs=" << stats.train_pairs << '\n'
      << "dev_pairs=" << stats.dev_pairs << '\n'
      << "source_vocab=" << stats.source_vocab << '\n'
      << "target_vocab=" << stats.target_vocab << '\n'
      << "action_vocab=" << stats.action_vocab << '\n'
      << "labels=" << stats.labels << '\n'
      << "dropped_empty=" << stats.dropped_empty << '\n'
      << "dropped_length=" << stats.dropped_length << '\n'
      << "skipped_nonprojective=" << stats.skipped_nonprojective << '\n'
      << "dev_skipped=" << stats.dev_skipped << '\n';
  log << "train_pairs=" << stats.train_pairs << " dev_pairs=" << stats.dev_pairs
      << " source_vocab=" << stats.source_vocab << " target_vocab=" << stats.target_vocab
      << " action_vocab=" << stats.action_vocab
      << " skipped_nonprojective=" << stats.skipped_nonprojective << '\n';
  return stats;
}

fs::path last_checkpoint_path(const fs::path& out_dir) { return out_dir / "last.ckpt"; }
fs::path best_checkpoint_path(const fs::path& out_dir) { return out_dir / "best.ckpt"; }

double run_train(const TrainOptions& o, std::ostream& log) {
  o.config.validate();
  const DataLayout layout{o.data_dir};
  const auto src_vocab = load_vocab(layout.source_vocab());
  const auto tgt_vocab = load_vocab(layout.target_vocab());
  const auto labels = load_labels(layout.labels());
  if (o.config.with_rnng && !fs::exists(layout.actions("train"))) {
    throw ConfigError("joint training needs parses; " + layout.actions("train").string() +
                      " is missing");
  }
  auto train_pairs = load_split(layout, "train", labels, o.config.with_rnng);
  auto dev_pairs = load_split(layout, "dev", labels, o.config.with_rnng);

  model::Model model(o.config.model_config(src_vocab.size(), tgt_vocab.size(), labels.size()));
  train::init_parameters(model, o.config.seed);
  train::Trainer trainer(model, o.config, std::move(train_pairs), std::move(dev_pairs));
  trainer.set_vocab_hash(vocabulary_hash(layout));

  fs::create_directories(o.out_dir);
  const auto last_path = last_checkpoint_path(o.out_dir);
  const auto best_path = best_checkpoint_path(o.out_dir);
  if (o.resume && fs::exists(last_path)) {
    trainer.resume(train::load_checkpoint(last_path), train::load_checkpoint(best_path));
    log << "resumed after epoch " << trainer.epoch() << '\n';
  }

  std::ofstream train_log(o.out_dir / "train.log", o.resume ? std::ios::app : std::ios::trunc);
  while (!trainer.finished()) {
    const auto record = trainer.run_epoch();
    const std::string line = record.log_line();
    log << line << '\n';
    train_log << line << '\n';
    train_log.flush();
    train::save_checkpoint(best_path, trainer.best());
    train::save_checkpoint(last_path, trainer.checkpoint());
  }
  return trainer.best().best_perplexity;
}

namespace {

struct DecodingSetup {
  std::unique_ptr<model::Model> model;
  data::Vocabulary source_vocab;
  data::Vocabulary target_vocab;
  data::LabelSet labels;
};

DecodingSetup load_for_decoding(const fs::path& checkpoint, const fs::path& data_dir,
                                bool translator_only) {
  const DataLayout layout{data_dir};
  const auto ckpt = train::load_checkpoint(checkpoint);
  const std::uint64_t hash = vocabulary_hash(layout);
  if (ckpt.vocab_hash != hash) {
    std::ostringstream msg;
    msg << "checkpoint " << checkpoint.string() << " was trained with vocabulary hash "
        << std::hex << ckpt.vocab_hash << " but the files in " << data_dir.string()
        << " hash to " << hash << "; decoding would map ids to the wrong tokens";
    throw VocabularyError(msg.str());
  }
  auto config = ckpt.model;
  if (translator_only) config.with_rnng = false;
  DecodingSetup setup{std::make_unique<model::Model>(config), load_vocab(layout.source_vocab()),
                      load_vocab(layout.target_vocab()), load_labels(layout.labels())};
  train::restore_parameters(*setup.model, ckpt, translator_only);
  return setup;
}

}  // namespace

void run_translate(const TranslateOptions& o, std::ostream& log) {
  const auto setup = load_for_decoding(o.checkpoint, o.data_dir, o.translator_only);
  const auto& model = *setup.model;
  const auto& src_vocab = setup.source_vocab;
  const auto& tgt_vocab = setup.target_vocab;
  const auto& labels = setup.labels;
  if (o.joint && !model.has_parser()) throw ConfigError("joint decoding needs the parser slots");
  const auto inputs = read_sentence_file(o.input);

  auto out = open_output(o.output);
  std::optional<std::ofstream> parse_out;
  if (o.joint) {
    if (o.parse_output.empty()) throw ConfigError("joint decoding needs a parse output path");
    parse_out = open_output(o.parse_output);
  }
  std::size_t unfinished = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto source = src_vocab.encode(inputs[i]);
    if (o.joint) {
      const auto result = decode::translate_and_parse_greedy(model, source);
      const auto words = tgt_vocab.decode(result.ids);
      out << join(words) << '\n';
      if (result.tree) {
        data::write_conll(*parse_out, *result.tree, words, labels);
      } else {
        ++unfinished;
        // Budget ran out: keep the files aligned with a flat placeholder.
        for (std::size_t k = 0; k < words.size(); ++k) {
          *parse_out << (k + 1) << '\t' << words[k] << "\t0\t_\n";
        }
        *parse_out << '\n';
      }
    } else {
      decode::BeamOptions beam{o.beam, o.max_length, o.length_normalize};
      const auto result = decode::translate_beam(model, source, beam);
      if (!result.finished) ++unfinished;
      out << join(tgt_vocab.decode(result.ids)) << '\n';
    }
  }
  if (unfinished) {
    log << "warning: " << unfinished << " of " << inputs.size()
        << " sentences hit the length or action budget\n";
  }
  log << "translated=" << inputs.size() << " unfinished=" << unfinished << '\n';
}

std::vector<SweepPoint> run_beam_sweep(const SweepOptions& o, std::ostream& log) {
  if (o.beams.empty()) throw ConfigError("sweep needs at least one beam width");
  const auto setup = load_for_decoding(o.checkpoint, o.data_dir, true);
  const auto inputs = read_sentence_file(o.input);
  const auto refs = read_sentence_file(o.reference);
  if (inputs.size() != refs.size()) {
    throw ParseError("input has " + std::to_string(inputs.size()) + " lines, reference has " +
                     std::to_string(refs.size()));
  }
  std::vector<std::vector<int>> sources;
  for (const auto& s : inputs) sources.push_back(setup.source_vocab.encode(s));
  std::vector<SweepPoint> points;
  for (std::size_t width : o.beams) {
    decode::BeamOptions beam{width, o.max_length, o.length_normalize};
    std::vector<data::Sentence> hyps;
    SweepPoint point;
    point.beam = width;
    for (const auto& src : sources) {
      const auto t = decode::translate_beam(*setup.model, src, beam);
      point.unfinished += !t.finished;
      hyps.push_back(setup.target_vocab.decode(t.ids));
    }
    point.bleu = eval::bleu(hyps, refs);
    point.ribes = eval::ribes(hyps, refs);
    log << "beam=" << width << std::setprecision(10) << " bleu=" << point.bleu
        << " ribes=" << point.ribes << " unfinished=" << point.unfinished << '\n';
    points.push_back(point);
  }
  return points;
}

std::string EvalReport::key_values() const {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "bleu=" << bleu << '\n' << "ribes=" << ribes << '\n';
  if (bleu_b) out << "bleu_b=" << *bleu_b << '\n';
  if (ribes_b) out << "ribes_b=" << *ribes_b << '\n';
  if (p_bleu) out << "p_bleu=" << *p_bleu << '\n';
  if (p_ribes) out << "p_ribes=" << *p_ribes << '\n';
  return out.str();
}

EvalReport run_eval(const EvalOptions& o, std::ostream& log) {
  const auto hyp = read_sentence_file(o.hypothesis);
  const auto ref = read_sentence_file(o.reference);
  if (hyp.size() != ref.size()) {
    throw ParseError("hypothesis has " + std::to_string(hyp.size()) + " lines, reference has " +
                     std::to_string(ref.size()));
  }
  EvalReport report;
  report.bleu = eval::bleu(hyp, ref);
  report.ribes = eval::ribes(hyp, ref);
  log << std::fixed << std::setprecision(2) << "BLEU  " << report.bleu << "\nRIBES "
      << report.ribes << '\n';
  if (!o.hypothesis_b.empty()) {
    const auto hyp_b = read_sentence_file(o.hypothesis_b);
    if (hyp_b.size() != ref.size()) {
      throw ParseError("second hypothesis has " + std::to_string(hyp_b.size()) +
                       " lines, reference has " + std::to_string(ref.size()));
    }
    const auto b = eval::bootstrap_significance(hyp, hyp_b, ref, eval::Metric::kBleu,
                                                o.resamples, o.seed);
    const auto r = eval::bootstrap_significance(hyp, hyp_b, ref, eval::Metric::kRibes,
                                                o.resamples, o.seed);
    report.bleu_b = b.score_b;
    report.ribes_b = r.score_b;
    report.p_bleu = b.p_value;
    report.p_ribes = r.p_value;
    log << "BLEU  (B) " << b.score_b << "  p=" << std::setprecision(4) << b.p_value
        << (b.significant() ? " *" : "") << '\n'
        << std::setprecision(2) << "RIBES (B) " << r.score_b << "  p=" << std::setprecision(4)
        << r.p_value << (r.significant() ? " *" : "") << '\n';
  }
  log.unsetf(std::ios::floatfield);
  return report;
}

GradcheckReport run_gradcheck(const GradcheckOptions& o, std::ostream& log) {
  const ToyData toy = make_toy_data(2, o.max_length, o.vocab, o.vocab, o.labels, o.seed);
  model::Model model(toy_model_config(toy, o.dim));
  std::mt19937_64 rng(o.seed);
  train::randomize_parameters(model.parameters(), rng, 0.5);

  const auto finish = [&](core::Graph& g, core::Expr e) {
    return o.transform ? o.transform(g, e) : e;
  };
  const auto joint = [&](bool words, bool actions) {
    return [&, words, actions](core::Graph& g) {
      std::vector<core::Expr> terms;
      for (const auto& p : toy.pairs) {
        rnng::JointLossOptions opts;
        opts.include_word_loss = words;
        opts.include_action_loss = actions;
        terms.push_back(rnng::joint_nll(g, model, p.source, p.target, p.actions, opts).total);
      }
      return finish(g, core::sum(terms));
    };
  };
  const std::vector<std::pair<std::string, core::LossBuilder>> losses{
      {"joint", joint(true, true)},
      {"words", joint(true, false)},
      {"actions", joint(false, true)},
      {"translation",
       [&](core::Graph& g) {
         std::vector<core::Expr> terms;
         for (const auto& p : toy.pairs) {
           terms.push_back(rnng::translation_nll(g, model, p.source, p.target));
         }
         return finish(g, core::sum(terms));
       }},
  };

  GradcheckReport report;
  for (const auto& [name, build] : losses) {
    const auto r = core::grad_check(model.parameters(), build, o.epsilon);
    report.entries.push_back(
        GradcheckEntry{name, r.max_relative_error, r.worst_slot, r.checked_scalars});
    log << "loss=" << name << " max_relative_error=" << r.max_relative_error
        << " worst_slot=" << r.worst_slot << " scalars=" << r.checked_scalars << '\n';
    if (r.max_relative_error >= report.max_relative_error) {
      report.max_relative_error = r.max_relative_error;
      report.worst_slot = r.worst_slot;
    }
  }
  model.parameters().zero_grad();
  report.passed = report.max_relative_error < o.threshold;
  log << "max_relative_error=" << report.max_relative_error
      << " worst_slot=" << report.worst_slot << " threshold=" << o.threshold
      << " result=" << (report.passed ? "pass" : "fail") << '\n';
  return report;
}

}  // namespace nmtrnng::cli
