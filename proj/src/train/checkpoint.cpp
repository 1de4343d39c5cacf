#include "nmtrnng/train/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::train {

using nlohmann::json;

namespace {

constexpr const char* kMagic = "nmtrnng-checkpoint";

json model_to_json(const model::ModelConfig& m) {
  return json{{"source_vocab", m.source_vocab},
              {"target_vocab", m.target_vocab},
              {"num_labels", m.num_labels},
              {"word_dim", m.word_dim},
              {"action_dim", m.action_dim},
              {"hidden_dim", m.hidden_dim},
              {"with_rnng", m.with_rnng},
              {"tie_stack_embeddings", m.tie_stack_embeddings},
              {"without_buffer", m.ablation.without_buffer},
              {"without_action", m.ablation.without_action},
              {"without_stack", m.ablation.without_stack}};
}

model::ModelConfig model_from_json(const json& j) {
  model::ModelConfig m;
  m.source_vocab = j.at("source_vocab").get<std::size_t>();
  m.target_vocab = j.at("target_vocab").get<std::size_t>();
  m.num_labels = j.at("num_labels").get<std::size_t>();
  m.word_dim = j.at("word_dim").get<std::size_t>();
  m.action_dim = j.at("action_dim").get<std::size_t>();
  m.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  m.with_rnng = j.at("with_rnng").get<bool>();
  m.tie_stack_embeddings = j.at("tie_stack_embeddings").get<bool>();
  m.ablation.without_buffer = j.at("without_buffer").get<bool>();
  m.ablation.without_action = j.at("without_action").get<bool>();
  m.ablation.without_stack = j.at("without_stack").get<bool>();
  return m;
}

}  // namespace

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hex_double(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    throw ParseError("checkpoint: bad number '" + text + "'");
  }
  return v;
}

Checkpoint capture(const model::Model& model) {
  Checkpoint c;
  c.model = model.config();
  for (const auto& p : model.parameters()) c.tensors.push_back(NamedTensor{p.name, p.value});
  return c;
}

void restore_parameters(model::Model& model, const Checkpoint& checkpoint, bool allow_extra) {
  std::unordered_map<std::string, const NamedTensor*> by_name;
  for (const auto& t : checkpoint.tensors) by_name.emplace(t.name, &t);
  std::size_t used = 0;
  for (auto& p : model.parameters()) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) {
      throw ConfigError("checkpoint lacks parameter slot '" + p.name + "'");
    }
    if (it->second->value.shape() != p.value.shape()) {
      throw DimensionError("checkpoint slot '" + p.name + "' has shape " +
                           it->second->value.shape_string() + ", model expects " +
                           p.value.shape_string());
    }
    p.value = it->second->value;
    p.grad.fill(0.0);
    ++used;
  }
  if (!allow_extra && used != checkpoint.tensors.size()) {
    throw ConfigError("checkpoint holds " + std::to_string(checkpoint.tensors.size() - used) +
                      " slots the model does not have");
  }
}

void save_checkpoint(std::ostream& out, const Checkpoint& c) {
  json history = json::array();
  for (double v : c.perplexity_history) history.push_back(hex_double(v));
  json header{{"epoch", c.epoch},
              {"learning_rate", hex_double(c.learning_rate)},
              {"dev_perplexity", hex_double(c.dev_perplexity)},
              {"seed", c.seed},
              {"rng_state", c.rng_state},
              {"perplexity_history", history},
              {"best_epoch", c.best_epoch},
              {"best_perplexity", hex_double(c.best_perplexity)},
              {"vocab_hash", c.vocab_hash},
              {"model", model_to_json(c.model)}};
  out << kMagic << ' ' << kCheckpointVersion << '\n' << header.dump() << '\n';
  for (const auto& t : c.tensors) {
    out << "tensor " << t.name << ' ' << t.value.rank();
    for (auto d : t.value.shape()) out << ' ' << d;
    out << '\n';
    const auto values = t.value.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      out << (i ? " " : "") << hex_double(values[i]);
    }
    out << '\n';
  }
  out << "end\n";
  if (!out) throw Error("failed writing checkpoint");
}

Checkpoint load_checkpoint(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != kMagic) throw ParseError("not a checkpoint file");
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version));
  }
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  Checkpoint c;
  try {
    const json header = json::parse(line);
    c.epoch = header.at("epoch").get<std::size_t>();
    c.learning_rate = parse_hex_double(header.at("learning_rate").get<std::string>());
    c.dev_perplexity = parse_hex_double(header.at("dev_perplexity").get<std::string>());
    c.seed = header.at("seed").get<std::uint64_t>();
    c.rng_state = header.at("rng_state").get<std::string>();
    for (const auto& v : header.at("perplexity_history")) {
      c.perplexity_history.push_back(parse_hex_double(v.get<std::string>()));
    }
    c.best_epoch = header.at("best_epoch").get<std::size_t>();
    c.best_perplexity = parse_hex_double(header.at("best_perplexity").get<std::string>());
    c.vocab_hash = header.at("vocab_hash").get<std::uint64_t>();
    c.model = model_from_json(header.at("model"));
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint header: ") + e.what());
  }
  while (true) {
    std::string tag;
    if (!(in >> tag)) throw ParseError("checkpoint truncated");
    if (tag == "end") break;
    if (tag != "tensor") throw ParseError("checkpoint: unexpected '" + tag + "'");
    NamedTensor t;
    std::size_t rank = 0;
    in >> t.name >> rank;
    if (rank < 1 || rank > 2) throw ParseError("checkpoint: bad rank for " + t.name);
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) in >> d;
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    std::vector<double> values(n);
    std::string token;
    for (auto& v : values) {
      if (!(in >> token)) throw ParseError("checkpoint truncated in " + t.name);
      v = parse_hex_double(token);
    }
    t.value = core::Tensor(std::move(shape), std::move(values));
    c.tensors.push_back(std::move(t));
  }
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write " + tmp.string());
    save_checkpoint(out, checkpoint);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open checkpoint " + path.string());
  return load_checkpoint(in);
}

}  // namespace nmtrnng::train
