#include "nmtrnng/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::core {

namespace {

Graph& graph_of(Expr e) {
  if (!e.valid()) throw Error("operation on an empty expression");
  return *e.graph;
}

void same_graph(Expr a, Expr b) {
  if (a.graph != b.graph) throw Error("expressions belong to different graphs");
}

void require_vector(const Tensor& t, const char* op) {
  if (t.rank() != 1) {
    throw DimensionError(std::string(op) + " expects a vector, got " +
                         t.shape_string());
  }
}

void require_same(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         a.shape_string() + " vs " + b.shape_string());
  }
}

Tensor matvec_value(const Tensor& w, const Tensor& x, const char* op) {
  if (w.rank() != 2 || x.rank() != 1 || w.cols() != x.size()) {
    throw DimensionError(std::string(op) + ": cannot apply " +
                         w.shape_string() + " to " + x.shape_string());
  }
  const std::size_t rows = w.rows();
  const std::size_t cols = w.cols();
  Tensor out({rows});
  const double* wp = w.data();
  const double* xp = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* row = wp + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * xp[c];
    out[r] = acc;
  }
  return out;
}

// dW += g x^T, dx += W^T g
void matvec_backward(Graph& g, std::uint32_t wi, std::uint32_t xi,
                     const Tensor& gout) {
  const Tensor& w = g.value(wi);
  const Tensor& x = g.value(xi);
  const std::size_t rows = w.rows();
  const std::size_t cols = w.cols();
  Tensor& gw = g.grad(wi);
  for (std::size_t r = 0; r < rows; ++r) {
    const double gr = gout[r];
    if (gr == 0.0) continue;
    double* row = gw.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] += gr * x[c];
  }
  Tensor& gx = g.grad(xi);
  for (std::size_t r = 0; r < rows; ++r) {
    const double gr = gout[r];
    if (gr == 0.0) continue;
    const double* row = w.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) gx[c] += gr * row[c];
  }
}

double max_of(std::span<const double> v, std::span<const std::uint8_t> legal) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!legal.empty() && !legal[i]) continue;
    m = std::max(m, v[i]);
  }
  return m;
}

}  // namespace

Expr matvec(Expr w, Expr x) {
  same_graph(w, x);
  Graph& g = graph_of(w);
  Tensor out = matvec_value(w.value(), x.value(), "matvec");
  const auto wi = w.index, xi = x.index;
  return g.add_node(std::move(out), [wi, xi](Graph& g, std::uint32_t self) {
    matvec_backward(g, wi, xi, g.grad(self));
  });
}

Expr affine(Expr w, Expr x, Expr b) {
  same_graph(w, x);
  same_graph(w, b);
  Graph& g = graph_of(w);
  Tensor out = matvec_value(w.value(), x.value(), "affine");
  const Tensor& bias = b.value();
  if (bias.rank() != 1 || bias.size() != out.size()) {
    throw DimensionError("affine: bias " + bias.shape_string() +
                         " does not match output of " +
                         w.value().shape_string());
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bias[i];
  const auto wi = w.index, xi = x.index, bi = b.index;
  return g.add_node(std::move(out), [wi, xi, bi](Graph& g, std::uint32_t self) {
    const Tensor& gout = g.grad(self);
    matvec_backward(g, wi, xi, gout);
    Tensor& gb = g.grad(bi);
    for (std::size_t i = 0; i < gout.size(); ++i) gb[i] += gout[i];
  });
}

Expr add(Expr a, Expr b) {
  same_graph(a, b);
  require_same(a.value(), b.value(), "add");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  const auto ai = a.index, bi = b.index;
  return graph_of(a).add_node(std::move(out), [ai, bi](Graph& g, std::uint32_t self) {
    const Tensor& gout = g.grad(self);
    Tensor& ga = g.grad(ai);
    for (std::size_t i = 0; i < gout.size(); ++i) ga[i] += gout[i];
    Tensor& gb = g.grad(bi);
    for (std::size_t i = 0; i < gout.size(); ++i) gb[i] += gout[i];
  });
}

Expr cmult(Expr a, Expr b) {
  same_graph(a, b);
  require_same(a.value(), b.value(), "cmult");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  const auto ai = a.index, bi = b.index;
  return graph_of(a).add_node(std::move(out), [ai, bi](Graph& g, std::uint32_t self) {
    const Tensor& gout = g.grad(self);
    const Tensor& av = g.value(ai);
    const Tensor& bv = g.value(bi);
    Tensor& ga = g.grad(ai);
    for (std::size_t i = 0; i < gout.size(); ++i) ga[i] += gout[i] * bv[i];
    Tensor& gb = g.grad(bi);
    for (std::size_t i = 0; i < gout.size(); ++i) gb[i] += gout[i] * av[i];
  });
}

Expr scale(Expr x, double factor) {
  Tensor out = x.value();
  for (auto& v : out.values()) v *= factor;
  const auto xi = x.index;
  return graph_of(x).add_node(std::move(out), [xi, factor](Graph& g, std::uint32_t self) {
    const Tensor& gout = g.grad(self);
    Tensor& gx = g.grad(xi);
    for (std::size_t i = 0; i < gout.size(); ++i) gx[i] += factor * gout[i];
  });
}

Expr tanh(Expr x) {
  Tensor out = x.value();
  for (auto& v : out.values()) v = std::tanh(v);
  const auto xi = x.index;
  return graph_of(x).add_node(std::move(out), [xi](Graph& g, std::uint32_t self) {
    const Tensor& gout = g.grad(self);
    const Tensor& y = g.value(self);
    Tensor& gx = g.grad(xi);
    for (std::size_t i = 0; i < gout.size(); ++i) {
      gx[i] += gout[i] * (1.0 - y[i] * y[i]);
    }
  });
}

Expr sigmoid(Expr x) {
  Tensor out = x.value();
  for (auto& v : out.values()) v = 1.0 / (1.0 + std::exp(-v));
  const auto xi = x.index;
  return graph_of(x).add_node(std::move(out), [xi](Graph& g, std::uint32_t self) {
    const Tensor& gout = g.grad(self);
    const Tensor& y = g.value(self);
    Tensor& gx = g.grad(xi);
    for (std::size_t i = 0; i < gout.size(); ++i) {
      gx[i] += gout[i] * y[i] * (1.0 - y[i]);
    }
  });
}

Expr concat(std::span<const Expr> parts) {
  if (parts.empty()) throw DimensionError("concat of zero parts");
  std::vector<double> values;
  std::vector<std::uint32_t> ids;
  ids.reserve(parts.size());
  for (const Expr& p : parts) {
    same_graph(parts.front(), p);
    require_vector(p.value(), "concat");
    const auto v = p.value().values();
    values.insert(values.end(), v.begin(), v.end());
    ids.push_back(p.index);
  }
  return graph_of(parts.front())
      .add_node(Tensor::vector(std::move(values)),
                [ids = std::move(ids)](Graph& g, std::uint32_t self) {
                  const Tensor& gout = g.grad(self);
                  std::size_t offset = 0;
                  for (auto id : ids) {
                    Tensor& gp = g.grad(id);
                    for (std::size_t k = 0; k < gp.size(); ++k) {
                      gp[k] += gout[offset + k];
                    }
                    offset += gp.size();
                  }
                });
}

Expr concat(std::initializer_list<Expr> parts) {
  return concat(std::span<const Expr>(parts.begin(), parts.size()));
}

Expr slice(Expr x, std::size_t offset, std::size_t length) {
  const Tensor& xv = x.value();
  require_vector(xv, "slice");
  if (offset + length > xv.size()) {
    throw DimensionError("slice [" + std::to_string(offset) + ", " +
                         std::to_string(offset + length) + ") of " +
                         xv.shape_string());
  }
  std::vector<double> v(xv.data() + offset, xv.data() + offset + length);
  const auto xi = x.index;
  return graph_of(x).add_node(
      Tensor::vector(std::move(v)), [xi, offset](Graph& g, std::uint32_t self) {
        const Tensor& gout = g.grad(self);
        Tensor& gx = g.grad(xi);
        for (std::size_t k = 0; k < gout.size(); ++k) gx[offset + k] += gout[k];
      });
}

Expr dot(Expr a, Expr b) {
  same_graph(a, b);
  require_same(a.value(), b.value(), "dot");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
  const auto ai = a.index, bi = b.index;
  return graph_of(a).add_node(Tensor::vector({acc}), [ai, bi](Graph& g, std::uint32_t self) {
    const double gs = g.grad(self)[0];
    const Tensor& av = g.value(ai);
    const Tensor& bv = g.value(bi);
    Tensor& ga = g.grad(ai);
    for (std::size_t i = 0; i < av.size(); ++i) ga[i] += gs * bv[i];
    Tensor& gb = g.grad(bi);
    for (std::size_t i = 0; i < bv.size(); ++i) gb[i] += gs * av[i];
  });
}

Expr weighted_sum(std::span<const Expr> items, Expr weights) {
  const Tensor& w = weights.value();
  if (items.empty() || w.rank() != 1 || w.size() != items.size()) {
    throw DimensionError("weighted_sum: " + std::to_string(items.size()) +
                         " items with weights " + w.shape_string());
  }
  const Tensor& first = items.front().value();
  require_vector(first, "weighted_sum");
  Tensor out(first.shape());
  std::vector<std::uint32_t> ids;
  ids.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    same_graph(weights, items[i]);
    const Tensor& v = items[i].value();
    require_same(first, v, "weighted_sum");
    for (std::size_t k = 0; k < v.size(); ++k) out[k] += w[i] * v[k];
    ids.push_back(items[i].index);
  }
  const auto wi = weights.index;
  return graph_of(weights).add_node(
      std::move(out), [ids = std::move(ids), wi](Graph& g, std::uint32_t self) {
        const Tensor& gout = g.grad(self);
        const Tensor& w = g.value(wi);
        Tensor& gw = g.grad(wi);
        for (std::size_t i = 0; i < ids.size(); ++i) {
          const Tensor& v = g.value(ids[i]);
          double acc = 0.0;
          for (std::size_t k = 0; k < v.size(); ++k) acc += gout[k] * v[k];
          gw[i] += acc;
          Tensor& gv = g.grad(ids[i]);
          for (std::size_t k = 0; k < v.size(); ++k) gv[k] += w[i] * gout[k];
        }
      });
}

Expr softmax(Expr logits) {
  require_vector(logits.value(), "softmax");
  Tensor out = Tensor::vector(softmax(logits.value().values()));
  const auto xi = logits.index;
  return graph_of(logits).add_node(std::move(out), [xi](Graph& g, std::uint32_t self) {
    const Tensor& gout = g.grad(self);
    const Tensor& y = g.value(self);
    double inner = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) inner += gout[i] * y[i];
    Tensor& gx = g.grad(xi);
    for (std::size_t i = 0; i < y.size(); ++i) gx[i] += y[i] * (gout[i] - inner);
  });
}

Expr pick(Expr x, std::size_t index) {
  const Tensor& xv = x.value();
  if (index >= xv.size()) {
    throw DimensionError("pick index " + std::to_string(index) + " of " +
                         xv.shape_string());
  }
  const auto xi = x.index;
  return graph_of(x).add_node(Tensor::vector({xv[index]}),
                              [xi, index](Graph& g, std::uint32_t self) {
                                g.grad(xi)[index] += g.grad(self)[0];
                              });
}

Expr sum(std::span<const Expr> terms) {
  if (terms.empty()) throw DimensionError("sum of zero terms");
  Tensor out(terms.front().value().shape());
  std::vector<std::uint32_t> ids;
  ids.reserve(terms.size());
  for (const Expr& t : terms) {
    same_graph(terms.front(), t);
    require_same(out, t.value(), "sum");
    const Tensor& v = t.value();
    for (std::size_t k = 0; k < v.size(); ++k) out[k] += v[k];
    ids.push_back(t.index);
  }
  return graph_of(terms.front())
      .add_node(std::move(out), [ids = std::move(ids)](Graph& g, std::uint32_t self) {
        const Tensor& gout = g.grad(self);
        for (auto id : ids) {
          Tensor& gt = g.grad(id);
          for (std::size_t k = 0; k < gout.size(); ++k) gt[k] += gout[k];
        }
      });
}

Expr pick_neg_log_softmax(Expr logits, std::size_t index,
                          std::span<const std::uint8_t> legal) {
  const Tensor& x = logits.value();
  require_vector(x, "pick_neg_log_softmax");
  if (index >= x.size()) {
    throw DimensionError("pick_neg_log_softmax index " + std::to_string(index) +
                         " of " + x.shape_string());
  }
  if (!legal.empty()) {
    if (legal.size() != x.size()) {
      throw DimensionError("pick_neg_log_softmax: mask of length " +
                           std::to_string(legal.size()) + " for logits " +
                           x.shape_string());
    }
    if (!legal[index]) throw TransitionError("gold entry is masked out");
  }
  std::vector<std::uint8_t> mask(legal.begin(), legal.end());
  std::vector<double> probs = mask.empty() ? softmax(x.values())
                                           : masked_softmax(x.values(), mask);
  const double m = max_of(x.values(), mask);
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    z += std::exp(x[i] - m);
  }
  const double loss = m + std::log(z) - x[index];
  const auto xi = logits.index;
  return graph_of(logits).add_node(
      Tensor::vector({loss}),
      [xi, index, probs = std::move(probs)](Graph& g, std::uint32_t self) {
        const double gs = g.grad(self)[0];
        Tensor& gx = g.grad(xi);
        for (std::size_t i = 0; i < probs.size(); ++i) gx[i] += gs * probs[i];
        gx[index] -= gs;
      });
}

std::vector<double> softmax(std::span<const double> logits) {
  return masked_softmax(logits, {});
}

std::vector<double> masked_softmax(std::span<const double> logits,
                                   std::span<const std::uint8_t> legal) {
  if (logits.empty()) throw DimensionError("softmax of an empty vector");
  if (!legal.empty() && legal.size() != logits.size()) {
    throw DimensionError("softmax mask length mismatch");
  }
  const double m = max_of(logits, legal);
  if (!std::isfinite(m)) throw NumericError("softmax with no finite legal entry");
  std::vector<double> out(logits.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!legal.empty() && !legal[i]) continue;
    out[i] = std::exp(logits[i] - m);
    z += out[i];
  }
  for (auto& v : out) v /= z;
  return out;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  if (logits.empty()) throw DimensionError("log_softmax of an empty vector");
  const double m = max_of(logits, {});
  double z = 0.0;
  for (double v : logits) z += std::exp(v - m);
  const double lse = m + std::log(z);
  std::vector<double> out(logits.begin(), logits.end());
  for (auto& v : out) v -= lse;
  return out;
}

std::size_t argmax(std::span<const double> values,
                   std::span<const std::uint8_t> legal) {
  std::size_t best = values.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!legal.empty() && !legal[i]) continue;
    if (best == values.size() || values[i] > values[best]) best = i;
  }
  if (best == values.size()) throw Error("argmax over an empty candidate set");
  return best;
}

}  // namespace nmtrnng::core
