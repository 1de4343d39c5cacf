#include "nmtrnng/core/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::core {

namespace {

double evaluate(ParameterStore& store, const LossBuilder& build) {
  Graph g(static_cast<const ParameterStore&>(store));
  const double v = build(g).value()[0];
  if (!std::isfinite(v)) throw NumericError("gradient check: loss is not finite");
  return v;
}

}  // namespace

GradCheckReport grad_check(ParameterStore& store, const LossBuilder& build,
                           double epsilon, std::span<const ParamId> slots) {
  if (!(epsilon >= 1e-6 && epsilon <= 1e-3)) {
    throw ConfigError("gradient check epsilon must lie in [1e-6, 1e-3]");
  }
  GradCheckReport report;
  store.zero_grad();
  {
    Graph g(store);
    Expr loss = build(g);
    report.loss = loss.value()[0];
    if (!std::isfinite(report.loss)) {
      throw NumericError("gradient check: loss is not finite");
    }
    g.backward(loss);
  }

  std::vector<ParamId> ids(slots.begin(), slots.end());
  if (ids.empty()) {
    for (std::size_t i = 0; i < store.size(); ++i) ids.push_back(ParamId{i});
  }

  for (ParamId id : ids) {
    SlotError slot;
    slot.name = store[id].name;
    const std::size_t n = store[id].value.size();
    for (std::size_t k = 0; k < n; ++k) {
      double& theta = store[id].value[k];
      const double saved = theta;
      theta = saved + epsilon;
      const double plus = evaluate(store, build);
      theta = saved - epsilon;
      const double minus = evaluate(store, build);
      theta = saved;
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double analytic = store[id].grad[k];
      const double err =
          std::fabs(analytic - numeric) / std::max(1.0, std::fabs(analytic));
      if (err > slot.max_relative_error) {
        slot.max_relative_error = err;
        slot.worst_offset = k;
      }
    }
    report.checked_scalars += n;
    if (slot.max_relative_error > report.max_relative_error ||
        report.worst_slot.empty()) {
      report.max_relative_error = slot.max_relative_error;
      report.worst_slot = slot.name;
      report.worst_offset = slot.worst_offset;
    }
    report.slots.push_back(std::move(slot));
  }
  return report;
}

}  // namespace nmtrnng::core
