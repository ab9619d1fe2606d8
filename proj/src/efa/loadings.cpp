#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "lexfa/efa.hpp"
#include "lexfa/error.hpp"

namespace lexfa {

double FactorLoadings::top() const {
  double best = 0;
  for (const auto& e : entries) best = std::max(best, std::abs(e.loading));
  return best;
}

LoadingTable prune_loadings(const FactorModel& model, double threshold) {
  if (!(threshold >= 0)) throw ValidationError("loading threshold must be >= 0");
  if (model.variables.size() != model.p()) throw ValidationError("factor model has no names for its variables");
  LoadingTable table;
  table.threshold = threshold;
  for (Eigen::Index f = 0; f < model.rotated.cols(); ++f) {
    FactorLoadings factor;
    factor.factor = static_cast<std::size_t>(f) + 1;
    for (Eigen::Index i = 0; i < model.rotated.rows(); ++i) {
      const double l = model.rotated(i, f);
      if (std::abs(l) >= threshold) factor.entries.push_back({model.variables[static_cast<std::size_t>(i)], l});
    }
    std::sort(factor.entries.begin(), factor.entries.end(), [](const LoadingEntry& a, const LoadingEntry& b) {
      const double x = std::abs(a.loading), y = std::abs(b.loading);
      if (x != y) return x > y;
      return a.term < b.term;
    });
    table.factors.push_back(std::move(factor));
  }
  return table;
}

LoadingTable refine_factors(const LoadingTable& table, std::size_t retain) {
  if (retain < 1) throw ValidationError("retain must be >= 1");
  std::vector<std::size_t> order(table.factors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ta = table.factors[a].top(), tb = table.factors[b].top();
    if (ta != tb) return ta > tb;
    return table.factors[a].factor < table.factors[b].factor;
  });
  order.resize(std::min(retain, order.size()));
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return table.factors[a].factor < table.factors[b].factor; });
  LoadingTable out;
  out.threshold = table.threshold;
  for (std::size_t i : order) out.factors.push_back(table.factors[i]);
  return out;
}

void write_loadings_csv(std::ostream& out, const FactorModel& model, double threshold) {
  out << "factor,term,loading,retained\n";
  char buf[40];
  for (Eigen::Index f = 0; f < model.rotated.cols(); ++f) {
    for (Eigen::Index i = 0; i < model.rotated.rows(); ++i) {
      const double l = model.rotated(i, f);
      std::snprintf(buf, sizeof buf, "%.17g", l);
      out << f + 1 << ',' << model.variables[static_cast<std::size_t>(i)] << ',' << buf << ','
          << (std::abs(l) >= threshold ? 1 : 0) << '\n';
    }
  }
}

}  // namespace lexfa
