#include <cmath>
#include <cstdint>
#include <ostream>

#include "lexfa/efa.hpp"
#include "lexfa/error.hpp"
#include "lexfa/kernels.hpp"
#include "lexfa/parallel.hpp"

namespace lexfa {

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
  if (values_.rows() != values_.cols()) throw ValidationError("correlation matrix is not square");
  const Eigen::Index p = values_.rows();
  if (names_.empty())
    for (Eigen::Index i = 0; i < p; ++i) names_.push_back("v" + std::to_string(i + 1));
  if (static_cast<Eigen::Index>(names_.size()) != p)
    throw ValidationError("correlation matrix: " + std::to_string(names_.size()) + " names for dimension " +
                          std::to_string(p));
  for (Eigen::Index i = 0; i < p; ++i) {
    if (values_(i, i) != 1.0) throw ValidationError("correlation matrix: diagonal entry is not 1");
    for (Eigen::Index j = 0; j < i; ++j) {
      const double a = values_(i, j), b = values_(j, i);
      if (!std::isfinite(a) || std::abs(a - b) > 1e-12) throw ValidationError("correlation matrix is not symmetric");
      if (std::abs(a) > 1.0 || std::abs(b) > 1.0) throw ValidationError("correlation matrix entry outside [-1, 1]");
    }
  }
}

CorrelationMatrix correlation_matrix(const DocTermMatrix& m, unsigned threads) {
  const std::size_t p = m.n_terms();
  const auto n = static_cast<std::int64_t>(m.n_docs());
  const auto df = m.column_counts();
  std::vector<std::int64_t> spread(p);
  for (std::size_t t = 0; t < p; ++t) {
    const auto n1 = static_cast<std::int64_t>(df[t]);
    if (n1 == 0 || n1 == n)
      throw DegenerateColumnError("column '" + m.terms()[t] + "' has zero variance (present in " +
                                  std::to_string(n1) + " of " + std::to_string(n) + " documents)");
    spread[t] = n1 * (n - n1);
  }

  const auto bits = m.column_bits();
  const auto& kernels = kernels::active();
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  parallel_for(p, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto ci = bits.column(i);
      for (std::size_t j = i + 1; j < p; ++j) {
        const auto both = static_cast<std::int64_t>(kernels.and_popcount(ci.data(), bits.column(j).data(), bits.stride));
        const std::int64_t num = n * both - static_cast<std::int64_t>(df[i]) * static_cast<std::int64_t>(df[j]);
        double value = static_cast<double>(num) / std::sqrt(static_cast<double>(spread[i]) * static_cast<double>(spread[j]));
        value = std::clamp(value, -1.0, 1.0);
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
        r(a, b) = value;
        r(b, a) = value;
      }
    }
  });
  return CorrelationMatrix(std::move(r), m.terms());
}

void write_correlation_market(std::ostream& out, const CorrelationMatrix& c) {
  out << "%%MatrixMarket matrix array real symmetric\n";
  out << c.dim() << ' ' << c.dim() << '\n';
  char buf[32];
  for (Eigen::Index j = 0; j < c.dim(); ++j)
    for (Eigen::Index i = j; i < c.dim(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", c(i, j));
      out << buf << '\n';
    }
}

}  // namespace lexfa
