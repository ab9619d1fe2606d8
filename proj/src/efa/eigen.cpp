#include <charconv>
#include <cmath>

#include "lexfa/efa.hpp"
#include "lexfa/error.hpp"

namespace lexfa {

EigenDecomposition eigendecompose(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() != symmetric.cols()) throw ValidationError("eigendecomposition needs a square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  const Eigen::Index p = symmetric.rows();
  EigenDecomposition out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::Index arg = 0;
    out.vectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (out.vectors(arg, j) < 0) out.vectors.col(j) *= -1.0;
  }
  return out;
}

FactorMethod FactorMethod::parse(std::string_view text) {
  if (text == "kaiser") return kaiser();
  std::string_view digits;
  if (text.starts_with("fixed:")) {
    digits = text.substr(6);
  } else if (text.starts_with("fixed(") && text.ends_with(")")) {
    digits = text.substr(6, text.size() - 7);
  } else {
    throw ConfigError("factor method must be 'kaiser' or 'fixed:N', got '" + std::string(text) + "'");
  }
  std::size_t k = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || k == 0)
    throw ConfigError("fixed factor count must be a positive integer, got '" + std::string(digits) + "'");
  return fixed(k);
}

std::string FactorMethod::to_string() const {
  return kind == Kind::kaiser ? std::string("kaiser") : "fixed:" + std::to_string(k);
}

std::size_t select_factor_count(std::span<const double> eigenvalues_desc, FactorMethod method) {
  if (eigenvalues_desc.empty()) throw ValidationError("factor count selection needs a non-empty spectrum");
  if (method.kind == FactorMethod::Kind::fixed) return std::clamp<std::size_t>(method.k, 1, eigenvalues_desc.size());
  std::size_t above = 0;
  for (double v : eigenvalues_desc)
    if (v > 1.0) ++above;
  return std::max<std::size_t>(above, 1);
}

}  // namespace lexfa
