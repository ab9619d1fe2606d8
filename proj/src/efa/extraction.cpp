#include <algorithm>
#include <cmath>

#include "lexfa/efa.hpp"
#include "lexfa/error.hpp"

namespace lexfa {

namespace {

// Squared multiple correlations, or nullopt when C cannot be inverted reliably.
std::optional<Eigen::VectorXd> squared_multiple_correlations(const Eigen::MatrixXd& c) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::VectorXd inv_diag = lu.inverse().diagonal();
  Eigen::VectorXd smc(c.rows());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    if (!std::isfinite(inv_diag(i)) || inv_diag(i) < 1.0 - 1e-12) return std::nullopt;
    smc(i) = std::clamp(1.0 - 1.0 / inv_diag(i), 0.0, 1.0);
  }
  return smc;
}

Eigen::VectorXd max_abs_correlation(const Eigen::MatrixXd& c) {
  Eigen::VectorXd h(c.rows());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    double best = 0;
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      if (j != i) best = std::max(best, std::abs(c(i, j)));
    h(i) = best;
  }
  return h;
}

}  // namespace

std::size_t FactorModel::heywood_count() const {
  return static_cast<std::size_t>(std::count(heywood.begin(), heywood.end(), true));
}

double uls_objective(const Eigen::MatrixXd& correlation, const Eigen::MatrixXd& loadings) {
  const Eigen::MatrixXd residual = correlation - loadings * loadings.transpose();
  double total = 0;
  for (Eigen::Index j = 0; j < residual.cols(); ++j)
    for (Eigen::Index i = 0; i < residual.rows(); ++i)
      if (i != j) total += residual(i, j) * residual(i, j);
  return total;
}

FactorModel extract_uls(const CorrelationMatrix& c, std::size_t k, const UlsOptions& options) {
  const Eigen::Index p = c.dim();
  const auto kk = static_cast<Eigen::Index>(k);
  if (k < 1 || kk >= p)
    throw ValidationError("factor count must satisfy 1 <= k < p (k = " + std::to_string(k) + ", p = " +
                          std::to_string(p) + ")");
  if (!(options.tol > 0) || options.max_iter < 1) throw ValidationError("ULS tolerance and iteration budget must be positive");

  FactorModel model;
  model.variables = c.names();
  model.k = k;
  model.eigenvalues = eigendecompose(c.values()).values;

  Eigen::VectorXd h2;
  if (auto smc = squared_multiple_correlations(c.values())) {
    h2 = *smc;
  } else {
    h2 = max_abs_correlation(c.values());
    model.smc_fallback = true;
  }

  Eigen::MatrixXd reduced = c.values();
  Eigen::MatrixXd lambda(p, kk);
  std::vector<bool> clamped(static_cast<std::size_t>(p), false);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    reduced.diagonal() = h2;
    solver.compute(reduced);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed during ULS iteration");
    // Eigen orders eigenvalues ascending; the top k sit in the last columns.
    for (Eigen::Index f = 0; f < kk; ++f) {
      const Eigen::Index src = p - 1 - f;
      lambda.col(f) = solver.eigenvectors().col(src) * std::sqrt(std::max(solver.eigenvalues()(src), 0.0));
    }
    Eigen::VectorXd next = lambda.rowwise().squaredNorm();
    for (Eigen::Index i = 0; i < p; ++i) {
      clamped[static_cast<std::size_t>(i)] = next(i) > 1.0;
      if (next(i) > 1.0) next(i) = 1.0;
    }
    const double delta = (next - h2).cwiseAbs().maxCoeff();
    h2 = next;
    model.iterations = iter;
    if (delta < options.tol) {
      model.converged = true;
      break;
    }
  }

  for (Eigen::Index i = 0; i < p; ++i)
    if (clamped[static_cast<std::size_t>(i)]) lambda.row(i).normalize();
  for (Eigen::Index f = 0; f < kk; ++f) {
    Eigen::Index arg = 0;
    lambda.col(f).cwiseAbs().maxCoeff(&arg);
    if (lambda(arg, f) < 0) lambda.col(f) *= -1.0;
  }

  model.loadings = lambda;
  model.communalities = lambda.rowwise().squaredNorm();
  model.uniquenesses = Eigen::VectorXd::Ones(p) - model.communalities;
  model.heywood = std::move(clamped);
  model.rotation = Eigen::MatrixXd::Identity(kk, kk);
  model.rotated = lambda;
  return model;
}

}  // namespace lexfa
