#include <algorithm>
#include <cmath>
#include <numeric>

#include "lexfa/efa.hpp"
#include "lexfa/error.hpp"
#include "lexfa/kernels.hpp"

namespace lexfa {

double varimax_criterion(const Eigen::MatrixXd& loadings) {
  const double p = static_cast<double>(loadings.rows());
  if (loadings.rows() == 0) return 0;
  double total = 0;
  for (Eigen::Index f = 0; f < loadings.cols(); ++f) {
    const auto sq = loadings.col(f).array().square();
    const double mean_sq = sq.sum() / p;
    total += sq.square().sum() / p - mean_sq * mean_sq;
  }
  return total;
}

VarimaxResult varimax_rotate(const Eigen::MatrixXd& loadings, const VarimaxOptions& options) {
  const Eigen::Index p = loadings.rows(), k = loadings.cols();
  if (k < 1) throw ValidationError("varimax needs at least one factor");
  VarimaxResult out;
  if (k == 1) {
    out.rotated = loadings;
    out.rotation = Eigen::MatrixXd::Identity(1, 1);
    out.criterion_trace.push_back(varimax_criterion(loadings));
    return out;
  }

  Eigen::VectorXd scale = Eigen::VectorXd::Ones(p);
  if (options.kaiser_normalize) {
    for (Eigen::Index i = 0; i < p; ++i) {
      const double h = loadings.row(i).norm();
      if (h > 0) scale(i) = h;
    }
  }
  // Column-major working copies so every factor is a contiguous span for the kernels.
  Eigen::MatrixXd work = scale.cwiseInverse().asDiagonal() * loadings;
  Eigen::MatrixXd rotation = Eigen::MatrixXd::Identity(k, k);
  const auto& kern = kernels::active();
  const double n = static_cast<double>(p);
  const auto rows = static_cast<std::size_t>(p), dim = static_cast<std::size_t>(k);

  double criterion = varimax_criterion(work);
  out.criterion_trace.push_back(criterion);
  out.converged = false;
  Eigen::MatrixXd prev_work, prev_rotation;
  for (int sweep = 1; sweep <= options.max_iter; ++sweep) {
    prev_work = work;
    prev_rotation = rotation;
    for (Eigen::Index a = 0; a + 1 < k; ++a) {
      for (Eigen::Index b = a + 1; b < k; ++b) {
        const auto s = kern.varimax_pair_sums(work.col(a).data(), work.col(b).data(), rows);
        const double num = s.d - 2.0 * s.a * s.b / n;
        const double den = s.c - (s.a * s.a - s.b * s.b) / n;
        const double angle = 0.25 * std::atan2(num, den);
        if (angle == 0.0) continue;
        const double cs = std::cos(angle), sn = std::sin(angle);
        kern.rotate_pair(work.col(a).data(), work.col(b).data(), rows, cs, sn);
        kern.rotate_pair(rotation.col(a).data(), rotation.col(b).data(), dim, cs, sn);
      }
    }
    const double next = varimax_criterion(work);
    // A sweep that loses ground is rounding noise at the optimum: undo it and stop.
    if (next < criterion) {
      work = std::move(prev_work);
      rotation = std::move(prev_rotation);
      out.converged = true;
      break;
    }
    out.criterion_trace.push_back(next);
    out.sweeps = sweep;
    const double gain = next - criterion;
    criterion = next;
    if (gain < options.tol) {
      out.converged = true;
      break;
    }
  }

  Eigen::MatrixXd rotated = scale.asDiagonal() * work;
  for (Eigen::Index f = 0; f < k; ++f) {
    Eigen::Index arg = 0;
    rotated.col(f).cwiseAbs().maxCoeff(&arg);
    if (rotated(arg, f) < 0) {
      rotated.col(f) *= -1.0;
      rotation.col(f) *= -1.0;
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::VectorXd ss = rotated.colwise().squaredNorm().transpose();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return ss(x) > ss(y); });
  out.rotated.resize(p, k);
  out.rotation.resize(k, k);
  for (Eigen::Index f = 0; f < k; ++f) {
    out.rotated.col(f) = rotated.col(order[static_cast<std::size_t>(f)]);
    out.rotation.col(f) = rotation.col(order[static_cast<std::size_t>(f)]);
  }
  return out;
}

void rotate_model(FactorModel& model, const VarimaxOptions& options) {
  auto result = varimax_rotate(model.loadings, options);
  model.rotated = std::move(result.rotated);
  model.rotation = std::move(result.rotation);
  model.rotation_sweeps = result.sweeps;
  model.rotation_converged = result.converged;
}

}  // namespace lexfa
