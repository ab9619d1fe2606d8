#pragma once

// Exploratory factor analysis over a binary document-term matrix: phi correlations,
// spectrum, unweighted least squares extraction, varimax rotation and loading tables.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lexfa/matrix.hpp"

namespace lexfa {

/// Symmetric correlation matrix with unit diagonal and named variables.
class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;
  /// Throws ValidationError unless `values` is square, symmetric within 1e-12, has a unit
  /// diagonal and entries in [-1, 1]. Empty `names` become "v1", "v2", ...
  explicit CorrelationMatrix(Eigen::MatrixXd values, std::vector<std::string> names = {});

  Eigen::Index dim() const { return values_.rows(); }
  const Eigen::MatrixXd& values() const { return values_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> names_;
};

/// Pearson correlation of the binary columns (phi coefficient), computed from exact integer
/// co-occurrence counts: r = (n*n11 - n1*n2) / sqrt(n1 (n - n1) n2 (n - n2)).
/// Throws DegenerateColumnError when a column has zero variance. Parallel over column
/// pairs; every thread count gives the same bits.
CorrelationMatrix correlation_matrix(const DocTermMatrix& m, unsigned threads = 1);

/// "%%MatrixMarket matrix array real symmetric", lower triangle column by column.
void write_correlation_market(std::ostream& out, const CorrelationMatrix& c);

struct EigenDecomposition {
  Eigen::VectorXd values;   ///< descending
  Eigen::MatrixXd vectors;  ///< column i pairs with values[i]; largest-|entry| positive
};

/// Full symmetric eigendecomposition. NumericalError if the solver does not converge.
EigenDecomposition eigendecompose(const Eigen::MatrixXd& symmetric);

struct FactorMethod {
  enum class Kind { kaiser, fixed };
  Kind kind = Kind::kaiser;
  std::size_t k = 0;

  static FactorMethod kaiser() { return {Kind::kaiser, 0}; }
  static FactorMethod fixed(std::size_t k) { return {Kind::fixed, k}; }
  /// "kaiser", "fixed:N" or "fixed(N)". ConfigError otherwise.
  static FactorMethod parse(std::string_view text);
  std::string to_string() const;

  bool operator==(const FactorMethod&) const = default;
};

/// kaiser: number of eigenvalues > 1, at least 1. fixed(k): k clamped to [1, p].
std::size_t select_factor_count(std::span<const double> eigenvalues_desc, FactorMethod method);

struct UlsOptions {
  double tol = 1e-6;  ///< on max |change in communality|
  int max_iter = 1000;
};

struct FactorModel {
  std::vector<std::string> variables;
  std::size_t k = 0;
  Eigen::MatrixXd loadings;        ///< p x k, unrotated
  Eigen::VectorXd communalities;   ///< row sums of squared loadings
  Eigen::VectorXd uniquenesses;    ///< 1 - communalities
  Eigen::VectorXd eigenvalues;     ///< spectrum of the correlation matrix, descending
  Eigen::MatrixXd rotation;        ///< k x k orthogonal
  Eigen::MatrixXd rotated;         ///< loadings * rotation
  std::vector<bool> heywood;       ///< variables whose communality was clamped to 1
  bool smc_fallback = false;       ///< correlation matrix was singular at initialization
  int iterations = 0;
  bool converged = false;
  int rotation_sweeps = 0;
  bool rotation_converged = true;

  std::size_t p() const { return static_cast<std::size_t>(loadings.rows()); }
  std::size_t heywood_count() const;
};

/// Unweighted least squares (minres) extraction by iterated principal axes.
///
/// Communalities start at the squared multiple correlations 1 - 1/diag(C^-1) (or, for a
/// singular C, at each variable's largest absolute correlation). Each iteration puts the
/// communalities on the diagonal, takes the top-k eigenpairs with eigenvalues clipped at 0,
/// sets the loadings to V sqrt(D) and recomputes communalities, until the largest change is
/// below `tol`. Communalities above 1 are clamped (the loading row is rescaled to unit length)
/// and flagged. Columns are signed so their largest-|loading| entry is positive.
/// The returned model is unrotated (rotation = I). Requires 1 <= k < p.
FactorModel extract_uls(const CorrelationMatrix& c, std::size_t k, const UlsOptions& options = {});

/// Sum over i != j of (c_ij - (L L^T)_ij)^2.
double uls_objective(const Eigen::MatrixXd& correlation, const Eigen::MatrixXd& loadings);

struct VarimaxOptions {
  bool kaiser_normalize = true;
  double tol = 1e-10;  ///< on the per-sweep criterion gain
  int max_iter = 1000;  ///< sweeps
};

struct VarimaxResult {
  Eigen::MatrixXd rotated;
  Eigen::MatrixXd rotation;
  /// Criterion of the (row-normalized, when enabled) working matrix before the first sweep
  /// and after each accepted sweep. A sweep that would lower it is undone and ends the run.
  std::vector<double> criterion_trace;
  int sweeps = 0;
  bool converged = true;
};

/// sum over columns of [ sum_i l^4 / p - (sum_i l^2 / p)^2 ].
double varimax_criterion(const Eigen::MatrixXd& loadings);

/// Orthogonal varimax rotation by sweeps of pairwise planar rotations. Output columns are
/// signed so the largest-|loading| entry is positive and ordered by descending sum of squares;
/// `rotation` carries the same signs and order, so rotated == loadings * rotation.
/// For a single column the input is returned unchanged with rotation [1].
VarimaxResult varimax_rotate(const Eigen::MatrixXd& loadings, const VarimaxOptions& options = {});

/// Rotates `model` in place (fills rotation, rotated and the sweep record).
void rotate_model(FactorModel& model, const VarimaxOptions& options = {});

struct LoadingEntry {
  std::string term;
  double loading = 0;

  bool operator==(const LoadingEntry&) const = default;
};

struct FactorLoadings {
  std::size_t factor = 0;  ///< 1-based column number in the rotated model
  std::vector<LoadingEntry> entries;

  /// Largest |loading| retained, 0 when empty.
  double top() const;
  bool operator==(const FactorLoadings&) const = default;
};

struct LoadingTable {
  double threshold = 0;
  std::vector<FactorLoadings> factors;

  bool operator==(const LoadingTable&) const = default;
};

/// Per factor, the variables with |rotated loading| >= threshold, by |loading| descending
/// (ties by term). Requires threshold >= 0.
LoadingTable prune_loadings(const FactorModel& model, double threshold);

/// Keeps the `retain` factors with the largest top |loading| (ties by factor number);
/// survivors keep their numbers and original order. Requires retain >= 1.
LoadingTable refine_factors(const LoadingTable& table, std::size_t retain);

/// CSV `factor,term,loading,retained` for every rotated loading.
void write_loadings_csv(std::ostream& out, const FactorModel& model, double threshold);

std::string model_to_json(const FactorModel& model);
FactorModel model_from_json(std::string_view text);
std::string table_to_json(const LoadingTable& table);
LoadingTable table_from_json(std::string_view text);

}  // namespace lexfa
