#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "lexfa/efa.hpp"
#include "lexfa/ingest.hpp"

namespace lexfa {

inline constexpr const char* kToolVersion = "1.0.0";

struct PipelineConfig {
  std::filesystem::path reviews;
  std::optional<ReviewFormat> reviews_format;  ///< inferred from the extension when unset
  std::filesystem::path lexicon;
  std::filesystem::path stopwords;  ///< empty: built-in list
  std::filesystem::path labels;     ///< empty: no theme labels
  std::filesystem::path output = "lexfa-out";

  std::optional<double> min_variance;         ///< 0.01 when neither filter is given
  std::optional<std::size_t> top_k_variance;

  FactorMethod factors = FactorMethod::kaiser();
  double threshold = 0.3;
  std::size_t retain = 15;
  UlsOptions uls;
  VarimaxOptions varimax;
  std::size_t exemplar_limit = 20;
  bool dump_correlation = false;

  /// Worker threads; 0 means one per hardware thread. Results do not depend on it.
  unsigned threads = 0;

  /// Scalar checks: exactly one variance filter, threshold >= 0, retain >= 1, positive
  /// tolerances and budgets. Fills in the default filter. ConfigError on violation.
  void validate();

  ReviewFormat effective_format() const;
};

}  // namespace lexfa
