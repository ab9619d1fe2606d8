#include "lexfa/config.hpp"

#include "lexfa/error.hpp"

namespace lexfa {

void PipelineConfig::validate() {
  if (min_variance && top_k_variance) throw ConfigError("set only one of min-variance and top-k-variance");
  if (!min_variance && !top_k_variance) min_variance = 0.01;
  if (min_variance && !(*min_variance >= 0.0 && *min_variance < 0.25))
    throw ConfigError("min-variance must lie in [0, 0.25)");
  if (top_k_variance && *top_k_variance == 0) throw ConfigError("top-k-variance must be >= 1");
  if (!(threshold >= 0.0)) throw ConfigError("threshold must be >= 0");
  if (retain < 1) throw ConfigError("retain must be >= 1");
  if (factors.kind == FactorMethod::Kind::fixed && factors.k < 1) throw ConfigError("fixed factor count must be >= 1");
  if (!(uls.tol > 0) || uls.max_iter < 1) throw ConfigError("uls-tol must be > 0 and uls-max-iter >= 1");
  if (!(varimax.tol > 0) || varimax.max_iter < 1)
    throw ConfigError("varimax-tol must be > 0 and varimax-max-iter >= 1");
  if (output.empty()) throw ConfigError("output directory must be set");
}

ReviewFormat PipelineConfig::effective_format() const {
  return reviews_format ? *reviews_format : infer_review_format(reviews);
}

}  // namespace lexfa
