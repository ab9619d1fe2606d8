#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexfa/config.hpp"
#include "lexfa/error.hpp"

namespace lexfa {

enum class Stage { ingest, dict, matrix, efa, report };

std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

/// A stage failed; the message is prefixed with the stage name.
class StageError : public Error {
 public:
  StageError(Stage stage, const std::string& message, bool io_failure)
      : Error("stage '" + std::string(stage_name(stage)) + "': " + message), stage_(stage), io_(io_failure) {}
  Stage stage() const { return stage_; }
  bool io_failure() const { return io_; }

 private:
  Stage stage_;
  bool io_;
};

/// Artifact file names inside the output directory.
namespace artifacts {
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kCorpus = "corpus.jsonl";
inline constexpr const char* kDictionary = "dictionary.tsv";
inline constexpr const char* kMatrix = "matrix";  // .mtx/.terms/.docs
inline constexpr const char* kColumnStats = "column_stats.csv";
inline constexpr const char* kFiltered = "filtered";  // .mtx/.terms/.docs
inline constexpr const char* kVarianceFilter = "variance_filter.csv";
inline constexpr const char* kCorrelation = "correlation.mtx";
inline constexpr const char* kModel = "model.json";
inline constexpr const char* kLoadings = "loadings.csv";
inline constexpr const char* kLoadingTable = "loading_table.json";
inline constexpr const char* kReportMarkdown = "report.md";
inline constexpr const char* kReportJson = "report.json";
inline constexpr const char* kReportCsv = "report.csv";
inline constexpr const char* kLock = ".lexfa.lock";
}  // namespace artifacts

/// Advisory exclusive lock on <dir>/.lexfa.lock for the lifetime of the object.
/// IoError when another process holds it.
class RunLock {
 public:
  explicit RunLock(const std::filesystem::path& dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  int fd_ = -1;
};

/// ConfigError unless the inputs `stage` reads from outside the output directory exist.
void check_stage_inputs(Stage stage, const PipelineConfig& config);

/// Runs one stage, reading upstream artifacts from the output directory and updating the
/// manifest. Missing upstream artifacts raise a StageError naming the file. The caller holds
/// the run lock.
void run_stage(Stage stage, const PipelineConfig& config);

/// Validates the configuration and every input, takes the run lock, then runs all stages in
/// order. Equivalent, byte for byte, to running the stages one by one.
void run_pipeline(PipelineConfig config);

/// Compares manifest counts with the artifacts on disk (and input digests with the inputs).
/// Returns one line per discrepancy; empty when consistent.
std::vector<std::string> verify_run(const std::filesystem::path& output);

}  // namespace lexfa
