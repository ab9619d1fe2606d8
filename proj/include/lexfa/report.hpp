#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexfa/efa.hpp"
#include "lexfa/matrix.hpp"

namespace lexfa {

struct FactorReport {
  std::size_t factor = 0;
  std::string theme_label;  ///< analyst annotation; empty until labels are attached
  std::vector<LoadingEntry> top_words;
  std::vector<std::string> exemplar_review_ids;
  double coverage = 0;  ///< fraction of documents containing at least one factor word

  bool operator==(const FactorReport&) const = default;
};

/// Reviews containing factor words, ranked by number of distinct factor words present
/// (descending) then review id (ascending), truncated to `limit`. Every factor term must be
/// a column of `m` (ValidationError otherwise).
std::vector<std::string> exemplar_reviews(const FactorLoadings& factor, const DocTermMatrix& m, std::size_t limit);

/// Fraction of documents of `m` containing at least one factor word.
double factor_coverage(const FactorLoadings& factor, const DocTermMatrix& m);

/// One report per factor of the table, unlabeled.
std::vector<FactorReport> build_reports(const LoadingTable& table, const DocTermMatrix& m, std::size_t exemplar_limit);

/// Label file: JSON object mapping factor numbers (as strings) to label text.
std::map<std::size_t, std::string> parse_labels(std::string_view json_text, std::string_view origin = "<labels>");
std::map<std::size_t, std::string> load_labels(const std::filesystem::path& path);

/// ValidationError when a label names a factor absent from `reports`.
void attach_labels(std::vector<FactorReport>& reports, const std::map<std::size_t, std::string>& labels);

enum class ReportFormat { markdown, json, csv };

/// Two decimals, round half to even on the exact binary value.
std::string format_loading(double loading);

/// "suite (0.65), ticket (0.41)"
std::string loaded_words(const FactorReport& report);

std::string render_report(std::span<const FactorReport> reports, ReportFormat format);
std::vector<FactorReport> parse_report_json(std::string_view text);

/// Writes `render_report` to `path`; IoError when the path is not writable.
void emit_report(std::span<const FactorReport> reports, ReportFormat format, const std::filesystem::path& path);

}  // namespace lexfa
