#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lexfa/ingest.hpp"
#include "lexfa/lexicon.hpp"

namespace lexfa {

/// Sparse binary documents x terms matrix. Row d lists, in ascending order, the columns whose
/// term occurs in document d.
class DocTermMatrix {
 public:
  using Row = std::vector<std::uint32_t>;

  DocTermMatrix() = default;
  /// Throws ValidationError if a row is unsorted, repeats a column, indexes past the term
  /// list, or if the row count differs from the document id count.
  DocTermMatrix(std::vector<std::string> doc_ids, std::vector<std::string> terms, std::vector<Row> rows);

  std::size_t n_docs() const { return rows_.size(); }
  std::size_t n_terms() const { return terms_.size(); }
  std::size_t nnz() const { return nnz_; }

  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<Row>& rows() const { return rows_; }
  const Row& row(std::size_t d) const { return rows_[d]; }

  bool cell(std::size_t doc, std::size_t term) const;
  /// Per-column document frequency.
  std::vector<std::size_t> column_counts() const;

  /// Column-major bit layout: column t occupies words [t*stride, (t+1)*stride), bit d of the
  /// column set when cell(d, t) is 1.
  struct ColumnBits {
    std::size_t stride = 0;
    std::vector<std::uint64_t> words;
    std::span<const std::uint64_t> column(std::size_t t) const { return {words.data() + t * stride, stride}; }
  };
  ColumnBits column_bits() const;

  bool operator==(const DocTermMatrix&) const = default;

 private:
  std::vector<std::string> doc_ids_;
  std::vector<std::string> terms_;
  std::vector<Row> rows_;
  std::size_t nnz_ = 0;
};

/// Marks, for every review, the dictionary terms its lemmatized tokens produce. Repeated
/// occurrences still give a single 1. Rows follow corpus order, columns dictionary order.
DocTermMatrix build_matrix(std::span<const Review> corpus, const TermDictionary& dict, const Lexicon& lex,
                           unsigned threads = 1);

struct ColumnStats {
  std::size_t df = 0;
  double p = 0;         ///< df / n_docs
  double variance = 0;  ///< p (1 - p)
};

/// Requires n_docs >= 1 (ValidationError otherwise).
std::vector<ColumnStats> column_stats(const DocTermMatrix& m);

struct ColumnDecision {
  std::string term;
  ColumnStats stats;
  bool retained = false;
};

struct FilterResult {
  DocTermMatrix matrix;                  ///< retained columns in their original relative order
  std::vector<ColumnDecision> decisions;  ///< one entry per input column, input order
};

/// Keeps the columns whose variance is >= `min_variance`; requires 0 <= min_variance < 0.25.
/// Throws EmptyMatrixError when no column survives.
FilterResult filter_low_variance(const DocTermMatrix& m, double min_variance);

/// Keeps the `k` highest-variance columns (ties by column position), in original order.
/// Throws EmptyMatrixError when k == 0 or every candidate column has zero variance.
FilterResult filter_top_variance(const DocTermMatrix& m, std::size_t k);

/// Matrix Market "coordinate pattern general" export, 1-based indices, row-major order.
void write_matrix_market(std::ostream& out, const DocTermMatrix& m);

/// Reads a pattern matrix plus its term and document sidecars. ParseError on malformed
/// content or dimension disagreement with the sidecars.
DocTermMatrix read_matrix_market(std::istream& mtx, std::istream& terms, std::istream& docs,
                                 std::string_view origin = "<matrix>");

/// Writes <stem>.mtx, <stem>.terms and <stem>.docs (one entry per line).
void save_matrix(const std::filesystem::path& stem, const DocTermMatrix& m);
DocTermMatrix load_matrix(const std::filesystem::path& stem);

}  // namespace lexfa
