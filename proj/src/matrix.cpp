#include "lexfa/matrix.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "lexfa/error.hpp"
#include "lexfa/parallel.hpp"

namespace lexfa {

DocTermMatrix::DocTermMatrix(std::vector<std::string> doc_ids, std::vector<std::string> terms, std::vector<Row> rows)
    : doc_ids_(std::move(doc_ids)), terms_(std::move(terms)), rows_(std::move(rows)) {
  if (doc_ids_.size() != rows_.size())
    throw ValidationError("matrix: " + std::to_string(rows_.size()) + " rows but " + std::to_string(doc_ids_.size()) +
                          " document ids");
  for (std::size_t d = 0; d < rows_.size(); ++d) {
    const Row& r = rows_[d];
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] >= terms_.size())
        throw ValidationError("matrix: row " + std::to_string(d) + " references column " + std::to_string(r[i]) +
                              " of " + std::to_string(terms_.size()));
      if (i > 0 && r[i] <= r[i - 1])
        throw ValidationError("matrix: row " + std::to_string(d) + " is not strictly increasing");
    }
    nnz_ += r.size();
  }
}

bool DocTermMatrix::cell(std::size_t doc, std::size_t term) const {
  const Row& r = rows_.at(doc);
  return std::binary_search(r.begin(), r.end(), static_cast<std::uint32_t>(term));
}

std::vector<std::size_t> DocTermMatrix::column_counts() const {
  std::vector<std::size_t> df(terms_.size(), 0);
  for (const Row& r : rows_)
    for (std::uint32_t t : r) ++df[t];
  return df;
}

DocTermMatrix::ColumnBits DocTermMatrix::column_bits() const {
  ColumnBits bits;
  bits.stride = (rows_.size() + 63) / 64;
  bits.words.assign(bits.stride * terms_.size(), 0);
  for (std::size_t d = 0; d < rows_.size(); ++d)
    for (std::uint32_t t : rows_[d]) bits.words[t * bits.stride + d / 64] |= std::uint64_t{1} << (d % 64);
  return bits;
}

DocTermMatrix build_matrix(std::span<const Review> corpus, const TermDictionary& dict, const Lexicon& lex,
                           unsigned threads) {
  if (dict.empty()) throw EmptyDictionaryError("cannot build a matrix from an empty dictionary");
  std::vector<DocTermMatrix::Row> rows(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t d = begin; d < end; ++d) {
      DocTermMatrix::Row row;
      for (const Token& token : tokenize(corpus[d].text)) {
        auto lemma = lemmatize_token(token.surface, lex);
        if (!lemma) continue;
        if (auto col = dict.index_of(lemma->text)) row.push_back(static_cast<std::uint32_t>(*col));
      }
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
      rows[d] = std::move(row);
    }
  });
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const Review& r : corpus) ids.push_back(r.id);
  return DocTermMatrix(std::move(ids), dict.terms(), std::move(rows));
}

std::vector<ColumnStats> column_stats(const DocTermMatrix& m) {
  if (m.n_docs() == 0) throw ValidationError("column statistics need at least one document");
  const auto df = m.column_counts();
  const double n = static_cast<double>(m.n_docs());
  std::vector<ColumnStats> stats(df.size());
  for (std::size_t t = 0; t < df.size(); ++t) {
    const double p = static_cast<double>(df[t]) / n;
    stats[t] = {df[t], p, p * (1.0 - p)};
  }
  return stats;
}

namespace {

FilterResult keep_columns(const DocTermMatrix& m, const std::vector<ColumnStats>& stats, std::vector<bool> keep) {
  FilterResult result;
  std::vector<std::int64_t> remap(m.n_terms(), -1);
  std::vector<std::string> terms;
  for (std::size_t t = 0; t < m.n_terms(); ++t) {
    result.decisions.push_back({m.terms()[t], stats[t], keep[t]});
    if (keep[t]) {
      remap[t] = static_cast<std::int64_t>(terms.size());
      terms.push_back(m.terms()[t]);
    }
  }
  if (terms.empty()) throw EmptyMatrixError("variance filter retained no columns");
  std::vector<DocTermMatrix::Row> rows(m.n_docs());
  for (std::size_t d = 0; d < m.n_docs(); ++d)
    for (std::uint32_t t : m.row(d))
      if (remap[t] >= 0) rows[d].push_back(static_cast<std::uint32_t>(remap[t]));
  result.matrix = DocTermMatrix(m.doc_ids(), std::move(terms), std::move(rows));
  return result;
}

}  // namespace

FilterResult filter_low_variance(const DocTermMatrix& m, double min_variance) {
  if (!(min_variance >= 0.0 && min_variance < 0.25))
    throw ValidationError("min_variance must lie in [0, 0.25), got " + std::to_string(min_variance));
  const auto stats = column_stats(m);
  std::vector<bool> keep(m.n_terms());
  for (std::size_t t = 0; t < keep.size(); ++t) keep[t] = stats[t].variance >= min_variance;
  return keep_columns(m, stats, std::move(keep));
}

FilterResult filter_top_variance(const DocTermMatrix& m, std::size_t k) {
  if (k == 0) throw EmptyMatrixError("top-k variance filter with k = 0 retains no columns");
  const auto stats = column_stats(m);
  std::vector<std::size_t> order(m.n_terms());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return stats[a].variance > stats[b].variance; });
  std::vector<bool> keep(m.n_terms(), false);
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i)
    if (stats[order[i]].variance > 0.0) keep[order[i]] = true;
  return keep_columns(m, stats, std::move(keep));
}

}  // namespace lexfa
