#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lexfa/error.hpp"
#include "lexfa/matrix.hpp"

namespace lexfa {

namespace {

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DependencyError("required artifact missing: " + path.string());
  return in;
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace

void write_matrix_market(std::ostream& out, const DocTermMatrix& m) {
  out << "%%MatrixMarket matrix coordinate pattern general\n";
  out << m.n_docs() << ' ' << m.n_terms() << ' ' << m.nnz() << '\n';
  for (std::size_t d = 0; d < m.n_docs(); ++d)
    for (std::uint32_t t : m.row(d)) out << d + 1 << ' ' << t + 1 << '\n';
}

DocTermMatrix read_matrix_market(std::istream& mtx, std::istream& terms_in, std::istream& docs_in,
                                 std::string_view origin) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError(std::string(origin) + ":" + std::to_string(line_no) + ": " + what);
  };
  if (!std::getline(mtx, line)) throw ParseError(std::string(origin) + ": empty matrix file");
  ++line_no;
  {
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%MatrixMarket" || object != "matrix" || format != "coordinate")
      fail("not a Matrix Market coordinate matrix");
    if (field != "pattern" || symmetry != "general") fail("expected a 'pattern general' matrix, found '" + field + " " + symmetry + "'");
  }
  std::size_t rows = 0, cols = 0, nnz = 0;
  bool have_size = false;
  std::vector<DocTermMatrix::Row> data;
  std::size_t seen = 0;
  while (std::getline(mtx, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '%') continue;
    std::istringstream fields(line);
    if (!have_size) {
      if (!(fields >> rows >> cols >> nnz)) fail("bad size line");
      data.resize(rows);
      have_size = true;
      continue;
    }
    std::size_t i = 0, j = 0;
    if (!(fields >> i >> j)) fail("bad entry");
    std::string extra;
    if (fields >> extra) fail("unexpected value on pattern entry");
    if (i < 1 || i > rows || j < 1 || j > cols) fail("entry out of bounds");
    data[i - 1].push_back(static_cast<std::uint32_t>(j - 1));
    ++seen;
  }
  if (!have_size) fail("missing size line");
  if (seen != nnz) fail("declared " + std::to_string(nnz) + " entries, found " + std::to_string(seen));
  for (auto& r : data) {
    std::sort(r.begin(), r.end());
    if (std::adjacent_find(r.begin(), r.end()) != r.end()) fail("duplicate entry");
  }
  auto terms = read_lines(terms_in);
  auto docs = read_lines(docs_in);
  if (terms.size() != cols)
    throw ParseError(std::string(origin) + ": " + std::to_string(cols) + " columns but " + std::to_string(terms.size()) +
                     " terms in sidecar");
  if (docs.size() != rows)
    throw ParseError(std::string(origin) + ": " + std::to_string(rows) + " rows but " + std::to_string(docs.size()) +
                     " document ids in sidecar");
  return DocTermMatrix(std::move(docs), std::move(terms), std::move(data));
}

void save_matrix(const std::filesystem::path& stem, const DocTermMatrix& m) {
  const std::string base = stem.string();
  {
    std::ofstream out(base + ".mtx", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + base + ".mtx");
    write_matrix_market(out, m);
    if (!out) throw IoError("error writing " + base + ".mtx");
  }
  write_lines(base + ".terms", m.terms());
  write_lines(base + ".docs", m.doc_ids());
}

DocTermMatrix load_matrix(const std::filesystem::path& stem) {
  const std::string base = stem.string();
  auto mtx = open_input(base + ".mtx");
  auto terms = open_input(base + ".terms");
  auto docs = open_input(base + ".docs");
  return read_matrix_market(mtx, terms, docs, base + ".mtx");
}

}  // namespace lexfa
