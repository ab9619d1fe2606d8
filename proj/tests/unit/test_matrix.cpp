#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "lexfa/error.hpp"
#include "lexfa/lexicon.hpp"
#include "lexfa/matrix.hpp"
#include "testkit.hpp"

using namespace lexfa;

namespace {

const Lexicon& mini() {
  static const Lexicon lex = Lexicon::load(testkit::data_dir() / "wordnet_mini");
  return lex;
}

DocTermMatrix from_columns(const std::vector<std::vector<int>>& columns) {
  const std::size_t n = columns.at(0).size();
  std::vector<DocTermMatrix::Row> rows(n);
  std::vector<std::string> terms, ids;
  for (std::size_t t = 0; t < columns.size(); ++t) {
    terms.push_back("t" + std::to_string(t));
    for (std::size_t d = 0; d < n; ++d)
      if (columns[t][d]) rows[d].push_back(static_cast<std::uint32_t>(t));
  }
  for (std::size_t d = 0; d < n; ++d) ids.push_back("d" + std::to_string(d));
  return DocTermMatrix(ids, terms, rows);
}

}  // namespace

TEST_CASE("presence semantics with lemmatization") {
  TermDictionary dict({"chatbot", "ticket"}, {TermInfo{}, TermInfo{}});
  std::vector<Review> corpus = {{"a", "", "The chatbot, the CHATBOT."}, {"b", "", "Two tickets"}};
  testkit::TempDir dir;
  testkit::LexiconSpec spec;
  spec.nouns = {"chatbot", "ticket"};
  testkit::write_lexicon(dir.path(), spec);
  auto lex = Lexicon::load(dir.path());
  auto m = build_matrix(corpus, dict, lex);
  CHECK(m.rows() == std::vector<DocTermMatrix::Row>{{0}, {1}});
  CHECK(m.nnz() == 2);
  CHECK(m.cell(0, 0));
  CHECK_FALSE(m.cell(0, 1));
}

TEST_CASE("hand-counted 3x2 occurrence table") {
  TermDictionary dict({"room", "clean"}, {TermInfo{}, TermInfo{PartOfSpeech::adjective, 0}});
  std::vector<Review> corpus = {{"a", "", "Rooms were cleaner than the room next door"},
                                {"b", "", "nothing here"},
                                {"c", "", "cleanest ever"}};
  auto m = build_matrix(corpus, dict, mini());
  CHECK(testkit::dense(m) == (Eigen::MatrixXd(3, 2) << 1, 1, 0, 0, 0, 1).finished());
  CHECK(m.column_counts() == std::vector<std::size_t>{1, 2});
}

TEST_CASE("never-occurring term gives an all-zero column") {
  TermDictionary dict({"room", "zebra"}, {TermInfo{}, TermInfo{}});
  testkit::TempDir dir;
  testkit::LexiconSpec spec;
  spec.nouns = {"room", "zebra"};
  testkit::write_lexicon(dir.path(), spec);
  auto m = build_matrix(std::vector<Review>{{"a", "", "room"}, {"b", "", "rooms"}}, dict, Lexicon::load(dir.path()));
  CHECK(m.column_counts() == std::vector<std::size_t>{2, 0});
}

TEST_CASE("sparse construction equals a dense brute-force recount") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<std::size_t> size(1, 100);
    const std::size_t n_terms = size(rng), n_docs = size(rng);
    const auto words = testkit::pseudo_words(n_terms, rng());
    testkit::TempDir dir;
    testkit::LexiconSpec spec;
    spec.nouns = words;
    testkit::write_lexicon(dir.path(), spec);
    const auto lex = Lexicon::load(dir.path());
    std::vector<TermInfo> info(n_terms);
    const TermDictionary dict(words, info);

    std::bernoulli_distribution coin(0.1);
    std::vector<std::vector<std::uint32_t>> rows(n_docs);
    for (auto& r : rows)
      for (std::uint32_t t = 0; t < n_terms; ++t)
        if (coin(rng)) r.push_back(t);
    const auto corpus = testkit::rows_to_reviews(rows, words, rng());
    const auto m = build_matrix(corpus, dict, lex, 3);

    Eigen::MatrixXd brute = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_docs), static_cast<Eigen::Index>(n_terms));
    for (std::size_t d = 0; d < n_docs; ++d)
      for (const auto& tok : tokenize(corpus[d].text))
        for (std::size_t t = 0; t < n_terms; ++t)
          if (tok.surface == words[t]) brute(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t)) = 1;
    CHECK(testkit::dense(m) == brute);
    CHECK(build_matrix(corpus, dict, lex, 1) == m);
  }
}

TEST_CASE("column statistics") {
  auto m = from_columns({{0, 0, 0, 0}, {1, 1, 0, 0}, {1, 0, 0, 0}, {1, 1, 1, 1}});
  auto s = column_stats(m);
  CHECK(s[0].variance == 0);
  CHECK(s[1].p == 0.5);
  CHECK(s[1].variance == 0.25);
  CHECK(s[2].variance == 0.1875);
  CHECK(s[3].variance == 0);
  for (const auto& c : s) {
    CHECK(c.p >= 0);
    CHECK(c.p <= 1);
    CHECK(c.variance <= 0.25);
  }
  CHECK_THROWS_AS(column_stats(DocTermMatrix()), ValidationError);
}

TEST_CASE("low-variance filter") {
  // p = 1/200: variance 0.004975 is dropped at 0.01.
  std::vector<int> rare(200, 0), half(200, 0), tenth(200, 0), p0099(10000, 0);
  rare[0] = 1;
  for (int i = 0; i < 100; ++i) half[i] = 1;
  for (int i = 0; i < 20; ++i) tenth[i] = 1;
  auto m = from_columns({half, rare, tenth});
  auto r = filter_low_variance(m, 0.01);
  CHECK(r.matrix.terms() == std::vector<std::string>{"t0", "t2"});
  CHECK(r.decisions.size() == 3);
  CHECK_FALSE(r.decisions[1].retained);
  CHECK(r.decisions[1].stats.variance == doctest::Approx(0.004975));

  // variances {0.25, 0.0099, 0.09}
  std::vector<int> a(100, 0), b(100, 0), c(100, 0);
  for (int i = 0; i < 50; ++i) a[i] = 1;
  b[0] = 1;
  for (int i = 0; i < 10; ++i) c[i] = 1;
  auto fixture = from_columns({a, b, c});
  CHECK(column_stats(fixture)[1].variance == doctest::Approx(0.0099));
  CHECK(filter_low_variance(fixture, 0.01).matrix.terms() == std::vector<std::string>{"t0", "t2"});

  auto with_zero = from_columns({a, std::vector<int>(100, 0)});
  CHECK(filter_low_variance(with_zero, 0.0).matrix.n_terms() == 2);
  CHECK(filter_low_variance(fixture, 0.09).matrix.terms() == std::vector<std::string>{"t0", "t2"});
  CHECK_THROWS_AS(filter_low_variance(fixture, 0.25), ValidationError);
  CHECK_THROWS_AS(filter_low_variance(fixture, -0.1), ValidationError);
  CHECK_THROWS_AS(filter_low_variance(from_columns({b, c}), 0.24), EmptyMatrixError);
}

TEST_CASE("low-variance filter is idempotent and monotone") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::vector<std::uint32_t>> rows(80);
    std::vector<double> rate(40);
    for (auto& r : rate) r = std::uniform_real_distribution<double>(0, 0.5)(rng);
    for (auto& row : rows)
      for (std::uint32_t t = 0; t < 40; ++t)
        if (std::bernoulli_distribution(rate[t])(rng)) row.push_back(t);
    auto m = testkit::rows_to_matrix(rows, testkit::pseudo_words(40, 1));
    const double v = std::uniform_real_distribution<double>(0, 0.2)(rng);
    auto once = filter_low_variance(m, v).matrix;
    CHECK(filter_low_variance(once, v).matrix == once);
    std::size_t previous = m.n_terms();
    for (double t = 0; t < 0.25; t += 0.02) {
      std::size_t kept = 0;
      try {
        kept = filter_low_variance(m, t).matrix.n_terms();
      } catch (const EmptyMatrixError&) {
      }
      CHECK(kept <= previous);
      previous = kept;
    }
  }
}

TEST_CASE("top-variance filter") {
  std::vector<int> a(10, 0), b(10, 0), c(10, 0), z(10, 0);
  for (int i = 0; i < 5; ++i) a[i] = 1;
  b[0] = 1;
  for (int i = 0; i < 3; ++i) c[i] = 1;
  auto m = from_columns({b, z, c, a});
  CHECK(filter_top_variance(m, 2).matrix.terms() == std::vector<std::string>{"t2", "t3"});
  CHECK(filter_top_variance(m, 10).matrix.terms() == std::vector<std::string>{"t0", "t2", "t3"});
  CHECK_THROWS_AS(filter_top_variance(m, 0), EmptyMatrixError);
  auto ties = from_columns({a, a, a});
  CHECK(filter_top_variance(ties, 2).matrix.terms() == std::vector<std::string>{"t0", "t1"});
}

TEST_CASE("Matrix Market round trip") {
  auto m = from_columns({{1, 0, 1}, {0, 0, 0}, {1, 1, 0}});
  std::ostringstream out;
  write_matrix_market(out, m);
  CHECK(out.str() == "%%MatrixMarket matrix coordinate pattern general\n3 3 4\n1 1\n1 3\n2 3\n3 1\n");
  testkit::TempDir dir;
  save_matrix(dir / "m", m);
  CHECK(load_matrix(dir / "m") == m);
  CHECK_THROWS_AS(load_matrix(dir / "absent"), DependencyError);

  std::istringstream bad("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n3 1\n"), t("a\nb\n"), d("x\ny\n");
  CHECK_THROWS_AS(read_matrix_market(bad, t, d), ParseError);
  std::istringstream short_mtx("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 1\n"), t2("a\nb\n"),
      d2("x\ny\n");
  CHECK_THROWS_AS(read_matrix_market(short_mtx, t2, d2), ParseError);
}

TEST_CASE("matrix construction validates rows") {
  CHECK_THROWS_AS(DocTermMatrix({"d"}, {"a"}, {{1}}), ValidationError);
  CHECK_THROWS_AS(DocTermMatrix({"d"}, {"a", "b"}, {{1, 0}}), ValidationError);
  CHECK_THROWS_AS(DocTermMatrix({"d", "e"}, {"a"}, {{0}}), ValidationError);
}

TEST_CASE("column bitsets mirror the rows") {
  auto m = testkit::rows_to_matrix({{0, 2}, {}, {2}, {1, 2}}, {"a", "b", "c"});
  auto bits = m.column_bits();
  CHECK(bits.stride == 1);
  CHECK(bits.column(0)[0] == 0b0001);
  CHECK(bits.column(1)[0] == 0b1000);
  CHECK(bits.column(2)[0] == 0b1101);
}
