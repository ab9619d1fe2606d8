// Acceptance criteria AC1-AC9. One PASS/FAIL line per criterion; exit status 1 if any fail.

#include <chrono>
#include <fstream>
#include <sstream>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>

#include "json.hpp"
#include "lexfa/efa.hpp"
#include "lexfa/kernels.hpp"
#include "lexfa/lexicon.hpp"
#include "lexfa/matrix.hpp"
#include "lexfa/parallel.hpp"
#include "lexfa/pipeline.hpp"
#include "testkit.hpp"

using namespace lexfa;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Writes a lexicon of `words` (all nouns) plus a planted corpus; returns the review file.
fs::path write_planted_inputs(const fs::path& dir, const testkit::PlantedModel& model,
                              const std::vector<std::string>& words, std::uint64_t seed) {
  testkit::LexiconSpec spec;
  spec.nouns = words;
  testkit::write_lexicon(dir / "lexicon", spec);
  const auto rows = testkit::sample_planted(model, seed);
  const auto reviews = testkit::rows_to_reviews(rows, words, seed + 1);
  std::ofstream out(dir / "reviews.jsonl", std::ios::binary);
  write_reviews_jsonl(out, reviews);
  return dir / "reviews.jsonl";
}

Outcome ac1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.2, 0.9);
  double worst = 0;
  int failures = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd a(6);
    for (auto& x : a) x = u(rng);
    const CorrelationMatrix c(testkit::one_factor_sample_correlation(a, 200, rng));
    const auto model = extract_uls(c, 1);
    const double got = uls_objective(c.values(), model.loadings);
    const double oracle = testkit::grid_search_uls(c.values(), 1e-3);
    const double diff = std::abs(got - oracle);
    worst = std::max(worst, diff);
    if (diff > 1e-4) ++failures;
  }
  const double elapsed = seconds_since(t0);
  return {failures == 0 && elapsed < 10.0,
          fmt("20 matrices, max |objective - grid| = %.2e (tol 1e-4), %d over; %.2f s (limit 10 s)", worst, failures,
              elapsed)};
}

Outcome ac2() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.45, 0.9);
  int failures = 0;
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(12, 3);
    // Four indicators per factor; column scales keep the column norms distinct.
    const double scale[3] = {1.0, 0.9, 0.8};
    for (Eigen::Index i = 0; i < 12; ++i) lambda(i, i % 3) = u(rng) * scale[i % 3];
    Eigen::MatrixXd c = lambda * lambda.transpose();
    c.diagonal().setOnes();
    const std::vector<double> spectrum(3, 2.0);
    const std::size_t k = select_factor_count(spectrum, FactorMethod::fixed(3));
    auto model = extract_uls(CorrelationMatrix(c), k);
    rotate_model(model);
    const double err = testkit::match_up_to_permutation(lambda, model.rotated);
    worst = std::max(worst, err);
    if (err > 1e-3 || !model.converged) ++failures;
  }
  return {failures == 0, fmt("100 instances (p=12, k=3), max error %.2e (tol 1e-3), %d failures", worst, failures)};
}

Outcome ac3() {
  testkit::TempDir dir("lexfa-ac3");
  testkit::PlantedModel model;
  model.n_docs = 5000;
  model.prevalence = 0.3;
  model.loadings = {{0.85, 0.8, 0.75, 0.7, 0.65, 0.6},
                    {0.8, 0.75, 0.7, 0.65, 0.6, 0.55},
                    {0.9, 0.8, 0.7, 0.6, 0.55, 0.5}};
  model.background_terms = 12;
  model.background_rate = 0.1;
  const auto words = testkit::pseudo_words(model.n_terms(), 303);
  PipelineConfig config;
  config.reviews = write_planted_inputs(dir.path(), model, words, 303);
  config.lexicon = dir / "lexicon";
  config.output = dir / "out";
  config.factors = FactorMethod::fixed(3);
  run_pipeline(config);

  const auto fitted = model_from_json(testkit::slurp(dir / "out" / "model.json"));
  std::map<std::string, Eigen::Index> row;
  for (std::size_t i = 0; i < fitted.variables.size(); ++i) row[fitted.variables[i]] = static_cast<Eigen::Index>(i);

  // Planted loading matrix in the fitted variable order.
  Eigen::MatrixXd planted = Eigen::MatrixXd::Zero(fitted.rotated.rows(), 3);
  std::size_t term = 0;
  for (std::size_t f = 0; f < 3; ++f)
    for (double a : model.loadings[f]) planted(row.at(words[term++]), static_cast<Eigen::Index>(f)) = a;
  const double err = testkit::match_up_to_permutation(planted, fitted.rotated);

  // Each factor's top words are one planted vocabulary.
  const auto table = prune_loadings(fitted, 0.0);
  int vocab_ok = 0;
  term = 0;
  std::vector<std::set<std::string>> vocab(3);
  for (std::size_t f = 0; f < 3; ++f)
    for (std::size_t j = 0; j < model.loadings[f].size(); ++j) vocab[f].insert(words[term++]);
  std::set<std::size_t> matched;
  for (const auto& factor : table.factors) {
    std::set<std::string> top;
    for (std::size_t j = 0; j < 6 && j < factor.entries.size(); ++j) top.insert(factor.entries[j].term);
    for (std::size_t f = 0; f < 3; ++f)
      if (top == vocab[f] && matched.insert(f).second) ++vocab_ok;
  }
  return {err <= 0.1 && vocab_ok == 3,
          fmt("5000 docs, max |rotated - planted| = %.3f (tol 0.1), planted vocabularies on top: %d/3", err, vocab_ok)};
}

Outcome ac4() {
  std::mt19937_64 rng(404);
  int orth = 0, comm = 0, mono = 0;
  double worst_orth = 0, worst_comm = 0, worst_drop = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(rng() % 9);
    const Eigen::Index p = k + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(51 - k));
    Eigen::MatrixXd l(p, k);
    if (trial % 2 == 0) {
      std::uniform_real_distribution<double> u(-0.9, 0.9);
      for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < k; ++j) l(i, j) = u(rng);
    } else {
      std::uniform_real_distribution<double> u(0.3, 0.9);
      l.setZero();
      for (Eigen::Index i = 0; i < p; ++i) l(i, i % k) = u(rng);
      l = l * testkit::random_orthogonal(k, rng);
    }
    const bool normalize = trial % 3 != 0;
    const auto r = varimax_rotate(l, VarimaxOptions{normalize, 1e-10, 1000});
    const double o = (r.rotation.transpose() * r.rotation - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
    const double c = (r.rotated.rowwise().squaredNorm() - l.rowwise().squaredNorm()).cwiseAbs().maxCoeff();
    worst_orth = std::max(worst_orth, o);
    worst_comm = std::max(worst_comm, c);
    if (o > 1e-10) ++orth;
    if (c > 1e-10) ++comm;
    bool monotone = r.criterion_trace.back() >= r.criterion_trace.front();
    for (std::size_t s = 1; s < r.criterion_trace.size(); ++s) {
      const double drop = r.criterion_trace[s - 1] - r.criterion_trace[s];
      worst_drop = std::max(worst_drop, drop);
      if (drop > 0) monotone = false;
    }
    if (!monotone) ++mono;
  }
  return {orth == 0 && comm == 0 && mono == 0,
          fmt("1000 matrices: T'T=I violations %d (max %.1e), communality violations %d (max %.1e), non-monotone %d "
              "(largest drop %.1e)",
              orth, worst_orth, comm, worst_comm, mono, worst_drop)};
}

Outcome ac5() {
  std::mt19937_64 rng(505);
  int matrix_mismatch = 0, phi_fail = 0;
  double worst_phi = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n_docs = 2 + rng() % 99, n_terms = 2 + rng() % 99;
    const auto words = testkit::pseudo_words(n_terms, rng());
    testkit::TempDir dir("lexfa-ac5");
    testkit::LexiconSpec spec;
    spec.nouns = words;
    testkit::write_lexicon(dir.path(), spec);
    const auto lex = Lexicon::load(dir.path());
    const TermDictionary dict(words, std::vector<TermInfo>(n_terms));
    std::vector<double> rate(n_terms);
    for (auto& r : rate) r = std::uniform_real_distribution<double>(0.0, 0.6)(rng);
    std::vector<std::vector<std::uint32_t>> rows(n_docs);
    for (auto& row : rows)
      for (std::uint32_t t = 0; t < n_terms; ++t)
        if (std::bernoulli_distribution(rate[t])(rng)) row.push_back(t);
    const auto corpus = testkit::rows_to_reviews(rows, words, rng());
    const auto m = build_matrix(corpus, dict, lex, 4);

    Eigen::MatrixXd brute = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_docs), static_cast<Eigen::Index>(n_terms));
    for (std::size_t d = 0; d < n_docs; ++d)
      for (const auto& tok : tokenize(corpus[d].text))
        for (std::size_t t = 0; t < n_terms; ++t)
          if (lemmatize(tok.surface, PartOfSpeech::noun, lex) == words[t])
            brute(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t)) = 1;
    if (testkit::dense(m) != brute) ++matrix_mismatch;

    FilterResult usable;
    try {
      usable = filter_top_variance(m, n_terms);
    } catch (const EmptyMatrixError&) {
      continue;
    }
    if (usable.matrix.n_terms() < 2) continue;
    const auto phi = correlation_matrix(usable.matrix, 4).values();
    const double diff = (phi - testkit::textbook_correlation(testkit::dense(usable.matrix))).cwiseAbs().maxCoeff();
    worst_phi = std::max(worst_phi, diff);
    if (diff > 1e-12) ++phi_fail;
  }
  const auto hand = testkit::rows_to_matrix({{0, 1}, {0}, {}, {}}, {"a", "b"});
  const double r = correlation_matrix(hand)(0, 1);
  const std::string five = fmt("%.5f", r);
  return {matrix_mismatch == 0 && phi_fail == 0 && five == "0.57735",
          fmt("50 corpora: sparse/dense mismatches %d, phi max |diff| %.1e (tol 1e-12); [1,1,0,0]/[1,0,0,0] -> %s",
              matrix_mismatch, worst_phi, five.c_str())};
}

Outcome ac6() {
  testkit::TempDir dir("lexfa-ac6");
  testkit::PlantedModel model;
  model.n_docs = 6000;
  model.prevalence = 0.15;
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.5, 0.85);
  model.loadings.resize(36);
  for (auto& f : model.loadings) f = {u(rng), u(rng), u(rng), u(rng), u(rng)};
  model.background_terms = 120;
  model.background_rate = 0.03;
  const auto words = testkit::pseudo_words(model.n_terms(), 606);
  PipelineConfig config;
  config.reviews = write_planted_inputs(dir.path(), model, words, 606);
  config.lexicon = dir / "lexicon";
  config.output = dir / "out";
  config.top_k_variance = 200;
  config.factors = FactorMethod::fixed(32);
  config.threshold = 0.3;
  config.retain = 15;
  run_pipeline(config);

  const auto manifest = nlohmann::json::parse(testkit::slurp(dir / "out" / "manifest.json"));
  const auto& m = manifest["stages"]["matrix"];
  const auto& e = manifest["stages"]["efa"];
  const auto table = table_from_json(testkit::slurp(dir / "out" / "loading_table.json"));
  bool above = true;
  for (const auto& f : table.factors)
    for (const auto& w : f.entries) above = above && std::abs(w.loading) >= 0.3;
  const bool counts = m["terms"] == model.n_terms() && m["retained_terms"] == 200 && e["factors_extracted"] == 32 &&
                      e["factors_retained"] == 15 && e["loading_threshold"] == 0.3 && table.factors.size() == 15 &&
                      verify_run(config.output).empty();

  // Single-factor pruning fixture.
  FactorModel fixture;
  fixture.variables = {"suite", "ticket", "noise1", "noise2", "noise3"};
  fixture.rotated.resize(5, 1);
  fixture.rotated << 0.65, 0.41, 0.29, -0.12, 0.05;
  fixture.loadings = fixture.rotated;
  const auto pruned = prune_loadings(fixture, 0.3);
  const bool table1 = pruned.factors.size() == 1 &&
                      pruned.factors[0].entries == std::vector<LoadingEntry>{{"suite", 0.65}, {"ticket", 0.41}};
  return {counts && above && table1,
          fmt("terms %zu -> %zu retained, factors %d extracted -> %d retained, threshold %.1f, all listed |loading| >= "
              "0.3: %s; pruning fixture -> [suite, ticket]: %s",
              m["terms"].get<std::size_t>(), m["retained_terms"].get<std::size_t>(), e["factors_extracted"].get<int>(),
              e["factors_retained"].get<int>(), e["loading_threshold"].get<double>(), above ? "yes" : "no",
              table1 ? "yes" : "no")};
}

Outcome ac7() {
  testkit::TempDir dir("lexfa-ac7");
  const std::size_t n_docs = 55968, n_terms = 13522, k = 32;
  testkit::PlantedModel model;
  model.n_docs = n_docs;
  model.prevalence = 0.08;
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.45, 0.85);
  model.loadings.resize(k);
  for (auto& f : model.loadings)
    for (int j = 0; j < 10; ++j) f.push_back(u(rng));
  model.background_terms = n_terms - model.planted_terms();
  // Mean row length 1% of the vocabulary.
  model.background_rate =
      (0.01 * static_cast<double>(n_terms) - model.prevalence * static_cast<double>(model.planted_terms())) /
      static_cast<double>(model.background_terms);
  const auto words = testkit::pseudo_words(n_terms, 707);
  testkit::LexiconSpec spec;
  spec.nouns = words;
  testkit::write_lexicon(dir / "lexicon", spec);
  const auto corpus = testkit::rows_to_reviews(testkit::sample_planted(model, 707), words, 708);
  const auto lex = Lexicon::load(dir / "lexicon");
  const unsigned threads = default_thread_count();

  auto t0 = Clock::now();
  const auto dict = build_dictionary(corpus, lex, default_stopwords(), threads);
  const double t_dict = seconds_since(t0);
  t0 = Clock::now();
  const auto m = build_matrix(corpus, dict, lex, threads);
  const auto stats = column_stats(m);
  const double t_matrix = seconds_since(t0);
  const double density = static_cast<double>(m.nnz()) / (static_cast<double>(m.n_docs()) * static_cast<double>(m.n_terms()));

  t0 = Clock::now();
  const auto filtered = filter_top_variance(m, 586).matrix;
  const auto corr = correlation_matrix(filtered, threads);
  auto fitted = extract_uls(corr, k);
  rotate_model(fitted);
  const auto table = refine_factors(prune_loadings(fitted, 0.3), 15);
  const double t_efa = seconds_since(t0);

  return {t_matrix < 60.0 && t_efa < 300.0 && m.n_terms() == n_terms && filtered.n_terms() == 586,
          fmt("%zu docs x %zu terms, density %.4f, %zu nonzeros; matrix + column stats %.1f s (limit 60, dictionary "
              "%.1f s); EFA 586 cols k=32 %.1f s (limit 300, %d ULS iterations, %d varimax sweeps, %zu factors kept); "
              "%u thread(s), kernels %s",
              m.n_docs(), m.n_terms(), density, m.nnz(), t_matrix, t_dict, t_efa, fitted.iterations,
              fitted.rotation_sweeps, table.factors.size(), threads, std::string(kernels::isa_name(kernels::active().isa)).c_str())};
}

Outcome ac8() {
  const auto lex = Lexicon::load(testkit::data_dir() / "wordnet_mini");
  std::ifstream in(testkit::data_dir() / "lemmatizer_cases.tsv");
  std::string line, first_bad;
  std::getline(in, line);
  int cases = 0, mismatches = 0, exceptions = 0;
  while (std::getline(in, line)) {
    std::istringstream f(line);
    std::string form, pos, base;
    std::getline(f, form, '\t');
    std::getline(f, pos, '\t');
    std::getline(f, base, '\t');
    const auto p = parse_pos_name(pos);
    if (!lex.exception_bases(form, p).empty()) ++exceptions;
    const auto got = lemmatize(form, p, lex);
    if (got != base) {
      if (first_bad.empty()) first_bad = form + " -> " + got.value_or("none") + " (want " + base + ")";
      ++mismatches;
    }
    ++cases;
  }
  const bool corpora = lemmatize("corpora", PartOfSpeech::noun, lex) == "corpus";
  return {cases == 200 && mismatches == 0 && corpora,
          fmt("%d words (%d via exception files), %d mismatches%s%s", cases, exceptions, mismatches,
              first_bad.empty() ? "" : "; first: ", first_bad.c_str())};
}

Outcome ac9() {
  testkit::TempDir dir("lexfa-ac9");
  testkit::PlantedModel model;
  model.n_docs = 3000;
  model.prevalence = 0.2;
  model.loadings.assign(6, std::vector<double>{0.8, 0.7, 0.6, 0.5, 0.7});
  model.background_terms = 40;
  model.background_rate = 0.04;
  const auto words = testkit::pseudo_words(model.n_terms(), 909);
  const auto reviews = write_planted_inputs(dir.path(), model, words, 909);

  std::vector<fs::path> outputs;
  for (unsigned threads : {1u, 1u, 8u, 8u}) {
    PipelineConfig c;
    c.reviews = reviews;
    c.lexicon = dir / "lexicon";
    c.output = dir / ("out" + std::to_string(outputs.size()) + "-t" + std::to_string(threads));
    c.threads = threads;
    c.dump_correlation = true;
    run_pipeline(c);
    outputs.push_back(c.output);
  }
  std::size_t files = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(outputs[0])) {
    const auto name = entry.path().filename();
    if (name == artifacts::kLock) continue;
    ++files;
    const auto ref = testkit::slurp(entry.path());
    for (std::size_t i = 1; i < outputs.size(); ++i)
      if (!fs::exists(outputs[i] / name) || testkit::slurp(outputs[i] / name) != ref) ++differing;
  }
  for (std::size_t i = 1; i < outputs.size(); ++i)
    if (std::distance(fs::directory_iterator(outputs[i]), fs::directory_iterator()) !=
        std::distance(fs::directory_iterator(outputs[0]), fs::directory_iterator()))
      ++differing;
  return {differing == 0 && files >= 17,
          fmt("4 runs (threads 1, 1, 8, 8): %zu artifacts each, %zu differing", files, differing)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1 EFA oracle equivalence", ac1},  {"AC2 exact-model recovery", ac2}, {"AC3 sampled recovery", ac3},
      {"AC4 rotation invariants", ac4},     {"AC5 matrix correctness", ac5},   {"AC6 reference-parameter pipeline", ac6},
      {"AC7 scale check", ac7},             {"AC8 lemmatizer conformance", ac8}, {"AC9 determinism", ac9},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
