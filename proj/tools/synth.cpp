// Writes a synthetic lexicon and review corpus drawn from a planted factor model.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "lexfa/ingest.hpp"
#include "testkit.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic review corpus generator"};
  std::filesystem::path out;
  testkit::PlantedModel model;
  model.n_docs = 2000;
  std::size_t factors = 4, per_factor = 6;
  double loading = 0.7;
  std::uint64_t seed = 1;
  model.background_terms = 40;
  model.background_rate = 0.05;
  app.add_option("-o,--out", out, "Output directory")->required();
  app.add_option("--docs", model.n_docs, "Documents")->capture_default_str();
  app.add_option("--factors", factors, "Planted factors")->capture_default_str();
  app.add_option("--terms-per-factor", per_factor, "Terms per planted factor")->capture_default_str();
  app.add_option("--loading", loading, "Planted loading")->capture_default_str();
  app.add_option("--prevalence", model.prevalence, "Factor prevalence")->capture_default_str();
  app.add_option("--background", model.background_terms, "Independent background terms")->capture_default_str();
  app.add_option("--background-rate", model.background_rate, "Background term rate")->capture_default_str();
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  model.loadings.assign(factors, std::vector<double>(per_factor, loading));
  const auto words = testkit::pseudo_words(model.n_terms(), seed);
  testkit::LexiconSpec spec;
  spec.nouns = words;
  spec.adjectives = {"good", "bad"};
  spec.antonyms = {{0, 1}};
  std::filesystem::create_directories(out);
  testkit::write_lexicon(out / "lexicon", spec);

  const auto rows = testkit::sample_planted(model, seed);
  const auto reviews = testkit::rows_to_reviews(rows, words, seed + 1);
  std::ofstream jsonl(out / "reviews.jsonl", std::ios::binary);
  lexfa::write_reviews_jsonl(jsonl, reviews);
  std::ofstream csv(out / "reviews.csv", std::ios::binary);
  lexfa::write_reviews_csv(csv, reviews);
  std::cout << out.string() << ": " << reviews.size() << " reviews, " << words.size() << " terms\n";
  return 0;
}
