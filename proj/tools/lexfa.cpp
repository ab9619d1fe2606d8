#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lexfa/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 1, kStage = 2, kIo = 3 };

struct Flags {
  std::string format;
  std::string factors = "kaiser";
  std::optional<double> min_variance;
  std::optional<std::size_t> top_k;
};

void add_config_options(CLI::App& app, lexfa::PipelineConfig& c, Flags& f) {
  app.add_option("--reviews", c.reviews, "Review file (JSONL or CSV)");
  app.add_option("--format", f.format, "Review format: jsonl or csv (default: by extension)");
  app.add_option("--lexicon", c.lexicon, "Lexical database directory (index/data/exc files)");
  app.add_option("--stopwords", c.stopwords, "Stopword file (default: built-in list)");
  app.add_option("--labels", c.labels, "JSON object mapping factor number to theme label");
  app.add_option("-o,--output", c.output, "Output directory")->capture_default_str();
  app.add_option("--min-variance", f.min_variance, "Drop terms with variance below this (default 0.01)");
  app.add_option("--top-k-variance", f.top_k, "Keep the K highest-variance terms");
  app.add_option("--factors", f.factors, "kaiser or fixed:N")->capture_default_str();
  app.add_option("--threshold", c.threshold, "Loading threshold")->capture_default_str();
  app.add_option("--retain", c.retain, "Factors kept after refinement")->capture_default_str();
  app.add_option("--uls-tol", c.uls.tol, "ULS communality tolerance")->capture_default_str();
  app.add_option("--uls-max-iter", c.uls.max_iter, "ULS iteration budget")->capture_default_str();
  app.add_option("--varimax-normalize", c.varimax.kaiser_normalize, "Kaiser row normalization")->capture_default_str();
  app.add_option("--varimax-tol", c.varimax.tol, "Varimax criterion tolerance")->capture_default_str();
  app.add_option("--varimax-max-iter", c.varimax.max_iter, "Varimax sweep budget")->capture_default_str();
  app.add_option("--exemplars", c.exemplar_limit, "Exemplar reviews per factor")->capture_default_str();
  app.add_flag("--dump-correlation", c.dump_correlation, "Write the correlation matrix");
  app.add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

void finish_config(lexfa::PipelineConfig& c, const Flags& f) {
  if (!f.format.empty()) c.reviews_format = lexfa::parse_review_format(f.format);
  c.factors = lexfa::FactorMethod::parse(f.factors);
  c.min_variance = f.min_variance;
  c.top_k_variance = f.top_k;
  c.validate();
}

int run_single(lexfa::Stage stage, lexfa::PipelineConfig& c) {
  lexfa::check_stage_inputs(stage, c);
  std::error_code ec;
  std::filesystem::create_directories(c.output, ec);
  if (ec) throw lexfa::IoError("cannot create output directory " + c.output.string());
  lexfa::RunLock lock(c.output);
  lexfa::run_stage(stage, c);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lexical factor analysis of review corpora"};
  app.set_version_flag("--version", std::string(lexfa::kToolVersion));
  app.set_config("--config", "", "Key-value config file; flags override it");
  app.require_subcommand(1);

  lexfa::PipelineConfig config;
  Flags flags;
  add_config_options(app, config, flags);

  auto* pipeline = app.add_subcommand("pipeline", "Run every stage in order");
  std::vector<std::pair<CLI::App*, lexfa::Stage>> stages;
  for (auto s : {lexfa::Stage::ingest, lexfa::Stage::dict, lexfa::Stage::matrix, lexfa::Stage::efa, lexfa::Stage::report}) {
    const std::string name(lexfa::stage_name(s));
    stages.emplace_back(app.add_subcommand(name, "Run the " + name + " stage only"), s);
  }
  auto* verify = app.add_subcommand("verify", "Check manifest counts against the artifacts");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (verify->parsed()) {
      const auto problems = lexfa::verify_run(config.output);
      for (const auto& p : problems) std::cerr << "mismatch: " << p << '\n';
      if (!problems.empty()) return kStage;
      std::cout << "ok: " << config.output.string() << '\n';
      return kOk;
    }
    finish_config(config, flags);
    if (pipeline->parsed()) {
      lexfa::run_pipeline(config);
      return kOk;
    }
    for (auto& [sub, stage] : stages)
      if (sub->parsed()) return run_single(stage, config);
  } catch (const lexfa::StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.io_failure() ? kIo : kStage;
  } catch (const lexfa::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const lexfa::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}
