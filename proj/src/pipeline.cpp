#include "lexfa/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lexfa/digest.hpp"
#include "lexfa/efa.hpp"
#include "lexfa/lexicon.hpp"
#include "lexfa/matrix.hpp"
#include "lexfa/report.hpp"

namespace lexfa {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr Stage kStages[] = {Stage::ingest, Stage::dict, Stage::matrix, Stage::efa, Stage::report};

const std::vector<std::string>& lexicon_files() {
  static const std::vector<std::string> files{"index.noun", "data.noun", "noun.exc", "index.adj", "data.adj", "adj.exc"};
  return files;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DependencyError("required artifact missing: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <class Fn>
void write_file(const fs::path& path, Fn&& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

void require(const fs::path& path) {
  if (!fs::exists(path)) throw DependencyError("required artifact missing: " + path.string());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json config_snapshot(const PipelineConfig& c) {
  json j;
  j["reviews"] = c.reviews.string();
  j["format"] = c.effective_format() == ReviewFormat::jsonl ? "jsonl" : "csv";
  j["lexicon"] = c.lexicon.string();
  j["stopwords"] = c.stopwords.empty() ? json("builtin") : json(c.stopwords.string());
  j["labels"] = c.labels.empty() ? json(nullptr) : json(c.labels.string());
  if (c.min_variance) j["min_variance"] = *c.min_variance;
  if (c.top_k_variance) j["top_k_variance"] = *c.top_k_variance;
  j["factors"] = c.factors.to_string();
  j["threshold"] = c.threshold;
  j["retain"] = c.retain;
  j["uls_tol"] = c.uls.tol;
  j["uls_max_iter"] = c.uls.max_iter;
  j["varimax_normalize"] = c.varimax.kaiser_normalize;
  j["varimax_tol"] = c.varimax.tol;
  j["varimax_max_iter"] = c.varimax.max_iter;
  j["exemplar_limit"] = c.exemplar_limit;
  j["dump_correlation"] = c.dump_correlation;
  return j;
}

class Manifest {
 public:
  explicit Manifest(fs::path path) : path_(std::move(path)) {
    if (fs::exists(path_)) {
      try {
        data_ = json::parse(read_file(path_));
      } catch (const json::parse_error& e) {
        throw ParseError(path_.string() + ": malformed manifest (" + e.what() + ")");
      }
    }
    if (!data_.is_object()) data_ = json::object();
  }

  void reset() { data_ = json::object(); }

  void begin_stage(Stage stage, const PipelineConfig& config) {
    data_["tool"] = "lexfa";
    data_["version"] = kToolVersion;
    data_["config"] = config_snapshot(config);
    // A rerun invalidates everything downstream of it.
    bool downstream = false;
    for (Stage s : kStages) {
      if (s == stage) downstream = true;
      if (downstream && data_.contains("stages")) data_["stages"].erase(std::string(stage_name(s)));
    }
  }

  void input(const std::string& name, const fs::path& path, const std::string& digest) {
    data_["inputs"][name] = {{"path", path.string()}, {"sha256", digest}};
  }

  json& stage(Stage s) { return data_["stages"][std::string(stage_name(s))]; }

  void save() const {
    write_file(path_, [&](std::ostream& out) { out << data_.dump(2) << '\n'; });
  }

 private:
  fs::path path_;
  json data_;
};

StopwordSet stopwords_for(const PipelineConfig& c) {
  return c.stopwords.empty() ? default_stopwords() : load_stopwords(c.stopwords);
}

std::vector<Review> load_corpus(const fs::path& dir) {
  const fs::path path = dir / artifacts::kCorpus;
  require(path);
  return parse_reviews(read_file(path), ReviewFormat::jsonl, path.string());
}

TermDictionary load_dictionary(const fs::path& dir) {
  const fs::path path = dir / artifacts::kDictionary;
  require(path);
  std::ifstream in(path, std::ios::binary);
  return read_dictionary(in, path.string());
}

void stage_ingest(const PipelineConfig& c, Manifest& manifest) {
  auto reviews = load_reviews(c.reviews, c.effective_format());
  write_file(c.output / artifacts::kCorpus, [&](std::ostream& out) { write_reviews_jsonl(out, reviews); });
  manifest.input("reviews", c.reviews, sha256_file(c.reviews));
  manifest.stage(Stage::ingest) = {{"reviews", reviews.size()}};
}

void stage_dict(const PipelineConfig& c, Manifest& manifest) {
  const auto corpus = load_corpus(c.output);
  const auto lex = Lexicon::load(c.lexicon);
  const auto stop = stopwords_for(c);
  const auto dict = build_dictionary(corpus, lex, stop, c.threads);
  write_file(c.output / artifacts::kDictionary, [&](std::ostream& out) { write_dictionary(out, dict); });

  std::size_t nouns = 0;
  for (std::size_t i = 0; i < dict.size(); ++i) nouns += dict.info(i).pos == PartOfSpeech::noun ? 1 : 0;
  manifest.input("lexicon", c.lexicon, sha256_files(c.lexicon, lexicon_files()));
  if (!c.stopwords.empty()) manifest.input("stopwords", c.stopwords, sha256_file(c.stopwords));
  manifest.stage(Stage::dict) = {{"dictionary_size", dict.size()},
                                 {"nouns", nouns},
                                 {"adjectives", dict.size() - nouns},
                                 {"stopwords", stop.size()}};
}

void write_column_stats(std::ostream& out, const DocTermMatrix& m, const std::vector<ColumnStats>& stats) {
  out << "term,df,p,variance\n";
  for (std::size_t t = 0; t < stats.size(); ++t)
    out << m.terms()[t] << ',' << stats[t].df << ',' << fmt(stats[t].p) << ',' << fmt(stats[t].variance) << '\n';
}

void stage_matrix(const PipelineConfig& c, Manifest& manifest) {
  const auto corpus = load_corpus(c.output);
  const auto dict = load_dictionary(c.output);
  const auto lex = Lexicon::load(c.lexicon);
  const auto m = build_matrix(corpus, dict, lex, c.threads);
  save_matrix(c.output / artifacts::kMatrix, m);
  const auto stats = column_stats(m);
  write_file(c.output / artifacts::kColumnStats, [&](std::ostream& out) { write_column_stats(out, m, stats); });

  const FilterResult filtered =
      c.top_k_variance ? filter_top_variance(m, *c.top_k_variance) : filter_low_variance(m, *c.min_variance);
  save_matrix(c.output / artifacts::kFiltered, filtered.matrix);
  write_file(c.output / artifacts::kVarianceFilter, [&](std::ostream& out) {
    out << "term,df,variance,retained\n";
    for (const auto& d : filtered.decisions)
      out << d.term << ',' << d.stats.df << ',' << fmt(d.stats.variance) << ',' << (d.retained ? 1 : 0) << '\n';
  });

  json filter = c.top_k_variance ? json{{"mode", "top_k_variance"}, {"k", *c.top_k_variance}}
                                 : json{{"mode", "min_variance"}, {"min_variance", *c.min_variance}};
  manifest.input("lexicon", c.lexicon, sha256_files(c.lexicon, lexicon_files()));
  manifest.stage(Stage::matrix) = {{"documents", m.n_docs()},
                                   {"terms", m.n_terms()},
                                   {"nonzeros", m.nnz()},
                                   {"filter", filter},
                                   {"retained_terms", filtered.matrix.n_terms()},
                                   {"dropped_terms", m.n_terms() - filtered.matrix.n_terms()},
                                   {"retained_nonzeros", filtered.matrix.nnz()}};
}

void stage_efa(const PipelineConfig& c, Manifest& manifest) {
  const auto m = load_matrix(c.output / artifacts::kFiltered);
  if (m.n_terms() < 2) throw ValidationError("factor analysis needs at least two retained terms");
  const auto corr = correlation_matrix(m, c.threads);
  if (c.dump_correlation)
    write_file(c.output / artifacts::kCorrelation, [&](std::ostream& out) { write_correlation_market(out, corr); });

  const auto spectrum = eigendecompose(corr.values()).values;
  const std::span<const double> eig(spectrum.data(), static_cast<std::size_t>(spectrum.size()));
  const std::size_t selected = select_factor_count(eig, c.factors);
  const std::size_t k = std::min(selected, m.n_terms() - 1);

  FactorModel model = extract_uls(corr, k, c.uls);
  rotate_model(model, c.varimax);
  const LoadingTable pruned = prune_loadings(model, c.threshold);
  const LoadingTable refined = refine_factors(pruned, c.retain);

  write_file(c.output / artifacts::kModel, [&](std::ostream& out) { out << model_to_json(model); });
  write_file(c.output / artifacts::kLoadings, [&](std::ostream& out) { write_loadings_csv(out, model, c.threshold); });
  write_file(c.output / artifacts::kLoadingTable, [&](std::ostream& out) { out << table_to_json(refined); });

  std::size_t kaiser = 0;
  for (double v : eig) kaiser += v > 1.0 ? 1 : 0;
  std::size_t pruned_words = 0, retained_words = 0;
  std::vector<std::size_t> retained_ids;
  for (const auto& f : pruned.factors) pruned_words += f.entries.size();
  for (const auto& f : refined.factors) {
    retained_words += f.entries.size();
    retained_ids.push_back(f.factor);
  }
  manifest.stage(Stage::efa) = {{"variables", m.n_terms()},
                                {"documents", m.n_docs()},
                                {"kaiser_count", kaiser},
                                {"factor_method", c.factors.to_string()},
                                {"factors_selected", selected},
                                {"factors_extracted", k},
                                {"uls_iterations", model.iterations},
                                {"uls_converged", model.converged},
                                {"heywood_cases", model.heywood_count()},
                                {"smc_fallback", model.smc_fallback},
                                {"varimax_sweeps", model.rotation_sweeps},
                                {"varimax_converged", model.rotation_converged},
                                {"loading_threshold", c.threshold},
                                {"pruned_words", pruned_words},
                                {"retain", c.retain},
                                {"factors_retained", refined.factors.size()},
                                {"retained_factor_ids", retained_ids},
                                {"retained_words", retained_words}};
}

void stage_report(const PipelineConfig& c, Manifest& manifest) {
  const fs::path table_path = c.output / artifacts::kLoadingTable;
  const auto table = table_from_json(read_file(table_path));
  const auto m = load_matrix(c.output / artifacts::kFiltered);
  auto reports = build_reports(table, m, c.exemplar_limit);
  std::size_t labeled = 0;
  if (!c.labels.empty()) {
    attach_labels(reports, load_labels(c.labels));
    manifest.input("labels", c.labels, sha256_file(c.labels));
    for (const auto& r : reports) labeled += r.theme_label.empty() ? 0 : 1;
  }
  emit_report(reports, ReportFormat::markdown, c.output / artifacts::kReportMarkdown);
  emit_report(reports, ReportFormat::json, c.output / artifacts::kReportJson);
  emit_report(reports, ReportFormat::csv, c.output / artifacts::kReportCsv);
  manifest.stage(Stage::report) = {{"factors", reports.size()}, {"labeled", labeled}, {"exemplar_limit", c.exemplar_limit}};
}

}  // namespace

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::ingest: return "ingest";
    case Stage::dict: return "dict";
    case Stage::matrix: return "matrix";
    case Stage::efa: return "efa";
    case Stage::report: return "report";
  }
  return "unknown";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (Stage s : kStages)
    if (stage_name(s) == name) return s;
  return std::nullopt;
}

RunLock::RunLock(const fs::path& dir) {
  const fs::path path = dir / artifacts::kLock;
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot create lock file " + path.string());
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw IoError("another run holds the lock on " + dir.string());
  }
}

RunLock::~RunLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

void check_stage_inputs(Stage stage, const PipelineConfig& config) {
  auto need_file = [](const fs::path& p, const char* what) {
    if (p.empty()) throw ConfigError(std::string(what) + " path is not set");
    if (!fs::is_regular_file(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
  };
  auto need_lexicon = [&] {
    if (config.lexicon.empty()) throw ConfigError("lexicon directory is not set");
    if (!fs::is_directory(config.lexicon)) throw ConfigError("lexicon directory not found: " + config.lexicon.string());
    for (const auto& f : lexicon_files())
      if (!fs::is_regular_file(config.lexicon / f))
        throw ConfigError("lexical database file missing: " + (config.lexicon / f).string());
  };
  switch (stage) {
    case Stage::ingest:
      need_file(config.reviews, "review file");
      (void)config.effective_format();
      break;
    case Stage::dict:
      need_lexicon();
      if (!config.stopwords.empty()) need_file(config.stopwords, "stopword file");
      break;
    case Stage::matrix: need_lexicon(); break;
    case Stage::efa: break;
    case Stage::report:
      if (!config.labels.empty()) need_file(config.labels, "label file");
      break;
  }
}

void run_stage(Stage stage, const PipelineConfig& config) {
  try {
    Manifest manifest(config.output / artifacts::kManifest);
    if (stage == Stage::ingest) manifest.reset();
    manifest.begin_stage(stage, config);
    switch (stage) {
      case Stage::ingest: stage_ingest(config, manifest); break;
      case Stage::dict: stage_dict(config, manifest); break;
      case Stage::matrix: stage_matrix(config, manifest); break;
      case Stage::efa: stage_efa(config, manifest); break;
      case Stage::report: stage_report(config, manifest); break;
    }
    manifest.save();
  } catch (const IoError& e) {
    throw StageError(stage, e.what(), true);
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.what(), false);
  } catch (const std::bad_alloc&) {
    throw StageError(stage, "out of memory", false);
  }
}

void run_pipeline(PipelineConfig config) {
  config.validate();
  for (Stage s : kStages) check_stage_inputs(s, config);
  std::error_code ec;
  fs::create_directories(config.output, ec);
  if (ec) throw IoError("cannot create output directory " + config.output.string());
  RunLock lock(config.output);
  for (Stage s : kStages) run_stage(s, config);
}

std::vector<std::string> verify_run(const fs::path& output) {
  std::vector<std::string> problems;
  const fs::path manifest_path = output / artifacts::kManifest;
  if (!fs::exists(manifest_path)) return {"manifest missing: " + manifest_path.string()};
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::parse_error& e) {
    return {std::string("manifest is not valid JSON: ") + e.what()};
  }
  const json stages = manifest.value("stages", json::object());

  auto expect = [&](const std::string& what, std::size_t actual, const json& expected) {
    if (!expected.is_number_unsigned() || expected.get<std::size_t>() != actual)
      problems.push_back(what + ": manifest says " + expected.dump() + ", artifact has " + std::to_string(actual));
  };
  auto guarded = [&](const char* what, auto&& check) {
    try {
      check();
    } catch (const std::exception& e) {
      problems.push_back(std::string(what) + ": " + e.what());
    }
  };

  if (stages.contains("ingest"))
    guarded("corpus", [&] { expect("ingest.reviews", load_corpus(output).size(), stages["ingest"]["reviews"]); });
  if (stages.contains("dict"))
    guarded("dictionary",
            [&] { expect("dict.dictionary_size", load_dictionary(output).size(), stages["dict"]["dictionary_size"]); });
  if (stages.contains("matrix"))
    guarded("matrix", [&] {
      const json& s = stages["matrix"];
      const auto full = load_matrix(output / artifacts::kMatrix);
      expect("matrix.documents", full.n_docs(), s["documents"]);
      expect("matrix.terms", full.n_terms(), s["terms"]);
      expect("matrix.nonzeros", full.nnz(), s["nonzeros"]);
      const auto filtered = load_matrix(output / artifacts::kFiltered);
      expect("matrix.retained_terms", filtered.n_terms(), s["retained_terms"]);
      expect("matrix.retained_nonzeros", filtered.nnz(), s["retained_nonzeros"]);
      if (stages.contains("dict")) expect("dictionary vs matrix columns", full.n_terms(), stages["dict"]["dictionary_size"]);
    });
  if (stages.contains("efa"))
    guarded("factor model", [&] {
      const json& s = stages["efa"];
      const auto model = model_from_json(read_file(output / artifacts::kModel));
      expect("efa.variables", model.p(), s["variables"]);
      expect("efa.factors_extracted", model.k, s["factors_extracted"]);
      expect("efa.heywood_cases", model.heywood_count(), s["heywood_cases"]);
      const auto table = table_from_json(read_file(output / artifacts::kLoadingTable));
      expect("efa.factors_retained", table.factors.size(), s["factors_retained"]);
      std::size_t words = 0;
      for (const auto& f : table.factors) words += f.entries.size();
      expect("efa.retained_words", words, s["retained_words"]);
    });
  if (stages.contains("report"))
    guarded("report", [&] {
      const auto reports = parse_report_json(read_file(output / artifacts::kReportJson));
      expect("report.factors", reports.size(), stages["report"]["factors"]);
    });

  const json inputs = manifest.value("inputs", json::object());
  for (const auto& [name, entry] : inputs.items()) {
    guarded("input digest", [&, name = name, entry = entry] {
      const fs::path path = entry.at("path").get<std::string>();
      const std::string digest = name == "lexicon" ? sha256_files(path, lexicon_files()) : sha256_file(path);
      if (digest != entry.at("sha256").get<std::string>()) problems.push_back("input '" + name + "' changed since the run");
    });
  }
  return problems;
}

}  // namespace lexfa
