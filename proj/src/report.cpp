#include "lexfa/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lexfa/error.hpp"

namespace lexfa {

namespace {

using nlohmann::json;

std::vector<bool> factor_mask(const FactorLoadings& factor, const DocTermMatrix& m) {
  std::vector<bool> mask(m.n_terms(), false);
  for (const auto& e : factor.entries) {
    auto it = std::find(m.terms().begin(), m.terms().end(), e.term);
    if (it == m.terms().end()) throw ValidationError("factor word '" + e.term + "' is not a matrix column");
    mask[static_cast<std::size_t>(it - m.terms().begin())] = true;
  }
  return mask;
}

std::size_t hits(const DocTermMatrix::Row& row, const std::vector<bool>& mask) {
  std::size_t n = 0;
  for (std::uint32_t t : row) n += mask[t] ? 1 : 0;
  return n;
}

std::string markdown_cell(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += '\\';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

std::vector<std::string> exemplar_reviews(const FactorLoadings& factor, const DocTermMatrix& m, std::size_t limit) {
  const auto mask = factor_mask(factor, m);
  std::vector<std::pair<std::size_t, std::size_t>> ranked;  // (hits, doc)
  for (std::size_t d = 0; d < m.n_docs(); ++d)
    if (std::size_t h = hits(m.row(d), mask); h > 0) ranked.emplace_back(h, d);
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return m.doc_ids()[a.second] < m.doc_ids()[b.second];
  });
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < std::min(limit, ranked.size()); ++i) ids.push_back(m.doc_ids()[ranked[i].second]);
  return ids;
}

double factor_coverage(const FactorLoadings& factor, const DocTermMatrix& m) {
  if (m.n_docs() == 0) return 0;
  const auto mask = factor_mask(factor, m);
  std::size_t covered = 0;
  for (const auto& row : m.rows()) covered += hits(row, mask) > 0 ? 1 : 0;
  return static_cast<double>(covered) / static_cast<double>(m.n_docs());
}

std::vector<FactorReport> build_reports(const LoadingTable& table, const DocTermMatrix& m, std::size_t exemplar_limit) {
  std::vector<FactorReport> reports;
  for (const auto& f : table.factors) {
    FactorReport r;
    r.factor = f.factor;
    r.top_words = f.entries;
    r.exemplar_review_ids = exemplar_reviews(f, m, exemplar_limit);
    r.coverage = factor_coverage(f, m);
    reports.push_back(std::move(r));
  }
  return reports;
}

std::map<std::size_t, std::string> parse_labels(std::string_view json_text, std::string_view origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(origin) + ": malformed label file (" + e.what() + ")");
  }
  if (!j.is_object()) throw SchemaError(std::string(origin) + ": label file must be a JSON object");
  std::map<std::size_t, std::string> labels;
  for (const auto& [key, value] : j.items()) {
    std::size_t id = 0;
    std::size_t used = 0;
    try {
      id = std::stoul(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || key.empty() || key[0] == '-' || key[0] == '+' || id == 0)
      throw SchemaError(std::string(origin) + ": label key '" + key + "' is not a factor number");
    if (!value.is_string()) throw SchemaError(std::string(origin) + ": label for factor " + key + " is not a string");
    labels[id] = value.get<std::string>();
  }
  return labels;
}

std::map<std::size_t, std::string> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("label file missing or unreadable: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_labels(buf.str(), path.string());
}

void attach_labels(std::vector<FactorReport>& reports, const std::map<std::size_t, std::string>& labels) {
  for (const auto& [id, text] : labels) {
    auto it = std::find_if(reports.begin(), reports.end(), [&](const FactorReport& r) { return r.factor == id; });
    if (it == reports.end()) throw ValidationError("label given for unknown factor " + std::to_string(id));
  }
  for (auto& r : reports)
    if (auto it = labels.find(r.factor); it != labels.end()) r.theme_label = it->second;
}

std::string format_loading(double loading) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", loading);
  return buf;
}

std::string loaded_words(const FactorReport& report) {
  std::string out;
  for (std::size_t i = 0; i < report.top_words.size(); ++i) {
    if (i) out += ", ";
    out += report.top_words[i].term + " (" + format_loading(report.top_words[i].loading) + ")";
  }
  return out;
}

std::string render_report(std::span<const FactorReport> reports, ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::markdown:
      out << "| Factor # | Loaded words | Theme label |\n";
      out << "| --- | --- | --- |\n";
      for (const auto& r : reports)
        out << "| " << r.factor << " | " << markdown_cell(loaded_words(r)) << " | " << markdown_cell(r.theme_label)
            << " |\n";
      break;
    case ReportFormat::json: {
      json factors = json::array();
      for (const auto& r : reports) {
        json words = json::array();
        for (const auto& w : r.top_words) words.push_back({{"term", w.term}, {"loading", w.loading}});
        factors.push_back({{"factor", r.factor},
                           {"theme_label", r.theme_label},
                           {"top_words", std::move(words)},
                           {"exemplar_review_ids", r.exemplar_review_ids},
                           {"coverage", r.coverage}});
      }
      out << json{{"factors", std::move(factors)}}.dump(1) << '\n';
      break;
    }
    case ReportFormat::csv:
      out << "factor,theme_label,rank,term,loading,coverage,exemplar_review_ids\n";
      for (const auto& r : reports) {
        char cov[32];
        std::snprintf(cov, sizeof cov, "%.6f", r.coverage);
        const std::string prefix = std::to_string(r.factor) + "," + csv_field(r.theme_label) + ",";
        const std::string suffix = std::string(cov) + "," + csv_field(join(r.exemplar_review_ids, ';'));
        if (r.top_words.empty()) out << prefix << ",,," << suffix << '\n';
        for (std::size_t i = 0; i < r.top_words.size(); ++i)
          out << prefix << i + 1 << ',' << csv_field(r.top_words[i].term) << ','
              << format_loading(r.top_words[i].loading) << ',' << suffix << '\n';
      }
      break;
  }
  return out.str();
}

std::vector<FactorReport> parse_report_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    std::vector<FactorReport> reports;
    for (const json& f : j.at("factors")) {
      FactorReport r;
      r.factor = f.at("factor").get<std::size_t>();
      r.theme_label = f.at("theme_label").get<std::string>();
      for (const json& w : f.at("top_words"))
        r.top_words.push_back({w.at("term").get<std::string>(), w.at("loading").get<double>()});
      r.exemplar_review_ids = f.at("exemplar_review_ids").get<std::vector<std::string>>();
      r.coverage = f.at("coverage").get<double>();
      reports.push_back(std::move(r));
    }
    return reports;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
}

void emit_report(std::span<const FactorReport> reports, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write report to " + path.string());
  out << render_report(reports, format);
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace lexfa
