#include "json.hpp"
#include "lexfa/efa.hpp"
#include "lexfa/error.hpp"

namespace lexfa {

namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::MatrixXd matrix_from(const json& rows, Eigen::Index n_rows, Eigen::Index n_cols, const char* what) {
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n_rows)
    throw ParseError(std::string("model JSON: '") + what + "' has the wrong number of rows");
  Eigen::MatrixXd m(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols)
      throw ParseError(std::string("model JSON: '") + what + "' has a row of the wrong length");
    for (Eigen::Index j = 0; j < n_cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from(const json& values, Eigen::Index n, const char* what) {
  if (!values.is_array() || static_cast<Eigen::Index>(values.size()) != n)
    throw ParseError(std::string("model JSON: '") + what + "' has the wrong length");
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = values[static_cast<std::size_t>(i)].get<double>();
  return v;
}

}  // namespace

std::string model_to_json(const FactorModel& model) {
  json j;
  j["variables"] = model.variables;
  j["k"] = model.k;
  j["loadings"] = matrix_json(model.loadings);
  j["communalities"] = vector_json(model.communalities);
  j["uniquenesses"] = vector_json(model.uniquenesses);
  j["eigenvalues"] = vector_json(model.eigenvalues);
  j["rotation"] = matrix_json(model.rotation);
  j["rotated"] = matrix_json(model.rotated);
  std::vector<int> heywood(model.heywood.begin(), model.heywood.end());
  j["heywood"] = heywood;
  j["smc_fallback"] = model.smc_fallback;
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  j["rotation_sweeps"] = model.rotation_sweeps;
  j["rotation_converged"] = model.rotation_converged;
  return j.dump(1) + "\n";
}

FactorModel model_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    FactorModel m;
    m.variables = j.at("variables").get<std::vector<std::string>>();
    m.k = j.at("k").get<std::size_t>();
    const auto p = static_cast<Eigen::Index>(m.variables.size());
    const auto k = static_cast<Eigen::Index>(m.k);
    m.loadings = matrix_from(j.at("loadings"), p, k, "loadings");
    m.communalities = vector_from(j.at("communalities"), p, "communalities");
    m.uniquenesses = vector_from(j.at("uniquenesses"), p, "uniquenesses");
    m.eigenvalues = vector_from(j.at("eigenvalues"), p, "eigenvalues");
    m.rotation = matrix_from(j.at("rotation"), k, k, "rotation");
    m.rotated = matrix_from(j.at("rotated"), p, k, "rotated");
    for (int h : j.at("heywood").get<std::vector<int>>()) m.heywood.push_back(h != 0);
    if (static_cast<Eigen::Index>(m.heywood.size()) != p) throw ParseError("model JSON: 'heywood' has the wrong length");
    m.smc_fallback = j.at("smc_fallback").get<bool>();
    m.iterations = j.at("iterations").get<int>();
    m.converged = j.at("converged").get<bool>();
    m.rotation_sweeps = j.at("rotation_sweeps").get<int>();
    m.rotation_converged = j.at("rotation_converged").get<bool>();
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
}

std::string table_to_json(const LoadingTable& table) {
  json factors = json::array();
  for (const auto& f : table.factors) {
    json entries = json::array();
    for (const auto& e : f.entries) entries.push_back({{"term", e.term}, {"loading", e.loading}});
    factors.push_back({{"factor", f.factor}, {"entries", std::move(entries)}});
  }
  json j = {{"threshold", table.threshold}, {"factors", std::move(factors)}};
  return j.dump(1) + "\n";
}

LoadingTable table_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    LoadingTable t;
    t.threshold = j.at("threshold").get<double>();
    for (const json& f : j.at("factors")) {
      FactorLoadings fl;
      fl.factor = f.at("factor").get<std::size_t>();
      for (const json& e : f.at("entries"))
        fl.entries.push_back({e.at("term").get<std::string>(), e.at("loading").get<double>()});
      t.factors.push_back(std::move(fl));
    }
    return t;
  } catch (const json::exception& e) {
    throw ParseError(std::string("loading table JSON: ") + e.what());
  }
}

}  // namespace lexfa
