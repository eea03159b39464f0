#include "starcons/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace starcons {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Matrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a nonempty array of rows");
  const auto rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw ConfigError(field + "[0]", "expected a nonempty row");
  const auto cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string rf = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != cols) throw ConfigError(rf, "rows must all have length " + std::to_string(cols));
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) throw ConfigError(rf + "[" + std::to_string(k) + "]", "expected a number");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
  }
  return m;
}

namespace {

double number_at(const Json& j, const char* key, const std::string& field) {
  if (!j.contains(key) || !j[key].is_number()) throw ConfigError(field + "." + key, "expected a number");
  return j[key].get<double>();
}

}  // namespace

Json gamma_to_json(const DirectionalFunction& g) {
  const auto& d = g.descriptor();
  if (const auto* lp = std::get_if<LpShape>(&d)) {
    Json p = std::isinf(lp->p) ? Json("inf") : Json(lp->p);
    return Json{{"kind", "lp"}, {"p", p}, {"r", lp->r}};
  }
  if (const auto* c = std::get_if<ConstShape>(&d)) return Json{{"kind", "const"}, {"c", c->c}};
  const auto& s = std::get<StarShape>(d);
  return Json{{"kind", "star"},
              {"base", s.base},
              {"anchors", s.anchors.rows() > 0 ? matrix_to_json(s.anchors) : Json::array()},
              {"weights", s.weights},
              {"powers", s.powers}};
}

DirectionalFunction gamma_from_json(const Json& j, int dim, const std::string& field) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ConfigError(field + ".kind", "expected \"lp\", \"star\" or \"const\"");
  const auto kind = j["kind"].get<std::string>();
  try {
    if (kind == "lp") {
      double p = 0.0;
      if (j.contains("p") && j["p"].is_string() && j["p"].get<std::string>() == "inf")
        p = kInfiniteP;
      else
        p = number_at(j, "p", field);
      return make_lp_gamma(p, number_at(j, "r", field), dim);
    }
    if (kind == "const") return make_const_gamma(number_at(j, "c", field), dim);
    if (kind == "star") {
      const double base = number_at(j, "base", field);
      if (!j.contains("anchors") || !j["anchors"].is_array()) throw ConfigError(field + ".anchors", "expected an array");
      Matrix anchors = j["anchors"].empty() ? Matrix(0, dim) : matrix_from_json(j["anchors"], field + ".anchors");
      if (anchors.cols() != dim) throw ConfigError(field + ".anchors", "anchor length differs from d");
      if (!j.contains("weights") || !j["weights"].is_array()) throw ConfigError(field + ".weights", "expected an array");
      if (!j.contains("powers") || !j["powers"].is_array()) throw ConfigError(field + ".powers", "expected an array");
      std::vector<double> weights;
      std::vector<int> powers;
      for (const auto& w : j["weights"]) {
        if (!w.is_number()) throw ConfigError(field + ".weights", "expected numbers");
        weights.push_back(w.get<double>());
      }
      for (const auto& q : j["powers"]) {
        if (!q.is_number_integer()) throw ConfigError(field + ".powers", "expected integers");
        powers.push_back(q.get<int>());
      }
      return DirectionalFunction(StarShape{base, std::move(anchors), std::move(weights), std::move(powers)}, dim);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
  throw ConfigError(field + ".kind", "unknown kind \"" + kind + "\"");
}

Json graph_to_json(const DirectedGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges()) edges.push_back({e.from, e.to});
  return Json{{"n", g.size()}, {"edges", edges}};
}

DirectedGraph graph_from_json(const Json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_unsigned())
    throw ConfigError(field + ".n", "expected a positive integer");
  if (!j.contains("edges") || !j["edges"].is_array()) throw ConfigError(field + ".edges", "expected an array");
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < j["edges"].size(); ++k) {
    const auto& e = j["edges"][k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned())
      throw ConfigError(field + ".edges[" + std::to_string(k) + "]", "expected [i, j] with 0-based indices");
    edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>()});
  }
  try {
    return DirectedGraph(j["n"].get<std::size_t>(), std::move(edges));
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
}

Json weight_matrix_to_json(const WeightMatrix& a) {
  return Json{{"A", matrix_to_json(a.entries())}, {"graph", graph_to_json(a.graph())}};
}

WeightMatrix weight_matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("A")) throw ConfigError(field + ".A", "missing matrix");
  Matrix entries = matrix_from_json(j["A"], field + ".A");
  try {
    if (j.contains("graph")) return WeightMatrix(graph_from_json(j["graph"], field + ".graph"), std::move(entries));
    return WeightMatrix(std::move(entries));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
}

Json frames_to_json(const FrameSet& f) {
  Json out = Json::array();
  for (const auto& r : f.rotations()) out.push_back(matrix_to_json(r));
  return out;
}

FrameSet frames_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected an array of matrices");
  std::vector<Matrix> rot;
  for (std::size_t i = 0; i < j.size(); ++i)
    rot.push_back(matrix_from_json(j[i], field + "[" + std::to_string(i) + "]"));
  try {
    return FrameSet(std::move(rot));
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
}

Json conditions_to_json(const ConditionReport& r) {
  Json hs{{"holds", r.halfspace.holds}, {"margin", r.halfspace.margin}, {"boundary", r.halfspace.boundary}};
  hs["witness_h"] = r.halfspace.witness_h ? vector_to_json(r.halfspace.witness_h->transpose()) : Json(nullptr);
  Json rank{{"holds", r.full_rank.holds},
            {"numerical_rank", r.full_rank.numerical_rank},
            {"smallest_singular_value", r.full_rank.smallest_singular_value}};
  Json cone{{"holds", r.cone_column.holds}};
  cone["witness_column_index"] =
      r.cone_column.witness_column_index ? Json(*r.cone_column.witness_column_index) : Json(nullptr);
  return Json{{"halfspace", hs}, {"full_rank", rank}, {"cone_column", cone}};
}

Json rate_to_json(const RateEstimate& r) {
  return Json{{"slope", r.slope}, {"r2", r.r2}, {"window", r.window}, {"points", r.points}, {"flat", r.flat}};
}

Json verdict_to_json(const ConsensusVerdict& v, const ConditionReport* conditions,
                     const RateEstimate* rate) {
  Json out{{"vX0_norm", v.vX0_norm},
           {"threshold", v.threshold},
           {"consensus_predicted", v.consensus_predicted},
           {"v", vector_to_json(v.v)},
           {"vX0", vector_to_json(v.vX0.transpose())}};
  out["limit_direction"] = v.limit_direction ? vector_to_json(v.limit_direction->transpose()) : Json(nullptr);
  out["limit_states"] = v.limit_states ? matrix_to_json(*v.limit_states) : Json(nullptr);
  if (v.simulated) {
    out["empirical_converged"] = v.empirical_converged;
    out["empirical_agreement"] = v.empirical_agreement;
    out["iterations"] = v.trace.iterations();
    out["stop_reason"] = std::string(to_string(v.trace.stop_reason));
  }
  out["conditions"] = conditions ? conditions_to_json(*conditions) : Json(nullptr);
  out["rate"] = rate ? rate_to_json(*rate) : Json(nullptr);
  return out;
}

void write_matrix_csv(std::ostream& os, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

void write_trace_csv(std::ostream& os, const SimulationTrace& trace) {
  os << "t,pairwise_error,phi_states,phi_Y,min_ratio,max_ratio\n";
  const bool product = trace.phiY_history.size() == trace.pairwise_error.size();
  for (std::size_t t = 0; t < trace.pairwise_error.size(); ++t) {
    os << (trace.t0 + t) << ',' << format_double(trace.pairwise_error[t]) << ','
       << format_double(trace.phi_history[t]) << ',';
    if (product)
      os << format_double(trace.phiY_history[t]) << ',' << format_double(trace.min_ratio[t]) << ','
         << format_double(trace.max_ratio[t]);
    else
      os << ",,";
    os << '\n';
  }
}

Json states_to_json(const SimulationTrace& trace) {
  Json out = Json::array();
  for (const auto& s : trace.states) out.push_back(matrix_to_json(s));
  return out;
}

}  // namespace starcons
