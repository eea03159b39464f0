#pragma once

// JSON and CSV encodings. Floats are written as shortest round-trip decimals.

#include "starcons/analysis.hpp"
#include "starcons/dynamics.hpp"
#include "starcons/geometry.hpp"
#include "starcons/graph.hpp"
#include "starcons/relative.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>

namespace starcons {

using Json = nlohmann::json;

/// Malformed input; field() is a dotted path to the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

std::string format_double(double x);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& field = "matrix");
Json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v);

/// {"kind":"lp","p":…,"r":…} | {"kind":"star",…} | {"kind":"const","c":…}; "p":"inf" for the max-norm.
Json gamma_to_json(const DirectionalFunction& g);
DirectionalFunction gamma_from_json(const Json& j, int dim, const std::string& field = "gamma");

/// {"n":…, "edges":[[i,j],…]} with 0-based indices.
Json graph_to_json(const DirectedGraph& g);
DirectedGraph graph_from_json(const Json& j, const std::string& field = "graph");

/// {"A":[[…]], "graph":{…}}
Json weight_matrix_to_json(const WeightMatrix& a);
WeightMatrix weight_matrix_from_json(const Json& j, const std::string& field = "weights");

/// n arrays of d x d rows.
Json frames_to_json(const FrameSet& f);
FrameSet frames_from_json(const Json& j, const std::string& field = "frames");

Json conditions_to_json(const ConditionReport& r);
Json rate_to_json(const RateEstimate& r);
Json verdict_to_json(const ConsensusVerdict& v, const ConditionReport* conditions = nullptr,
                     const RateEstimate* rate = nullptr);

/// n rows, comma separated.
void write_matrix_csv(std::ostream& os, const Matrix& m);

/// Columns t, pairwise_error, phi_states, phi_Y, min_ratio, max_ratio. The
/// product columns are empty when the product was not tracked.
void write_trace_csv(std::ostream& os, const SimulationTrace& trace);

/// Array of the recorded n x d state matrices.
Json states_to_json(const SimulationTrace& trace);

}  // namespace starcons
