#pragma once

// Experiment configuration, single runs and Monte-Carlo sweeps.

#include "starcons/analysis.hpp"
#include "starcons/io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace starcons {

struct IntRange {
  int lo = 2;
  int hi = 2;
};

enum class BoundaryMode {
  per_agent,           // explicit descriptor list, one per agent
  shared,              // one explicit descriptor for every agent
  random_star,         // independent random star boundary per agent
  random_star_shared,  // one random star boundary for every agent
  random_mixed,        // per agent: random star or random lp sphere
};

enum class X0Mode { explicit_matrix, gaussian_projected, gaussian_halfspace };

/// Parsed experiment description. See docs/config.md for the JSON schema.
struct ExperimentConfig {
  IntRange n;
  IntRange d;
  BoundaryMode boundary_mode = BoundaryMode::random_mixed;
  std::vector<Json> boundary_descriptors;
  std::optional<DirectedGraph> graph;
  double extra_edge_prob = 0.3;
  std::optional<Matrix> weights;
  X0Mode x0_mode = X0Mode::gaussian_projected;
  std::optional<Matrix> x0;
  DecisionOptions decision;
  double rate_tail = 0.5;
  std::uint64_t seed = 0;
  Json source;  // normalized JSON this config was read from

  /// Config with a different seed; source is updated to match.
  ExperimentConfig with_seed(std::uint64_t new_seed) const;
};

ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a of the canonical JSON dump.
std::uint64_t config_hash(const ExperimentConfig& cfg);

struct Instance {
  BoundaryFamily family;
  WeightMatrix a;
  Matrix x0;
};

/// Deterministic in (cfg, seed); random parts draw from independent child seeds.
Instance build_instance(const ExperimentConfig& cfg, std::uint64_t seed);

struct RunRecord {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  int n = 0;
  int d = 0;
  bool consensus_predicted = false;
  bool empirical_converged = false;
  bool empirical_agreement = false;
  std::size_t iterations = 0;
  std::optional<double> rate_slope;
  std::optional<double> rate_r2;
  double vX0_norm = 0.0;
  bool halfspace = false;
  bool full_rank = false;
  bool cone_column = false;
  double wall_time_ms = 0.0;
  std::string error;  // nonempty when the run raised
};

/// Wall time is left out unless requested so outputs stay byte-identical.
Json record_to_json(const RunRecord& r, bool include_timing = false);

struct RunOutput {
  RunRecord record;
  std::optional<Instance> instance;
  std::optional<ConsensusVerdict> verdict;
  std::optional<ConditionReport> conditions;
  std::optional<RateEstimate> rate;
};

/// Builds the instance for cfg.seed, decides, simulates and fits the rate.
RunOutput run_single(const ExperimentConfig& cfg, bool record_states = false);

struct SweepOptions {
  std::size_t runs = 10000;
  std::uint64_t seed = 0;
  unsigned jobs = 0;  // 0 = hardware concurrency
  bool keep_records = true;
};

struct SweepFailure {
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  std::string reason;
  Json config;  // replays through run_single
};

struct SweepSummary {
  std::size_t runs = 0;
  double consensus_fraction = 0.0;  // runs whose simulation reached consensus
  double predicted_fraction = 0.0;  // runs where consensus was predicted
  std::size_t agreement_failures = 0;
  std::optional<double> min_rate_slope;
  std::optional<double> median_rate_slope;
  std::vector<SweepFailure> failures;
  std::vector<RunRecord> records;  // run-index order
};

/// Run r uses seed options.seed + r. Aggregation follows run-index order.
SweepSummary sweep(const ExperimentConfig& cfg, const SweepOptions& options);

Json summary_to_json(const SweepSummary& s);

/// Human-readable table of the sufficient conditions and the v-based verdict.
struct CheckOutput {
  ConditionReport conditions;
  ConsensusVerdict verdict;
};
CheckOutput check_conditions(const ExperimentConfig& cfg);
std::string format_check_table(const CheckOutput& out);

}  // namespace starcons
