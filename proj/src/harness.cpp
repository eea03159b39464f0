#include "starcons/harness.hpp"

#include "starcons/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace starcons {

namespace {

IntRange parse_range(const Json& j, const char* key) {
  const Json& v = j[key];
  if (v.is_number_integer()) {
    const int x = v.get<int>();
    return {x, x};
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()) {
    IntRange r{v[0].get<int>(), v[1].get<int>()};
    if (r.lo > r.hi) throw ConfigError(key, "range is empty");
    return r;
  }
  throw ConfigError(key, "expected an integer or [lo, hi]");
}

double number_or(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(key, "expected a number");
  return j[key].get<double>();
}

// Settles n when an explicit part fixes it; conflicting sizes are an error.
void pin_n(std::optional<int>& n, int value, const char* source) {
  if (n && *n != value)
    throw ConfigError(source, "implies n = " + std::to_string(value) + " but n = " + std::to_string(*n));
  n = value;
}

}  // namespace

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  static const std::vector<std::string> known{
      "n", "d", "boundary", "graph", "weights", "x0", "tol_direction", "tol_phi", "max_iters",
      "decision_threshold", "rate_tail", "seed", "note"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(key, "unknown field");

  ExperimentConfig cfg;
  std::optional<int> fixed_n;
  std::optional<int> fixed_d;

  // boundary
  const Json boundary = j.contains("boundary") ? j["boundary"] : Json("random-mixed");
  if (boundary.is_string()) {
    const auto s = boundary.get<std::string>();
    if (s == "random-star")
      cfg.boundary_mode = BoundaryMode::random_star;
    else if (s == "random-star-shared")
      cfg.boundary_mode = BoundaryMode::random_star_shared;
    else if (s == "random-mixed")
      cfg.boundary_mode = BoundaryMode::random_mixed;
    else
      throw ConfigError("boundary", "unknown mode \"" + s + "\"");
  } else if (boundary.is_object()) {
    cfg.boundary_mode = BoundaryMode::shared;
    cfg.boundary_descriptors = {boundary};
  } else if (boundary.is_array() && !boundary.empty()) {
    cfg.boundary_mode = BoundaryMode::per_agent;
    for (const auto& b : boundary) cfg.boundary_descriptors.push_back(b);
    pin_n(fixed_n, static_cast<int>(boundary.size()), "boundary");
  } else {
    throw ConfigError("boundary", "expected a mode string, a descriptor or a descriptor list");
  }

  // graph
  if (j.contains("graph")) {
    const Json& g = j["graph"];
    if (g.is_object() && g.contains("edges")) {
      cfg.graph = graph_from_json(g, "graph");
      pin_n(fixed_n, static_cast<int>(cfg.graph->size()), "graph");
    } else if (g.is_object() && g.contains("extra_edge_prob")) {
      cfg.extra_edge_prob = number_or(g, "extra_edge_prob", 0.3);
      if (!(cfg.extra_edge_prob >= 0.0 && cfg.extra_edge_prob <= 1.0))
        throw ConfigError("graph.extra_edge_prob", "must lie in [0, 1]");
    } else {
      throw ConfigError("graph", "expected {\"extra_edge_prob\": p} or {\"n\": n, \"edges\": [...]}");
    }
  }

  // weights
  if (j.contains("weights")) {
    const Json& w = j["weights"];
    if (w.is_string()) {
      if (w.get<std::string>() != "random") throw ConfigError("weights", "expected \"random\" or a matrix");
    } else {
      cfg.weights = matrix_from_json(w, "weights");
      if (cfg.weights->rows() != cfg.weights->cols()) throw ConfigError("weights", "matrix must be square");
      pin_n(fixed_n, static_cast<int>(cfg.weights->rows()), "weights");
    }
  }

  // x0
  if (j.contains("x0")) {
    const Json& x = j["x0"];
    if (x.is_string()) {
      const auto s = x.get<std::string>();
      if (s == "gaussian-projected")
        cfg.x0_mode = X0Mode::gaussian_projected;
      else if (s == "gaussian-halfspace")
        cfg.x0_mode = X0Mode::gaussian_halfspace;
      else
        throw ConfigError("x0", "unknown mode \"" + s + "\"");
    } else {
      cfg.x0_mode = X0Mode::explicit_matrix;
      cfg.x0 = matrix_from_json(x, "x0");
      pin_n(fixed_n, static_cast<int>(cfg.x0->rows()), "x0");
      fixed_d = static_cast<int>(cfg.x0->cols());
    }
  }

  if (j.contains("n")) {
    cfg.n = parse_range(j, "n");
    if (fixed_n && (cfg.n.lo != *fixed_n || cfg.n.hi != *fixed_n))
      throw ConfigError("n", "explicit parts of the config fix n = " + std::to_string(*fixed_n));
  } else if (fixed_n) {
    cfg.n = {*fixed_n, *fixed_n};
  } else {
    throw ConfigError("n", "missing");
  }
  if (cfg.n.lo < 2) throw ConfigError("n", "need at least two agents");

  if (j.contains("d")) {
    cfg.d = parse_range(j, "d");
    if (fixed_d && (cfg.d.lo != *fixed_d || cfg.d.hi != *fixed_d))
      throw ConfigError("d", "x0 fixes d = " + std::to_string(*fixed_d));
  } else if (fixed_d) {
    cfg.d = {*fixed_d, *fixed_d};
  } else {
    throw ConfigError("d", "missing");
  }
  if (cfg.d.lo < 2) throw ConfigError("d", "dimension must be at least 2");

  cfg.decision.tol_direction = number_or(j, "tol_direction", kDefaultTolDirection);
  cfg.decision.tol_phi = number_or(j, "tol_phi", kDefaultTolPhi);
  cfg.decision.decision_threshold = number_or(j, "decision_threshold", 1e-8);
  if (j.contains("max_iters")) {
    if (!j["max_iters"].is_number_unsigned()) throw ConfigError("max_iters", "expected a positive integer");
    cfg.decision.max_iters = j["max_iters"].get<std::size_t>();
  }
  cfg.rate_tail = number_or(j, "rate_tail", 0.5);
  if (!(cfg.decision.tol_direction > 0.0)) throw ConfigError("tol_direction", "must be positive");
  if (!(cfg.decision.tol_phi > 0.0)) throw ConfigError("tol_phi", "must be positive");
  if (!(cfg.rate_tail > 0.0 && cfg.rate_tail <= 1.0)) throw ConfigError("rate_tail", "must lie in (0, 1]");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }

  // Validate explicit descriptors against every dimension they could meet.
  for (std::size_t i = 0; i < cfg.boundary_descriptors.size(); ++i)
    for (int d = cfg.d.lo; d <= cfg.d.hi; ++d)
      gamma_from_json(cfg.boundary_descriptors[i], d, "boundary[" + std::to_string(i) + "]");

  cfg.source = j;
  cfg.source["seed"] = cfg.seed;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", path.string() + ": " + e.what());
  }
  return parse_config(j);
}

ExperimentConfig ExperimentConfig::with_seed(std::uint64_t new_seed) const {
  ExperimentConfig out = *this;
  out.seed = new_seed;
  out.source["seed"] = new_seed;
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : cfg.source.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// ---------------------------------------------------------------------------

namespace {

DirectionalFunction random_mixed_gamma(int dim, Rng& rng) {
  std::bernoulli_distribution star(0.5);
  const std::uint64_t s = child_seed(rng);
  if (star(rng)) return make_random_star_gamma(dim, s);
  static const double ps[] = {1.0, 2.0, 3.0, 4.0, kInfiniteP};
  std::uniform_int_distribution<int> pick(0, 4);
  std::uniform_real_distribution<double> radius(0.5, 2.0);
  const double p = ps[pick(rng)];
  return make_lp_gamma(p, radius(rng), dim);
}

BoundaryFamily build_family(const ExperimentConfig& cfg, int n, int d, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<DirectionalFunction> gammas;
  switch (cfg.boundary_mode) {
    case BoundaryMode::per_agent:
      for (std::size_t i = 0; i < cfg.boundary_descriptors.size(); ++i)
        gammas.push_back(gamma_from_json(cfg.boundary_descriptors[i], d, "boundary[" + std::to_string(i) + "]"));
      break;
    case BoundaryMode::shared:
      gammas.assign(static_cast<std::size_t>(n), gamma_from_json(cfg.boundary_descriptors[0], d, "boundary"));
      break;
    case BoundaryMode::random_star:
      for (int i = 0; i < n; ++i) gammas.push_back(make_random_star_gamma(d, child_seed(rng)));
      break;
    case BoundaryMode::random_star_shared:
      gammas.assign(static_cast<std::size_t>(n), make_random_star_gamma(d, child_seed(rng)));
      break;
    case BoundaryMode::random_mixed:
      for (int i = 0; i < n; ++i) gammas.push_back(random_mixed_gamma(d, rng));
      break;
  }
  return BoundaryFamily(std::move(gammas));
}

Matrix gaussian_states(const BoundaryFamily& family, bool halfspace, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss;
  const auto n = static_cast<Eigen::Index>(family.size());
  Matrix x(n, family.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    do {
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = gauss(rng);
    } while (x.row(i).norm() < 1e-8);
    if (halfspace) x(i, 0) = std::abs(x(i, 0));
  }
  return rowwise_project(family, x);
}

}  // namespace

Instance build_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> pick_n(cfg.n.lo, cfg.n.hi);
  std::uniform_int_distribution<int> pick_d(cfg.d.lo, cfg.d.hi);
  const int n = pick_n(rng);
  const int d = pick_d(rng);
  const std::uint64_t boundary_seed = child_seed(rng);
  const std::uint64_t graph_seed = child_seed(rng);
  const std::uint64_t weight_seed = child_seed(rng);
  const std::uint64_t x0_seed = child_seed(rng);

  try {
    BoundaryFamily family = build_family(cfg, n, d, boundary_seed);
    std::optional<WeightMatrix> a;
    if (cfg.weights)
      a = cfg.graph ? WeightMatrix(*cfg.graph, *cfg.weights) : WeightMatrix(*cfg.weights);
    else
      a = random_weight_matrix(
          cfg.graph ? *cfg.graph : random_scc_graph(static_cast<std::size_t>(n), cfg.extra_edge_prob, graph_seed),
          family, weight_seed);

    Matrix x0;
    if (cfg.x0) {
      x0 = *cfg.x0;
      if (!is_on_boundary(family, x0, 1e-10)) throw ConfigError("x0", "rows do not lie on their boundaries");
    } else {
      x0 = gaussian_states(family, cfg.x0_mode == X0Mode::gaussian_halfspace, x0_seed);
    }
    if (!check_well_posed(*a, family))
      throw ConfigError("weights", "weight matrix and boundaries violate the well-posedness assumption");
    return Instance{std::move(family), std::move(*a), std::move(x0)};
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("", e.what());
  }
}

// ---------------------------------------------------------------------------

Json record_to_json(const RunRecord& r, bool include_timing) {
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << r.config_hash;
  Json out{{"config_hash", hash.str()},
           {"seed", r.seed},
           {"n", r.n},
           {"d", r.d},
           {"consensus_predicted", r.consensus_predicted},
           {"empirical_converged", r.empirical_converged},
           {"empirical_agreement", r.empirical_agreement},
           {"iterations", r.iterations},
           {"vX0_norm", r.vX0_norm},
           {"conditions", {{"halfspace", r.halfspace}, {"full_rank", r.full_rank}, {"cone_column", r.cone_column}}}};
  out["rate_slope"] = r.rate_slope ? Json(*r.rate_slope) : Json(nullptr);
  out["rate_r2"] = r.rate_r2 ? Json(*r.rate_r2) : Json(nullptr);
  if (!r.error.empty()) out["error"] = r.error;
  if (include_timing) out["wall_time_ms"] = r.wall_time_ms;
  return out;
}

RunOutput run_single(const ExperimentConfig& cfg, bool record_states) {
  const auto start = std::chrono::steady_clock::now();
  RunOutput out;
  RunRecord& rec = out.record;
  rec.config_hash = config_hash(cfg);
  rec.seed = cfg.seed;

  out.instance = build_instance(cfg, cfg.seed);
  const Instance& inst = *out.instance;
  rec.n = static_cast<int>(inst.family.size());
  rec.d = inst.family.dim();

  DecisionOptions opt = cfg.decision;
  opt.record_states = record_states;
  try {
    out.conditions = check_sufficient_conditions(inst.a, inst.x0);
    rec.halfspace = out.conditions->halfspace.holds;
    rec.full_rank = out.conditions->full_rank.holds;
    rec.cone_column = out.conditions->cone_column.holds;

    out.verdict = decide_consensus(inst.a, inst.family, inst.x0, opt);
    const ConsensusVerdict& v = *out.verdict;
    rec.consensus_predicted = v.consensus_predicted;
    rec.empirical_converged = v.empirical_converged;
    rec.empirical_agreement = v.empirical_agreement;
    rec.iterations = v.trace.iterations();
    rec.vX0_norm = v.vX0_norm;
    if (v.trace.converged() && v.trace.pairwise_error.size() >= 20) {
      out.rate = fit_rate(v.trace, cfg.rate_tail);
      rec.rate_slope = out.rate->slope;
      rec.rate_r2 = out.rate->r2;
    }
  } catch (const Error& e) {
    rec.error = e.what();
    rec.empirical_agreement = false;
  }
  rec.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

SweepSummary sweep(const ExperimentConfig& cfg, const SweepOptions& options) {
  if (options.runs == 0) throw ContractViolation("sweep: need at least one run");
  unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, options.runs));

  std::vector<RunRecord> records(options.runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < options.runs; r = next++) {
      const ExperimentConfig run_cfg = cfg.with_seed(options.seed + r);
      try {
        records[r] = run_single(run_cfg).record;
      } catch (const Error& e) {
        records[r].config_hash = config_hash(run_cfg);
        records[r].seed = run_cfg.seed;
        records[r].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepSummary s;
  s.runs = options.runs;
  std::size_t converged = 0, predicted = 0;
  std::vector<double> slopes;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const RunRecord& rec = records[r];
    converged += rec.empirical_converged;
    predicted += rec.consensus_predicted;
    if (rec.rate_slope) slopes.push_back(*rec.rate_slope);
    if (!rec.empirical_agreement) {
      ++s.agreement_failures;
      std::string reason = rec.error.empty()
                               ? (rec.consensus_predicted ? "predicted consensus, simulation did not converge"
                                                          : "simulation converged, no consensus predicted")
                               : rec.error;
      s.failures.push_back({r, rec.seed, std::move(reason), cfg.with_seed(rec.seed).source});
    }
  }
  s.consensus_fraction = static_cast<double>(converged) / static_cast<double>(s.runs);
  s.predicted_fraction = static_cast<double>(predicted) / static_cast<double>(s.runs);
  if (!slopes.empty()) {
    std::sort(slopes.begin(), slopes.end());
    s.min_rate_slope = slopes.front();
    const std::size_t mid = slopes.size() / 2;
    s.median_rate_slope = slopes.size() % 2 ? slopes[mid] : 0.5 * (slopes[mid - 1] + slopes[mid]);
  }
  if (options.keep_records) s.records = std::move(records);
  return s;
}

Json summary_to_json(const SweepSummary& s) {
  Json failures = Json::array();
  for (const auto& f : s.failures)
    failures.push_back({{"run_index", f.run_index}, {"seed", f.seed}, {"reason", f.reason}, {"config", f.config}});
  Json out{{"runs", s.runs},
           {"consensus_fraction", s.consensus_fraction},
           {"predicted_fraction", s.predicted_fraction},
           {"agreement_failures", s.agreement_failures},
           {"failures", failures}};
  out["min_rate_slope"] = s.min_rate_slope ? Json(*s.min_rate_slope) : Json(nullptr);
  out["median_rate_slope"] = s.median_rate_slope ? Json(*s.median_rate_slope) : Json(nullptr);
  return out;
}

// ---------------------------------------------------------------------------

CheckOutput check_conditions(const ExperimentConfig& cfg) {
  const Instance inst = build_instance(cfg, cfg.seed);
  return CheckOutput{check_sufficient_conditions(inst.a, inst.x0),
                     predict_consensus(inst.a, inst.family, inst.x0, cfg.decision)};
}

std::string format_check_table(const CheckOutput& out) {
  std::ostringstream os;
  const auto yes = [](bool b) { return b ? "yes" : "no"; };
  const auto& c = out.conditions;
  os << std::left << std::setw(28) << "condition" << std::setw(8) << "holds" << "detail\n";
  os << std::setw(28) << "rows in a half-space" << std::setw(8) << yes(c.halfspace.holds)
     << "margin " << format_double(c.halfspace.margin) << (c.halfspace.boundary ? " (boundary)" : "") << '\n';
  os << std::setw(28) << "full row rank" << std::setw(8) << yes(c.full_rank.holds) << "rank "
     << c.full_rank.numerical_rank << ", smallest singular value "
     << format_double(c.full_rank.smallest_singular_value) << '\n';
  os << std::setw(28) << "column outside C-perp(A)" << std::setw(8) << yes(c.cone_column.holds);
  if (c.cone_column.witness_column_index) os << "column " << *c.cone_column.witness_column_index;
  os << '\n';
  os << std::setw(28) << "|v(X0) X0|" << std::setw(8) << yes(out.verdict.consensus_predicted)
     << format_double(out.verdict.vX0_norm) << " (threshold " << format_double(out.verdict.threshold) << ")\n";
  os << "consensus predicted: " << yes(out.verdict.consensus_predicted) << '\n';
  return os.str();
}

}  // namespace starcons
