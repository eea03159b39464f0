#include "starcons/figures.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace starcons {

namespace {

struct Panel {
  std::string name;
  std::string fixture;
};

std::vector<Panel> panels_for(const std::string& target) {
  if (target == "fig4") return {{"fig4", "fig4.json"}};
  if (target == "fig5") return {{"fig5_left", "fig5_left.json"}, {"fig5_right", "fig5_right.json"}};
  if (target == "fig6") return {{"fig6", "fig5_left.json"}};
  if (target == "fig7") return {{"fig7", "fig7.json"}};
  throw ConfigError("target", "unknown figure \"" + target + "\" (expected fig4, fig5, fig6 or fig7)");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::string matrix_csv(const Matrix& m) {
  std::ostringstream os;
  for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << "x" << j;
  os << '\n';
  write_matrix_csv(os, m);
  return os.str();
}

std::string trajectories_csv(const std::vector<Matrix>& states) {
  std::ostringstream os;
  os << "t,agent";
  const Eigen::Index d = states.front().cols();
  for (Eigen::Index j = 0; j < d; ++j) os << ",x" << j;
  os << '\n';
  for (std::size_t t = 0; t < states.size(); ++t)
    for (Eigen::Index i = 0; i < states[t].rows(); ++i) {
      os << t << ',' << i;
      for (Eigen::Index j = 0; j < d; ++j) os << ',' << format_double(states[t](i, j));
      os << '\n';
    }
  return os.str();
}

double state_spread(const Matrix& x) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) worst = std::max(worst, (x.row(i) - x.row(j)).norm());
  return worst;
}

Json run_panel(const Panel& panel, const std::string& target, const std::filesystem::path& fixture_dir,
               const std::filesystem::path& out_dir) {
  const ExperimentConfig cfg = load_config(fixture_dir / panel.fixture);
  const RunOutput run = run_single(cfg, true);
  if (!run.record.error.empty()) throw Error(panel.name + ": " + run.record.error);
  const Instance& inst = *run.instance;
  const ConsensusVerdict& v = *run.verdict;

  const auto dir = out_dir / panel.name;
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  const auto emit = [&](const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    files.push_back(name);
  };

  emit("config.json", cfg.source.dump(2) + "\n");
  emit("initial_states.csv", matrix_csv(inst.x0));
  emit("final_states.csv", matrix_csv(v.trace.final_state()));
  emit("trajectories.csv", trajectories_csv(v.trace.states));
  emit("verdict.json", verdict_to_json(v, &*run.conditions, run.rate ? &*run.rate : nullptr).dump(2) + "\n");
  {
    std::ostringstream os;
    write_trace_csv(os, v.trace);
    emit("trace.csv", os.str());
  }

  if (inst.family.dim() == 2) {
    std::ostringstream os;
    os << "agent,x0,x1\n";
    for (std::size_t i = 0; i < inst.family.size(); ++i) {
      const Matrix pts = boundary_outline(inst.family[i]);
      for (Eigen::Index k = 0; k < pts.rows(); ++k)
        os << i << ',' << format_double(pts(k, 0)) << ',' << format_double(pts(k, 1)) << '\n';
    }
    emit("boundaries.csv", os.str());
  }

  Json boundaries = Json::array();
  for (std::size_t i = 0; i < inst.family.size(); ++i) boundaries.push_back(gamma_to_json(inst.family[i]));

  Json meta{{"figure", target},
            {"panel", panel.name},
            {"fixture", panel.fixture},
            {"n", inst.family.size()},
            {"d", inst.family.dim()},
            {"seed", cfg.seed},
            {"agent_count_note", "agent count is chosen by this fixture"},
            {"boundaries", boundaries},
            {"weights", weight_matrix_to_json(inst.a)},
            {"x0_in_halfspace", run.conditions->halfspace.holds},
            {"consensus_predicted", v.consensus_predicted},
            {"empirical_converged", v.empirical_converged},
            {"iterations", v.trace.iterations()},
            {"final_direction_spread", pairwise_direction_error(v.trace.final_state())},
            {"final_state_spread", state_spread(v.trace.final_state())}};
  meta["consensus_direction"] =
      v.limit_direction ? vector_to_json(v.limit_direction->transpose()) : Json(nullptr);

  if (target == "fig6") {
    std::ostringstream os;
    os << "t,log10_pairwise_error\n";
    for (std::size_t t = 0; t < v.trace.pairwise_error.size(); ++t) {
      const double e = v.trace.pairwise_error[t];
      if (e > 0.0) os << t << ',' << format_double(std::log10(e)) << '\n';
    }
    emit("log_error.csv", os.str());
    // The figure shows the whole run, so the fit uses every pre-convergence step.
    const RateEstimate whole = fit_rate(v.trace, 1.0);
    meta["fit"] = rate_to_json(whole);
    emit("fit.json", rate_to_json(whole).dump(2) + "\n");
  }
  files.push_back("meta.json");
  meta["files"] = files;
  write_json(dir / "meta.json", meta);
  return meta;
}

}  // namespace

const std::vector<std::string>& figure_targets() {
  static const std::vector<std::string> t{"fig4", "fig5", "fig6", "fig7"};
  return t;
}

Matrix boundary_outline(const DirectionalFunction& gamma, int samples) {
  if (gamma.dim() != 2) throw DimensionMismatch("boundary_outline: planar boundaries only");
  Matrix out(samples + 1, 2);
  RowVector u(2);
  for (int k = 0; k <= samples; ++k) {
    const double th = 2.0 * std::numbers::pi * k / samples;
    u << std::cos(th), std::sin(th);
    out.row(k) = gamma(u) * u;
  }
  return out;
}

Json reproduce_figures(const std::string& target, const std::filesystem::path& fixture_dir,
                       const std::filesystem::path& out_dir) {
  const auto panels = panels_for(target);
  Json out{{"target", target}, {"panels", Json::array()}};
  for (const auto& p : panels) out["panels"].push_back(run_panel(p, target, fixture_dir, out_dir));
  return out;
}

}  // namespace starcons
