// starcons: simulate, sweep, reproduce figure data and check initial-state conditions.

#include "starcons/figures.hpp"
#include "starcons/harness.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

using namespace starcons;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

int cmd_simulate(const std::string& config, const std::string& trace_path, const std::string& states_path,
                 const std::string& out_path, bool timing) {
  const ExperimentConfig cfg = load_config(config);
  const RunOutput run = run_single(cfg, !states_path.empty());
  Json out = record_to_json(run.record, timing);
  if (run.verdict)
    out["verdict"] = verdict_to_json(*run.verdict, run.conditions ? &*run.conditions : nullptr,
                                     run.rate ? &*run.rate : nullptr);
  const std::string text = out.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  if (!trace_path.empty() && run.verdict) {
    std::ostringstream os;
    write_trace_csv(os, run.verdict->trace);
    write_file(trace_path, os.str());
  }
  if (!states_path.empty() && run.verdict) write_file(states_path, states_to_json(run.verdict->trace).dump() + "\n");
  if (!run.record.error.empty()) {
    std::cerr << "run failed: " << run.record.error << '\n';
    return 1;
  }
  return 0;
}

int cmd_sweep(const std::string& config, const SweepOptions& opts, const std::string& records_path,
              const std::string& summary_path, bool timing) {
  const ExperimentConfig cfg = load_config(config);
  const SweepSummary s = sweep(cfg, opts);
  if (!records_path.empty()) {
    std::ostringstream os;
    for (const auto& r : s.records) os << record_to_json(r, timing).dump() << '\n';
    write_file(records_path, os.str());
  }
  const std::string text = summary_to_json(s).dump(2) + "\n";
  if (summary_path.empty())
    std::cout << text;
  else
    write_file(summary_path, text);
  if (s.agreement_failures) {
    std::cerr << s.agreement_failures << " run(s) where prediction and simulation disagree\n";
    return 2;
  }
  return 0;
}

int cmd_figures(const std::string& target, const std::string& out_dir, const std::string& fixtures) {
  const std::vector<std::string> targets =
      target == "all" ? figure_targets() : std::vector<std::string>{target};
  Json all = Json::array();
  for (const auto& t : targets) all.push_back(reproduce_figures(t, fixtures, out_dir));
  for (const auto& fig : all)
    for (const auto& p : fig["panels"])
      std::cout << p["panel"].get<std::string>() << ": n=" << p["n"] << " d=" << p["d"]
                << " converged=" << p["empirical_converged"] << " iterations=" << p["iterations"]
                << (p.contains("fit") ? " fit_r2=" + p["fit"]["r2"].dump() : "") << " -> "
                << (std::filesystem::path(out_dir) / p["panel"].get<std::string>()).string() << '\n';
  return 0;
}

int cmd_check(const std::string& config, bool json) {
  const CheckOutput out = check_conditions(load_config(config));
  if (json)
    std::cout << verdict_to_json(out.verdict, &out.conditions).dump(2) << '\n';
  else
    std::cout << format_check_table(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus of directions on star boundaries"};
  app.require_subcommand(1);

  std::string config;
  bool timing = false;

  auto* sim = app.add_subcommand("simulate", "Run one configuration and print its record");
  std::string trace_path, states_path, out_path;
  sim->add_option("config", config, "Config JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--trace", trace_path, "Write the per-step trace CSV here");
  sim->add_option("--states", states_path, "Write every recorded state matrix (JSON) here");
  sim->add_option("--out", out_path, "Write the record JSON here instead of stdout");
  sim->add_flag("--timing", timing, "Include wall time in the record");

  auto* sw = app.add_subcommand("sweep", "Monte-Carlo sweep over seeds");
  SweepOptions sopts;
  std::string records_path, summary_path;
  sw->add_option("config", config, "Config JSON")->required()->check(CLI::ExistingFile);
  sw->add_option("--runs", sopts.runs, "Number of runs")->check(CLI::PositiveNumber);
  sw->add_option("--seed", sopts.seed, "Base seed; run r uses seed + r");
  sw->add_option("--jobs", sopts.jobs, "Worker threads (0 = all cores)");
  sw->add_option("--records", records_path, "Write one JSON record per run (JSON lines)");
  sw->add_option("--summary", summary_path, "Write the summary JSON here instead of stdout");
  sw->add_flag("--timing", timing, "Include wall times in the records");

  auto* fig = app.add_subcommand("figures", "Write plot data for fig4, fig5, fig6, fig7 or all");
  std::string target, out_dir = "figures_out", fixtures = STARCONS_FIXTURE_DIR;
  fig->add_option("target", target, "fig4|fig5|fig6|fig7|all")
      ->required()
      ->check(CLI::IsMember({"fig4", "fig5", "fig6", "fig7", "all"}));
  fig->add_option("--out", out_dir, "Output directory");
  fig->add_option("--fixtures", fixtures, "Directory with the fixture configs")->check(CLI::ExistingDirectory);

  auto* chk = app.add_subcommand("check", "Evaluate the sufficient conditions and the prediction, no simulation");
  bool check_json = false;
  chk->add_option("config", config, "Config JSON")->required()->check(CLI::ExistingFile);
  chk->add_flag("--json", check_json, "Print JSON instead of a table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(config, trace_path, states_path, out_path, timing);
    if (*sw) {
      sopts.keep_records = !records_path.empty();
      return cmd_sweep(config, sopts, records_path, summary_path, timing);
    }
    if (*fig) return cmd_figures(target, out_dir, fixtures);
    if (*chk) return cmd_check(config, check_json);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
