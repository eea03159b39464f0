#pragma once

// Plot data for the shipped example scenarios. Nothing is rendered.

#include "starcons/harness.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace starcons {

/// fig4, fig5, fig6, fig7.
const std::vector<std::string>& figure_targets();

/// Runs the fixture(s) behind target and writes CSV/JSON files under
/// out_dir/<panel>/. Returns a summary with the written files and the checks
/// each figure is meant to show. Throws ConfigError for an unknown target.
Json reproduce_figures(const std::string& target, const std::filesystem::path& fixture_dir,
                       const std::filesystem::path& out_dir);

/// Points gamma(u) u for `samples` directions u around the unit circle.
Matrix boundary_outline(const DirectionalFunction& gamma, int samples = 720);

}  // namespace starcons
