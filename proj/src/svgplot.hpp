#pragma once

#include <string>
#include <vector>

namespace erc {

// Renders a named runlog column against env_step for a set of CSVs.
// Files sharing metadata up to the seed are grouped into one line with
// a mean +- standard-deviation band. Pure text SVG, no renderer.
void emit_plot(const std::vector<std::string>& csv_paths,
               const std::string& column, const std::string& out_svg);

}  // namespace erc
