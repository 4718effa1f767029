#pragma once

#include <array>
#include <string>
#include <vector>

namespace epr {

/// Writes a paired-bar comparison of empirical vs target cell
/// probabilities: one CSV (cell-label, empirical, target) and one
/// self-contained SVG. Byte-deterministic for fixed inputs.
void emit_plot_data(const std::array<double, 16>& empirical,
                    const std::array<double, 16>& target,
                    const std::string& csv_path, const std::string& svg_path,
                    const std::vector<std::string>& provenance);

}  // namespace epr
