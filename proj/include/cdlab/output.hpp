#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "cdlab/energy_diagnostics.hpp"
#include "cdlab/spline_space.hpp"

namespace cdlab {

/// Header plus one row per entry, 17 significant digits.
void write_ledger_csv(std::ostream& out, std::span<const LedgerRow> rows);

/// Legacy ASCII VTK structured points: the field sampled on a (4 m_x + 1) x (4 m_y + 1)
/// grid, and each named per-element array repeated on the element's 4 x 4 sub-cells.
struct CellArray {
  std::string name;
  std::vector<double> values;  // one per element
};
void write_field_vtk(std::ostream& out, const SplineSpace2D& space,
                     std::span<const double> coeffs, std::span<const CellArray> cells,
                     const std::string& title);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal SVG line plot with axes, tick labels and a legend.
void write_line_plot_svg(std::ostream& out, const std::string& title, const std::string& xlabel,
                         const std::string& ylabel, std::span<const PlotSeries> series);

/// "0.625" style label used in snapshot file names.
std::string time_label(double t);

/// Opens a file for writing; throws std::runtime_error naming the path on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace cdlab
