#include "cdlab/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cdlab/errors.hpp"

namespace cdlab {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string time_label(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  std::string s = buf;
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

void write_ledger_csv(std::ostream& out, std::span<const LedgerRow> rows) {
  const auto& cols = ledger_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& row : rows) {
    const auto vals = ledger_values(row);
    out << row.step;
    for (std::size_t i = 1; i < vals.size(); ++i) out << ',' << fmt17(vals[i]);
    out << '\n';
  }
}

void write_field_vtk(std::ostream& out, const SplineSpace2D& space,
                     std::span<const double> coeffs, std::span<const CellArray> cells,
                     const std::string& title) {
  constexpr int kSub = 4;
  const int mx = space.x().num_elements();
  const int my = space.y().num_elements();
  const int px = kSub * mx + 1;
  const int py = kSub * my + 1;
  const double dx = space.x().length() / (kSub * mx);
  const double dy = space.y().length() / (kSub * my);
  for (const auto& c : cells) {
    if (c.values.size() != static_cast<std::size_t>(space.num_elements())) {
      throw ValidationError("cell array '" + c.name + "' needs one value per element");
    }
  }
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << px << ' ' << py << " 1\n";
  out << "ORIGIN 0 0 0\n";
  out << "SPACING " << fmt17(dx) << ' ' << fmt17(dy) << " 1\n";
  out << "POINT_DATA " << px * py << "\nSCALARS phi double 1\nLOOKUP_TABLE default\n";
  for (int j = 0; j < py; ++j) {
    for (int i = 0; i < px; ++i) out << fmt17(space.evaluate_field(coeffs, i * dx, j * dy)) << '\n';
  }
  if (cells.empty()) return;
  out << "CELL_DATA " << (px - 1) * (py - 1) << '\n';
  for (const auto& c : cells) {
    out << "SCALARS " << c.name << " double 1\nLOOKUP_TABLE default\n";
    for (int j = 0; j < py - 1; ++j) {
      for (int i = 0; i < px - 1; ++i) {
        out << fmt17(c.values[static_cast<std::size_t>(space.element_index(i / kSub, j / kSub))])
            << '\n';
      }
    }
  }
}

void write_line_plot_svg(std::ostream& out, const std::string& title, const std::string& xlabel,
                         const std::string& ylabel, std::span<const PlotSeries> series) {
  constexpr double W = 720, H = 440, L = 80, R = 20, T = 40, B = 60;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (double v : s.x) { x0 = std::min(x0, v); x1 = std::max(x1, v); }
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  if (!(x1 > x0)) { x0 = 0.0; x1 = 1.0; }
  if (!(y1 > y0)) {
    const double c = std::isfinite(y0) ? y0 : 0.0;
    y0 = c - 1.0;
    y1 = c + 1.0;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(title) << "</text>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5.0;
    const double yv = y0 + (y1 - y0) * k / 5.0;
    out << "<text x=\"" << sx(xv) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
        << fmt_short(xv) << "</text>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">"
        << fmt_short(yv) << "</text>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << sy(yv) << "\" x2=\"" << W - R << "\" y2=\""
        << sy(yv) << "\" stroke=\"#e0e0e0\"/>\n";
  }
  if (y0 < 0.0 && y1 > 0.0) {
    out << "<line x1=\"" << L << "\" y1=\"" << sy(0.0) << "\" x2=\"" << W - R << "\" y2=\""
        << sy(0.0) << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
  }
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">"
      << xml_escape(xlabel) << "</text>\n";
  out << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (T + H - B) / 2 << ")\">" << xml_escape(ylabel) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = colors[s % std::size(colors)];
    std::ostringstream pts;
    const std::size_t n = std::min(ser.x.size(), ser.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(ser.y[i])) continue;
      pts << sx(ser.x[i]) << ',' << sy(ser.y[i]) << ' ';
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
        << pts.str() << "\"/>\n";
    const double ly = T + 14 + 16 * static_cast<double>(s);
    out << "<line x1=\"" << W - R - 230 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R - 205
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << W - R - 200 << "\" y=\"" << ly << "\">" << xml_escape(ser.label)
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace cdlab
