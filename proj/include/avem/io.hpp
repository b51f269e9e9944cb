#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "avem/adapt.hpp"
#include "avem/assemble.hpp"
#include "avem/mesh.hpp"

namespace avem {

/// 17-significant-digit decimal rendering; round-trips binary64 exactly.
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string());
    out << content;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace detail

// --- mesh JSON ---------------------------------------------------------------

inline std::string mesh_to_json(const PolygonalMesh& mesh) {
  std::ostringstream os;
  os << "{\n  \"vertices\": [";
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    os << (v ? ",\n    " : "\n    ") << '[' << format_real(mesh.vertices[v].x) << ", "
       << format_real(mesh.vertices[v].y) << ']';
  }
  os << "\n  ],\n  \"cells\": [";
  for (int c = 0; c < mesh.n_cells(); ++c) {
    os << (c ? ",\n    " : "\n    ") << '[';
    for (std::size_t i = 0; i < mesh.cells[c].size(); ++i)
      os << (i ? ", " : "") << mesh.cells[c][i];
    os << ']';
  }
  os << "\n  ]\n}\n";
  return os.str();
}

inline void write_mesh_json(const PolygonalMesh& mesh, const std::filesystem::path& path) {
  detail::write_file_atomic(path, mesh_to_json(mesh));
}

PolygonalMesh read_mesh_json(const std::filesystem::path& path);  // defined after json include

// --- history CSV -------------------------------------------------------------

inline std::string history_to_csv(const ConvergenceHistory& hist) {
  std::ostringstream os;
  os << "step,N,lambda_h,theta_sq,jump_sq,eta_sq,error,effectivity\n";
  for (std::size_t i = 0; i < hist.steps.size(); ++i) {
    const StepRecord& r = hist.steps[i];
    os << i << ',' << r.n << ',' << format_real(r.lambda_h) << ',' << format_real(r.theta_sq)
       << ',' << format_real(r.jump_sq) << ',' << format_real(r.eta_sq) << ',';
    if (r.error) os << format_real(*r.error);
    os << ',';
    if (r.effectivity) os << format_real(*r.effectivity);
    os << '\n';
  }
  return os.str();
}

inline void write_history_csv(const ConvergenceHistory& hist, const std::filesystem::path& path) {
  if (hist.steps.empty()) throw IoError("refusing to write an empty history");
  detail::write_file_atomic(path, history_to_csv(hist));
}

inline ConvergenceHistory read_history_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  ConvergenceHistory hist;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    fields.push_back(cur);
    if (fields.size() != 8) throw IoError("malformed CSV row: " + line);
    StepRecord r;
    r.n = std::stoi(fields[1]);
    r.lambda_h = std::stod(fields[2]);
    r.theta_sq = std::stod(fields[3]);
    r.jump_sq = std::stod(fields[4]);
    r.eta_sq = std::stod(fields[5]);
    if (!fields[6].empty()) r.error = std::stod(fields[6]);
    if (!fields[7].empty()) r.effectivity = std::stod(fields[7]);
    hist.steps.push_back(r);
  }
  return hist;
}

// --- SVG rendering -----------------------------------------------------------

namespace detail {

struct SvgFrame {
  double x0, y0, x1, y1, scale, width, height;
  double tx(double x) const { return (x - x0) * scale + 10.0; }
  double ty(double y) const { return (y1 - y) * scale + 10.0; }  // flip y
};

inline SvgFrame svg_frame(const PolygonalMesh& mesh, double width_px = 640.0) {
  SvgFrame f{};
  f.x0 = f.x1 = mesh.vertices[0].x;
  f.y0 = f.y1 = mesh.vertices[0].y;
  for (const Point2& p : mesh.vertices) {
    f.x0 = std::min(f.x0, p.x); f.x1 = std::max(f.x1, p.x);
    f.y0 = std::min(f.y0, p.y); f.y1 = std::max(f.y1, p.y);
  }
  f.scale = (width_px - 20.0) / std::max(f.x1 - f.x0, 1e-300);
  f.width = width_px;
  f.height = (f.y1 - f.y0) * f.scale + 20.0;
  return f;
}

inline std::string svg_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// linear blue -> white -> red scale on t in [0,1]
inline std::string color_of(double t) {
  t = std::clamp(t, 0.0, 1.0);
  int r, g, b;
  if (t < 0.5) {
    const double s = t / 0.5;
    r = static_cast<int>(30 + s * (250 - 30));
    g = static_cast<int>(60 + s * (250 - 60));
    b = 255;
  } else {
    const double s = (t - 0.5) / 0.5;
    r = 255;
    g = static_cast<int>(250 - s * (250 - 60));
    b = static_cast<int>(250 - s * (250 - 30));
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace detail

/// Mesh rendering: wireframe when no scalar is given, otherwise polygons
/// filled on a linear color scale with a min/max legend. A constant scalar
/// maps every cell to the mid color. Output bytes depend only on the inputs.
inline std::string mesh_to_svg(const PolygonalMesh& mesh,
                               const std::vector<double>* per_cell_scalar = nullptr) {
  if (per_cell_scalar && static_cast<int>(per_cell_scalar->size()) != mesh.n_cells())
    throw DimensionMismatch("scalar length must equal the cell count");
  const detail::SvgFrame f = detail::svg_frame(mesh);
  std::ostringstream os;
  const double legend_h = per_cell_scalar ? 40.0 : 0.0;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::svg_num(f.width)
     << "\" height=\"" << detail::svg_num(f.height + legend_h) << "\">\n";
  double lo = 0.0, hi = 0.0;
  bool flat = true;
  if (per_cell_scalar && !per_cell_scalar->empty()) {
    lo = hi = (*per_cell_scalar)[0];
    for (double v : *per_cell_scalar) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    flat = !(hi > lo);
  }
  for (int c = 0; c < mesh.n_cells(); ++c) {
    os << "<polygon points=\"";
    for (std::size_t i = 0; i < mesh.cells[c].size(); ++i) {
      const Point2 p = mesh.vertices[mesh.cells[c][i]];
      os << (i ? " " : "") << detail::svg_num(f.tx(p.x)) << ',' << detail::svg_num(f.ty(p.y));
    }
    std::string fill = "none";
    if (per_cell_scalar)
      fill = detail::color_of(flat ? 0.5 : ((*per_cell_scalar)[c] - lo) / (hi - lo));
    os << "\" fill=\"" << fill << "\" stroke=\"#303030\" stroke-width=\"0.5\"/>\n";
  }
  if (per_cell_scalar) {
    const int nseg = 32;
    const double bar_w = f.width - 120.0;
    for (int s = 0; s < nseg; ++s) {
      os << "<rect x=\"" << detail::svg_num(10.0 + bar_w * s / nseg) << "\" y=\""
         << detail::svg_num(f.height + 8.0) << "\" width=\"" << detail::svg_num(bar_w / nseg + 0.5)
         << "\" height=\"12\" fill=\"" << detail::color_of((s + 0.5) / nseg) << "\"/>\n";
    }
    os << "<text x=\"10\" y=\"" << detail::svg_num(f.height + 34.0)
       << "\" font-size=\"11\" font-family=\"monospace\">min " << format_real(lo) << "</text>\n";
    os << "<text x=\"" << detail::svg_num(bar_w - 150.0) << "\" y=\""
       << detail::svg_num(f.height + 34.0) << "\" font-size=\"11\" font-family=\"monospace\">max "
       << format_real(hi) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void render_svg(const PolygonalMesh& mesh, const std::vector<double>* per_cell_scalar,
                       const std::filesystem::path& path) {
  detail::write_file_atomic(path, mesh_to_svg(mesh, per_cell_scalar));
}

/// Field figure: cells filled by the pressure p_h, arrows for the projected
/// displacement Pi_h w_h (cell-constant by construction at k = 0).
inline std::string fields_to_svg(const PolygonalMesh& mesh, const FieldReconstruction& fields) {
  const detail::SvgFrame f = detail::svg_frame(mesh);
  std::ostringstream os;
  std::string base = mesh_to_svg(mesh, &fields.p);
  base.erase(base.rfind("</svg>"));
  os << base;
  double wmax = 0.0;
  for (const Point2& v : fields.pi_w) wmax = std::max(wmax, norm(v));
  for (int c = 0; c < mesh.n_cells(); ++c) {
    if (wmax <= 0.0) break;
    const Polygon poly = mesh.cell_polygon(c);
    const Point2 ctr = polygon_centroid(poly);
    const double h = polygon_diameter(poly);
    const Point2 v = (0.45 * h / wmax) * fields.pi_w[c];
    const Point2 tip = ctr + v;
    const Point2 left = tip - 0.25 * v + 0.12 * perp(v);
    const Point2 right = tip - 0.25 * v - 0.12 * perp(v);
    os << "<path d=\"M" << detail::svg_num(f.tx(ctr.x)) << ' ' << detail::svg_num(f.ty(ctr.y))
       << " L" << detail::svg_num(f.tx(tip.x)) << ' ' << detail::svg_num(f.ty(tip.y)) << " M"
       << detail::svg_num(f.tx(left.x)) << ' ' << detail::svg_num(f.ty(left.y)) << " L"
       << detail::svg_num(f.tx(tip.x)) << ' ' << detail::svg_num(f.ty(tip.y)) << " L"
       << detail::svg_num(f.tx(right.x)) << ' ' << detail::svg_num(f.ty(right.y))
       << "\" stroke=\"#101010\" stroke-width=\"0.8\" fill=\"none\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void render_fields_svg(const PolygonalMesh& mesh, const FieldReconstruction& fields,
                              const std::filesystem::path& path) {
  detail::write_file_atomic(path, fields_to_svg(mesh, fields));
}

// --- summary JSON ------------------------------------------------------------

inline std::string summary_to_json(const ConvergenceHistory& hist,
                                   const std::optional<ExtrapolationResult>& ex,
                                   const std::optional<double>& rate) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"steps\": " << hist.steps.size() << ",\n";
  if (!hist.steps.empty()) {
    os << "  \"final_N\": " << hist.steps.back().n << ",\n";
    os << "  \"final_lambda_h\": " << format_real(hist.steps.back().lambda_h) << ",\n";
  }
  if (ex) {
    os << "  \"lambda_star\": " << format_real(ex->lambda_star) << ",\n";
    os << "  \"fit_coefficient\": " << format_real(ex->coefficient) << ",\n";
    os << "  \"fit_alpha\": " << format_real(ex->alpha) << ",\n";
    os << "  \"fit_residual\": " << format_real(ex->fit_residual) << ",\n";
  }
  if (rate) os << "  \"rate_vs_lambda_star\": " << format_real(*rate) << ",\n";
  double eff_min = 0.0, eff_max = 0.0;
  bool have_eff = false;
  for (const StepRecord& r : hist.steps) {
    if (!r.effectivity) continue;
    if (!have_eff) {
      eff_min = eff_max = *r.effectivity;
      have_eff = true;
    } else {
      eff_min = std::min(eff_min, *r.effectivity);
      eff_max = std::max(eff_max, *r.effectivity);
    }
  }
  if (have_eff) {
    os << "  \"effectivity_min\": " << format_real(eff_min) << ",\n";
    os << "  \"effectivity_max\": " << format_real(eff_max) << ",\n";
  }
  os << "  \"failure\": \"" << hist.failure << "\"\n}\n";
  return os.str();
}

}  // namespace avem

// nlohmann/json is used only for parsing (writing is explicit 17-digit text)
#include <json.hpp>

namespace avem {

inline PolygonalMesh read_mesh_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  in >> j;
  std::vector<Point2> verts;
  for (const auto& v : j.at("vertices")) verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  std::vector<std::vector<int>> cells;
  for (const auto& c : j.at("cells")) {
    std::vector<int> loop;
    for (const auto& i : c) loop.push_back(i.get<int>());
    cells.push_back(std::move(loop));
  }
  return build_mesh(verts, cells);
}

}  // namespace avem
