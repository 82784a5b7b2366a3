#ifndef EQUIPART_IO_HPP
#define EQUIPART_IO_HPP

// Text formats for bodies and grid densities, deterministic JSON output and
// SVG rendering of partitions.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "equipart/density.hpp"
#include "equipart/geometry.hpp"
#include "equipart/power_diagram.hpp"

namespace equipart::io {

/// Malformed input; the message names the offending line when there is one.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

inline bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

inline std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

}  // namespace detail

/// One "x y" pair per line; '#' starts a comment.
inline ConvexPolygon read_polygon(std::istream& in, const std::string& source = "polygon") {
  std::vector<Point2> pts;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string body = detail::strip_comment(line);
    if (detail::blank(body)) continue;
    std::istringstream ss(body);
    Point2 p;
    std::string extra;
    if (!(ss >> p.x >> p.y) || (ss >> extra) || !is_finite(p))
      throw ParseError(source + ":" + std::to_string(lineno) + ": expected 'x y', got '" + line + "'");
    pts.push_back(p);
  }
  if (pts.size() < 3) throw ParseError(source + ": need at least 3 vertices, found " + std::to_string(pts.size()));
  try {
    ConvexPolygon poly = ConvexPolygon::from_vertices(std::move(pts));
    if (poly.empty()) throw ParseError(source + ": polygon has zero area");
    return poly;
  } catch (const std::invalid_argument& e) {
    throw ParseError(source + ": " + e.what());
  }
}

inline ConvexPolygon read_polygon(const std::filesystem::path& path) {
  auto in = detail::open(path);
  return read_polygon(in, path.string());
}

inline void write_polygon(std::ostream& out, const ConvexPolygon& poly) {
  char buf[96];
  for (const Point2& p : poly.vertices()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    out << buf;
  }
}

/// Header "width height origin_x origin_y cell_size", then width*height
/// nonnegative values, row-major with row 0 at origin_y. '#' comments allowed.
inline DensityField read_grid_density(std::istream& in, const std::string& source = "density") {
  std::vector<std::pair<int, std::string>> tokens;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    std::istringstream ss(detail::strip_comment(line));
    std::string tok;
    while (ss >> tok) tokens.emplace_back(lineno, tok);
  }
  auto number = [&](std::size_t k, const char* what) {
    if (k >= tokens.size()) throw ParseError(source + ": missing " + what);
    const auto& [lineno, tok] = tokens[k];
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || !std::isfinite(v))
      throw ParseError(source + ":" + std::to_string(lineno) + ": bad " + what + " '" + tok + "'");
    return v;
  };
  const double w = number(0, "width"), h = number(1, "height");
  if (w < 1 || h < 1 || w != std::floor(w) || h != std::floor(h))
    throw ParseError(source + ":" + std::to_string(tokens[0].first) + ": width and height must be positive integers");
  GridDensity g;
  g.width = static_cast<std::size_t>(w);
  g.height = static_cast<std::size_t>(h);
  g.origin = {number(2, "origin_x"), number(3, "origin_y")};
  g.cell_size = number(4, "cell_size");
  if (!(g.cell_size > 0.0)) throw ParseError(source + ":" + std::to_string(tokens[4].first) + ": cell_size must be positive");
  const std::size_t count = g.width * g.height;
  if (tokens.size() != 5 + count)
    throw ParseError(source + ": expected " + std::to_string(count) + " values, found " + std::to_string(tokens.size() - 5));
  g.values.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double v = number(5 + k, "value");
    if (v < 0.0) throw ParseError(source + ":" + std::to_string(tokens[5 + k].first) + ": negative density value");
    g.values.push_back(v);
  }
  return DensityField(std::move(g));
}

inline DensityField read_grid_density(const std::filesystem::path& path) {
  auto in = detail::open(path);
  return read_grid_density(in, path.string());
}

inline void write_grid_density(std::ostream& out, const GridDensity& g) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu %zu %.17g %.17g %.17g\n", g.width, g.height, g.origin.x, g.origin.y, g.cell_size);
  out << buf;
  for (std::size_t r = 0; r < g.height; ++r) {
    for (std::size_t c = 0; c < g.width; ++c) {
      std::snprintf(buf, sizeof buf, c ? " %.17g" : "%.17g", g.at(c, r));
      out << buf;
    }
    out << '\n';
  }
}

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// JSON text with every float printed to 17 significant digits, two-space
/// indent, keys in insertion order. Identical values give identical bytes.
inline void dump_json(std::ostream& out, const Json& j, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out << ",\n";
        first = false;
        out << pad << Json(key).dump() << ": ";
        dump_json(out, value, indent + 2);
      }
      out << '\n' << close << '}';
      return;
    }
    case Json::value_t::array: {
      // numeric arrays stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out << '[';
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out << (flat ? ", " : ",");
        if (!flat) out << '\n' << pad;
        dump_json(out, j[k], indent + 2);
      }
      if (!flat && !j.empty()) out << '\n' << close;
      out << ']';
      return;
    }
    case Json::value_t::number_float:
      out << format_double(j.get<double>());
      return;
    default:
      out << j.dump();
  }
}

inline std::string dump_json(const Json& j) {
  std::ostringstream ss;
  dump_json(ss, j);
  ss << '\n';
  return ss.str();
}

inline Json to_json(Point2 p) { return Json::array({p.x, p.y}); }

inline Json to_json(const ConvexPolygon& poly) {
  Json a = Json::array();
  for (const Point2& p : poly.vertices()) a.push_back(to_json(p));
  return a;
}

/// Writes `contents` to a sibling temporary file, then renames it over `path`.
inline void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct SvgStyle {
  std::optional<DensityField> heatmap;
  std::vector<Point2> sites;
};

/// SVG of a partition in a fixed 1000 x 1000 view box. Cell polygons are
/// emitted with their exact coordinates under a group transform that maps
/// the body's bounding box into the view box (y up).
inline std::string render_svg(const ConvexPolygon& body, const std::vector<ConvexPolygon>& cells, const SvgStyle& style = {}) {
  const auto& v = body.vertices();
  double x0 = v[0].x, x1 = x0, y0 = v[0].y, y1 = y0;
  for (const Point2& p : v) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double margin = 20.0;
  const double scale = (1000.0 - 2.0 * margin) / std::max(x1 - x0, y1 - y0);
  const double tx = margin - scale * x0 + 0.5 * (1000.0 - 2.0 * margin - scale * (x1 - x0));
  const double ty = 1000.0 - margin + scale * y0 - 0.5 * (1000.0 - 2.0 * margin - scale * (y1 - y0));
  const auto f = format_double;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n";
  s << "<g transform=\"matrix(" << f(scale) << " 0 0 " << f(-scale) << " " << f(tx) << " " << f(ty) << ")\">\n";

  if (style.heatmap && style.heatmap->is_grid()) {
    const GridDensity& g = style.heatmap->as_grid();
    const double peak = *std::max_element(g.values.begin(), g.values.end());
    s << "<g class=\"heatmap\" stroke=\"none\">\n";
    for (std::size_t r = 0; r < g.height; ++r)
      for (std::size_t c = 0; c < g.width; ++c) {
        const double val = g.at(c, r);
        if (!(val > 0.0) || !(peak > 0.0)) continue;
        s << "<rect x=\"" << f(g.origin.x + static_cast<double>(c) * g.cell_size) << "\" y=\""
          << f(g.origin.y + static_cast<double>(r) * g.cell_size) << "\" width=\"" << f(g.cell_size) << "\" height=\""
          << f(g.cell_size) << "\" fill=\"#3b6ea5\" fill-opacity=\"" << f(0.45 * val / peak) << "\"/>\n";
      }
    s << "</g>\n";
  }

  static constexpr const char* palette[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
                                            "#ffff33", "#a65628", "#f781bf", "#999999", "#66c2a5"};
  s << "<g class=\"cells\" stroke=\"black\" stroke-width=\"1.5\" vector-effect=\"non-scaling-stroke\">\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].empty()) continue;
    s << "<polygon data-cell=\"" << i << "\" fill=\"" << palette[i % 10] << "\" fill-opacity=\"0.35\" "
      << "vector-effect=\"non-scaling-stroke\" points=\"";
    for (std::size_t k = 0; k < cells[i].size(); ++k) s << (k ? " " : "") << f(cells[i][k].x) << "," << f(cells[i][k].y);
    s << "\"/>\n";
  }
  s << "</g>\n";
  s << "<polygon class=\"body\" fill=\"none\" stroke=\"black\" stroke-width=\"3\" vector-effect=\"non-scaling-stroke\" points=\"";
  for (std::size_t k = 0; k < body.size(); ++k) s << (k ? " " : "") << f(body[k].x) << "," << f(body[k].y);
  s << "\"/>\n";
  for (const Point2& p : style.sites)
    s << "<circle cx=\"" << f(p.x) << "\" cy=\"" << f(p.y) << "\" r=\"" << f(3.0 / scale) << "\" fill=\"black\"/>\n";
  s << "</g>\n</svg>\n";
  return s.str();
}

}  // namespace equipart::io

#endif  // EQUIPART_IO_HPP
