#include "jobprp/render.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>
#include <sstream>

namespace jobprp {

namespace {

constexpr double kScale = 12.0;  // pixels per metre
constexpr double kMargin = 24.0;

constexpr std::array<const char*, 8> kPalette = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Frame {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void include(double x, double y) {
    min_x = std::min(min_x, x);
    min_y = std::min(min_y, y);
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
  }
  double px(double x) const { return kMargin + (x - min_x) * kScale; }
  double py(double y) const { return kMargin + (y - min_y) * kScale; }
  double width() const { return 2 * kMargin + (max_x - min_x) * kScale; }
  double height() const { return 2 * kMargin + (max_y - min_y) * kScale; }
};

void rect(std::ostringstream& os, const Frame& f, const char* cls, double x0, double y0, double x1,
          double y1) {
  os << "  <rect class=\"" << cls << "\" x=\"" << num(f.px(x0)) << "\" y=\"" << num(f.py(y0))
     << "\" width=\"" << num((x1 - x0) * kScale) << "\" height=\"" << num((y1 - y0) * kScale)
     << "\"/>\n";
}

}  // namespace

std::string render_svg(const Instance& inst, const Plan* plan) {
  const PickingGraph& g = inst.graph;
  const int wa = g.num_aisles();
  const int wc = g.num_cross_aisles();

  double half_aisle = 0.5;
  double half_cross = 0.5;
  double rack = 0.0;
  if (inst.layout) {
    half_aisle = inst.layout->config.aisle_width / 2.0;
    half_cross = inst.layout->config.cross_aisle_width / 2.0;
    rack = inst.layout->config.rack_depth;
  }

  Frame f;
  for (const Vertex& v : g.vertices()) f.include(v.x, v.y);
  if (wa > 0 && wc > 0) {
    const Vertex& nw = g.vertex(g.artificial(1, 1));
    const Vertex& se = g.vertex(g.artificial(wa, wc));
    f.include(nw.x - half_aisle - rack, nw.y - half_cross);
    f.include(se.x + half_aisle + rack, se.y + half_cross);
  }

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(f.width()) << "\" height=\""
     << num(f.height()) << "\" viewBox=\"0 0 " << num(f.width()) << ' ' << num(f.height())
     << "\">\n";
  os << "  <style>\n"
        "    .rack { fill: #c8b68e; stroke: #7a6a45; stroke-width: 0.5; }\n"
        "    .aisle, .cross-aisle { fill: #f2f2f2; }\n"
        "    .arc { stroke: #b0b0b0; stroke-width: 1; }\n"
        "    .artificial { fill: #000000; }\n"
        "    .location { fill: #ffffff; stroke: #000000; stroke-width: 1; }\n"
        "    .origin { fill: #444444; }\n"
        "    .walk { fill: none; stroke-width: 2; stroke-opacity: 0.8; stroke-linejoin: round; }\n"
        "  </style>\n";
  os << "  <rect x=\"0\" y=\"0\" width=\"" << num(f.width()) << "\" height=\"" << num(f.height())
     << "\" fill=\"#ffffff\"/>\n";

  if (wa > 0 && wc > 0) {
    const double west = g.vertex(g.artificial(1, 1)).x - half_aisle - rack;
    const double east = g.vertex(g.artificial(wa, 1)).x + half_aisle + rack;
    for (int c = 1; c <= wc; ++c) {
      const double y = g.vertex(g.artificial(1, c)).y;
      rect(os, f, "cross-aisle", west, y - half_cross, east, y + half_cross);
    }
    for (int a = 1; a <= wa; ++a) {
      const double x = g.vertex(g.artificial(a, 1)).x;
      for (int c = 1; c < wc; ++c) {
        const double top = g.vertex(g.artificial(a, c)).y + half_cross;
        const double bottom = g.vertex(g.artificial(a, c + 1)).y - half_cross;
        rect(os, f, "aisle", x - half_aisle, top, x + half_aisle, bottom);
        if (rack > 0.0) {
          rect(os, f, "rack", x - half_aisle - rack, top, x - half_aisle, bottom);
          rect(os, f, "rack", x + half_aisle, top, x + half_aisle + rack, bottom);
        }
      }
    }
  }

  for (int e = 0; e < g.num_arcs(); ++e) {
    const Arc& arc = g.arc(e);
    if (arc.tail > arc.head) continue;
    const Vertex& a = g.vertex(arc.tail);
    const Vertex& b = g.vertex(arc.head);
    os << "  <line class=\"arc\" x1=\"" << num(f.px(a.x)) << "\" y1=\"" << num(f.py(a.y))
       << "\" x2=\"" << num(f.px(b.x)) << "\" y2=\"" << num(f.py(b.y)) << "\"/>\n";
  }

  if (plan) {
    for (std::size_t t = 0; t < plan->walks.size(); ++t) {
      const Walk& w = plan->walks[t];
      if (w.size() < 2) continue;
      // Small per-trolley offset keeps overlapping walks distinguishable.
      const double shift = 1.5 * static_cast<double>(t);
      os << "  <polyline class=\"walk\" data-trolley=\"" << t + 1 << "\" stroke=\""
         << kPalette[t % kPalette.size()] << "\" points=\"";
      for (std::size_t i = 0; i < w.size(); ++i) {
        const Vertex& v = g.vertex(w[i]);
        if (i) os << ' ';
        os << num(f.px(v.x) + shift) << ',' << num(f.py(v.y) + shift);
      }
      os << "\"/>\n";
    }
  }

  for (int id = 0; id < g.num_vertices(); ++id) {
    const Vertex& v = g.vertex(id);
    const double x = f.px(v.x);
    const double y = f.py(v.y);
    switch (v.kind) {
      case VertexKind::Origin:
        os << "  <rect class=\"origin\" x=\"" << num(x - 5) << "\" y=\"" << num(y - 5)
           << "\" width=\"10.00\" height=\"10.00\"/>\n";
        break;
      case VertexKind::Artificial:
        os << "  <circle class=\"artificial\" cx=\"" << num(x) << "\" cy=\"" << num(y)
           << "\" r=\"3.00\"/>\n";
        break;
      case VertexKind::Location:
        os << "  <circle class=\"location\" cx=\"" << num(x) << "\" cy=\"" << num(y)
           << "\" r=\"2.50\"/>\n";
        break;
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace jobprp
