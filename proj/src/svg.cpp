#include "agglo/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace agglo::svg {

namespace {

constexpr double kWidth = 520.0;
constexpr double kHeight = 520.0;
constexpr double kMargin = 50.0;

const std::array<const char*, 10> kPalette = {"#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
                                              "#e377c2", "#17becf", "#bcbd22", "#7f7f7f", "#1f77b4"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

Frame frame_for(const std::vector<Point2>& pts) {
  Frame f{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : pts) {
    f.x0 = std::min(f.x0, p.x);
    f.x1 = std::max(f.x1, p.x);
    f.y0 = std::min(f.y0, p.y);
    f.y1 = std::max(f.y1, p.y);
  }
  if (pts.empty()) f = {0, 1, 0, 1};
  if (!(f.x1 > f.x0)) {
    f.x0 -= 0.5;
    f.x1 += 0.5;
  }
  if (!(f.y1 > f.y0)) {
    f.y0 -= 0.5;
    f.y1 += 0.5;
  }
  return f;
}

std::string header(const std::string& title) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\">" << escape(title) << "</text>\n";
  return out.str();
}

std::string axes(const Frame& f) {
  std::ostringstream out;
  out << "<g stroke=\"#444\" stroke-width=\"1\" fill=\"none\">"
      << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
      << "\" height=\"" << kHeight - 2 * kMargin << "\"/></g>\n"
      << "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#444\">"
      << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 14 << "\">" << num(f.x0) << "</text>"
      << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 14
      << "\" text-anchor=\"end\">" << num(f.x1) << "</text>"
      << "<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin << "\" text-anchor=\"end\">"
      << num(f.y0) << "</text>"
      << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 8 << "\" text-anchor=\"end\">" << num(f.y1)
      << "</text></g>\n";
  return out.str();
}

std::string legend(const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ostringstream out;
  out << "<g font-family=\"sans-serif\" font-size=\"10\">";
  double y = kMargin + 12;
  for (const auto& [label, color] : entries) {
    out << "<rect x=\"" << kWidth - kMargin - 110 << "\" y=\"" << y - 8 << "\" width=\"8\" height=\"8\" fill=\""
        << color << "\"/><text x=\"" << kWidth - kMargin - 98 << "\" y=\"" << y << "\">" << escape(label)
        << "</text>";
    y += 13;
  }
  out << "</g>\n";
  return out.str();
}

}  // namespace

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

std::string color_for(const std::string& label, std::size_t fallback_index) {
  if (label == "cluster0") return "#d62728";
  if (label == "cluster1") return "#2ca02c";
  if (label == "transition") return "#000000";
  if (label == "outlier") return "#1f77b4";
  if (label.rfind("cluster", 0) == 0) {
    const auto idx = static_cast<std::size_t>(std::stoul(label.substr(7)));
    return kPalette[(idx + 2) % (kPalette.size() - 1)];
  }
  return kPalette[fallback_index % kPalette.size()];
}

std::string scatter(const std::vector<Point2>& points, const std::vector<std::string>& labels,
                    const std::string& title) {
  const Frame f = frame_for(points);
  std::map<std::string, std::string> colors;
  std::vector<std::pair<std::string, std::string>> legend_entries;
  for (const auto& l : labels) {
    if (!colors.count(l)) {
      colors[l] = color_for(l, colors.size());
      legend_entries.emplace_back(l, colors[l]);
    }
  }
  std::ostringstream out;
  out << header(title) << axes(f) << "<g stroke=\"none\">\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string& color = i < labels.size() ? colors[labels[i]] : kPalette[0];
    out << "<circle cx=\"" << num(f.px(points[i].x)) << "\" cy=\"" << num(f.py(points[i].y))
        << "\" r=\"2.2\" fill=\"" << color << "\"/>\n";
  }
  out << "</g>\n";
  if (!legend_entries.empty()) out << legend(legend_entries);
  out << "</svg>\n";
  return out.str();
}

std::string region_scatter(const PointSet& points, const RegionLabels& labels, const std::string& title) {
  std::vector<Point2> pts;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto row = points[i];
    pts.push_back({row[0], row.size() > 1 ? row[1] : 0.0});
    names.push_back(i < labels.size() ? label_name(labels[i]) : "transition");
  }
  return scatter(pts, names, title);
}

std::string dendrogram(const Dendrogram& d, const CutResult* cut, const std::string& title) {
  const std::size_t n = d.point_count();
  const std::size_t total = d.node_count();
  const auto& merges = d.merges();

  // Leaf order from a left-first traversal.
  std::vector<double> x(total, 0.0);
  std::size_t next_leaf = 0;
  std::vector<std::pair<std::size_t, bool>> stack{{d.root(), false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    if (d.is_leaf(id)) {
      x[id] = static_cast<double>(next_leaf++);
    } else if (expanded) {
      x[id] = (x[d.merge_of(id).left] + x[d.merge_of(id).right]) / 2.0;
    } else {
      stack.push_back({id, true});
      stack.push_back({d.merge_of(id).right, false});
      stack.push_back({d.merge_of(id).left, false});
    }
  }

  std::vector<std::string> color(total, "#000000");
  if (cut) {
    std::vector<char> outlier(total, 0);
    for (std::size_t p : cut->outliers) outlier[p] = 1;
    for (std::size_t i = 0; i < merges.size(); ++i) {
      outlier[n + i] = outlier[merges[i].left] && outlier[merges[i].right];
    }
    for (std::size_t id = 0; id < total; ++id) {
      if (outlier[id]) color[id] = color_for("outlier", 0);
    }
    for (std::size_t c = 0; c < cut->cluster_nodes.size(); ++c) {
      const std::string col = color_for("cluster" + std::to_string(c), c);
      std::vector<std::size_t> todo{cut->cluster_nodes[c]};
      while (!todo.empty()) {
        const std::size_t id = todo.back();
        todo.pop_back();
        if (id >= total) continue;
        if (!outlier[id]) color[id] = col;
        if (!d.is_leaf(id)) {
          todo.push_back(d.merge_of(id).left);
          todo.push_back(d.merge_of(id).right);
        }
      }
    }
  }

  double top = 0.0;
  for (const auto& m : merges) top = std::max(top, m.height);
  const Frame f{-0.5, std::max(0.5, static_cast<double>(n) - 0.5), 0.0, top > 0.0 ? top : 1.0};
  std::ostringstream out;
  out << header(title) << axes(f) << "<g stroke-width=\"0.8\" fill=\"none\">\n";
  for (std::size_t i = 0; i < merges.size(); ++i) {
    const Merge& m = merges[i];
    const double h = f.py(m.height);
    for (std::size_t child : {m.left, m.right}) {
      out << "<line x1=\"" << num(f.px(x[child])) << "\" y1=\"" << num(f.py(d.height_of(child))) << "\" x2=\""
          << num(f.px(x[child])) << "\" y2=\"" << num(h) << "\" stroke=\"" << color[child] << "\"/>\n";
    }
    out << "<line x1=\"" << num(f.px(x[m.left])) << "\" y1=\"" << num(h) << "\" x2=\"" << num(f.px(x[m.right]))
        << "\" y2=\"" << num(h) << "\" stroke=\"" << color[n + i] << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string vector_plot(const std::vector<Arrow>& arrows, Point2 ideal, const std::string& title) {
  const Frame f{0.0, 1.05, 0.0, 1.05};
  std::ostringstream out;
  out << header(title) << axes(f);
  out << "<defs>";
  std::vector<std::pair<std::string, std::string>> entries;
  for (std::size_t i = 0; i <= arrows.size(); ++i) {
    const std::string col = i == arrows.size() ? "#000000" : kPalette[i % kPalette.size()];
    out << "<marker id=\"head" << i << "\" markerWidth=\"8\" markerHeight=\"8\" refX=\"6\" refY=\"3\" "
        << "orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"" << col << "\"/></marker>";
  }
  out << "</defs>\n<g stroke-width=\"2\">\n";
  auto draw = [&](Point2 tip, std::size_t i, const std::string& col) {
    out << "<line x1=\"" << num(f.px(0)) << "\" y1=\"" << num(f.py(0)) << "\" x2=\"" << num(f.px(tip.x))
        << "\" y2=\"" << num(f.py(tip.y)) << "\" stroke=\"" << col << "\" marker-end=\"url(#head" << i
        << ")\"/>\n";
  };
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    const std::string col = kPalette[i % kPalette.size()];
    draw(arrows[i].tip, i, col);
    entries.emplace_back(arrows[i].label, col);
  }
  draw(ideal, arrows.size(), "#000000");
  entries.emplace_back("ideal", "#000000");
  out << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\"><text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 14
      << "\" text-anchor=\"middle\">relevance, 1 cluster</text><text x=\"14\" y=\"" << kHeight / 2
      << "\" transform=\"rotate(-90 14 " << kHeight / 2
      << ")\" text-anchor=\"middle\">relevance, 2 clusters</text></g>\n";
  out << legend(entries) << "</svg>\n";
  return out.str();
}

std::string line_chart(const std::vector<std::string>& categories, const std::vector<Series>& series,
                       const std::string& title, const std::string& y_label) {
  double top = 0.0;
  for (const auto& s : series) {
    for (double v : s.values) top = std::max(top, v);
  }
  const Frame f{-0.25, std::max(0.25, static_cast<double>(categories.size()) - 0.75), 0.0, top > 0.0 ? top * 1.05 : 1.0};
  std::ostringstream out;
  out << header(title) << axes(f);
  out << "<g font-family=\"sans-serif\" font-size=\"10\">";
  for (std::size_t i = 0; i < categories.size(); ++i) {
    out << "<text x=\"" << num(f.px(static_cast<double>(i))) << "\" y=\"" << kHeight - kMargin + 26
        << "\" text-anchor=\"middle\">" << escape(categories[i]) << "</text>";
  }
  out << "<text x=\"14\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 14 " << kHeight / 2
      << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text></g>\n";
  std::vector<std::pair<std::string, std::string>> entries;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const std::string col = kPalette[s % kPalette.size()];
    out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << col << "\" points=\"";
    for (std::size_t i = 0; i < series[s].values.size(); ++i) {
      out << num(f.px(static_cast<double>(i))) << ',' << num(f.py(series[s].values[i])) << ' ';
    }
    out << "\"/>\n";
    entries.emplace_back(series[s].name, col);
  }
  out << legend(entries) << "</svg>\n";
  return out.str();
}

std::string contour(const PointSet& points, std::size_t bins, std::size_t levels, const std::string& title) {
  bins = std::max<std::size_t>(bins, 2);
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto row = points[i];
    pts.push_back({row[0], row.size() > 1 ? row[1] : 0.0});
  }
  const Frame f = frame_for(pts);
  std::vector<double> grid(bins * bins, 0.0);
  for (const auto& p : pts) {
    auto bx = static_cast<std::size_t>((p.x - f.x0) / (f.x1 - f.x0) * static_cast<double>(bins));
    auto by = static_cast<std::size_t>((p.y - f.y0) / (f.y1 - f.y0) * static_cast<double>(bins));
    bx = std::min(bx, bins - 1);
    by = std::min(by, bins - 1);
    grid[by * bins + bx] += 1.0;
  }
  const double peak = *std::max_element(grid.begin(), grid.end());
  const double cell_w = (f.x1 - f.x0) / static_cast<double>(bins);
  const double cell_h = (f.y1 - f.y0) / static_cast<double>(bins);
  auto cx = [&](double gx) { return f.x0 + (gx + 0.5) * cell_w; };
  auto cy = [&](double gy) { return f.y0 + (gy + 0.5) * cell_h; };

  std::ostringstream out;
  out << header(title) << axes(f) << "<g fill=\"none\" stroke-width=\"1\">\n";
  for (std::size_t l = 0; l < levels; ++l) {
    const double level = peak * static_cast<double>(l + 1) / static_cast<double>(levels + 1);
    const std::string col = kPalette[l % kPalette.size()];
    // Marching squares over cell centres.
    for (std::size_t gy = 0; gy + 1 < bins; ++gy) {
      for (std::size_t gx = 0; gx + 1 < bins; ++gx) {
        const double v[4] = {grid[gy * bins + gx], grid[gy * bins + gx + 1], grid[(gy + 1) * bins + gx + 1],
                             grid[(gy + 1) * bins + gx]};
        const double corner_x[4] = {0, 1, 1, 0};
        const double corner_y[4] = {0, 0, 1, 1};
        std::vector<Point2> crossings;
        for (int e = 0; e < 4; ++e) {
          const int a = e;
          const int b = (e + 1) % 4;
          if ((v[a] < level) != (v[b] < level)) {
            const double t = (level - v[a]) / (v[b] - v[a]);
            crossings.push_back({cx(static_cast<double>(gx) + corner_x[a] + t * (corner_x[b] - corner_x[a])),
                                 cy(static_cast<double>(gy) + corner_y[a] + t * (corner_y[b] - corner_y[a]))});
          }
        }
        for (std::size_t c = 0; c + 1 < crossings.size(); c += 2) {
          out << "<line x1=\"" << num(f.px(crossings[c].x)) << "\" y1=\"" << num(f.py(crossings[c].y))
              << "\" x2=\"" << num(f.px(crossings[c + 1].x)) << "\" y2=\"" << num(f.py(crossings[c + 1].y))
              << "\" stroke=\"" << col << "\"/>\n";
        }
      }
    }
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace agglo::svg
