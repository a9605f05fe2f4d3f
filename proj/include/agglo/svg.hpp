#pragma once

#include <string>
#include <utility>
#include <vector>

#include "agglo/dendro_analysis.hpp"
#include "agglo/linkage.hpp"
#include "agglo/point_set.hpp"

// Standalone SVG emitters. Every function returns a complete document.
namespace agglo::svg {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Colour per distinct label, with fixed colours for the region names
// ("cluster0" red, "cluster1" green, "transition" black, "outlier" blue).
std::string color_for(const std::string& label, std::size_t fallback_index);

std::string scatter(const std::vector<Point2>& points, const std::vector<std::string>& labels,
                    const std::string& title);

// Scatter of the first two coordinates, coloured by region.
std::string region_scatter(const PointSet& points, const RegionLabels& labels, const std::string& title);

// Dendrogram with cluster subtrees coloured like region_scatter and outlier
// subtrees in blue. `cut` may be null.
std::string dendrogram(const Dendrogram& d, const CutResult* cut, const std::string& title);

struct Arrow {
  std::string label;
  Point2 tip;
};

// Arrows from the origin on the unit square; `ideal` drawn in black.
std::string vector_plot(const std::vector<Arrow>& arrows, Point2 ideal, const std::string& title);

struct Series {
  std::string name;
  std::vector<double> values;
};

std::string line_chart(const std::vector<std::string>& categories, const std::vector<Series>& series,
                       const std::string& title, const std::string& y_label);

// Isolines of a bins x bins histogram of the first two coordinates.
std::string contour(const PointSet& points, std::size_t bins, std::size_t levels, const std::string& title);

std::string escape(const std::string& text);

}  // namespace agglo::svg
