#pragma once

#include <Eigen/Core>
#include <vector>

namespace boxlab {

/// Shoelace area of a polygon in vertex order: 0.5 * |sum(x_i*y_{i+1} - y_i*x_{i+1})|.
double shoelace_area(const std::vector<Eigen::Vector2d>& polygon);

/// Convex hull (Andrew monotone chain), counter-clockwise, no duplicate of the
/// first point. Collinear inputs collapse to a 2-point (or smaller) chain.
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> points);

double convex_hull_area(const std::vector<Eigen::Vector2d>& points);

}  // namespace boxlab
