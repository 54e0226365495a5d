#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace lle {

using Homography = Eigen::Matrix3d;
using Point2 = Eigen::Vector2d;

/// Normalized DLT from at least four correspondences (least squares beyond
/// four). Returns nullopt for degenerate configurations.
std::optional<Homography> fit_homography(const std::vector<Point2>& src, const std::vector<Point2>& dst);

/// Maps `p` through `h`; returns nullopt when it lands at infinity.
std::optional<Point2> project(const Homography& h, const Point2& p);

/// True when any three of the points are (nearly) collinear.
bool has_collinear_triple(const std::vector<Point2>& pts, double min_area = 1e-3);

}  // namespace lle
