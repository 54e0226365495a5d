#include "lle/homography.hpp"

#include <cmath>

namespace lle {

namespace {

// Similarity moving the centroid to the origin with mean distance sqrt(2).
Eigen::Matrix3d normalizer(const std::vector<Point2>& pts) {
  Point2 c = Point2::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += (p - c).norm();
  mean_dist /= static_cast<double>(pts.size());
  const double s = mean_dist > 0.0 ? std::sqrt(2.0) / mean_dist : 1.0;
  Eigen::Matrix3d t;
  t << s, 0, -s * c.x(), 0, s, -s * c.y(), 0, 0, 1;
  return t;
}

}  // namespace

std::optional<Homography> fit_homography(const std::vector<Point2>& src, const std::vector<Point2>& dst) {
  if (src.size() < 4 || src.size() != dst.size()) return std::nullopt;
  const Eigen::Matrix3d ts = normalizer(src), td = normalizer(dst);
  Eigen::MatrixXd a(2 * src.size(), 9);
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Eigen::Vector3d p = ts * src[i].homogeneous();
    const Eigen::Vector3d q = td * dst[i].homogeneous();
    const auto r = static_cast<Eigen::Index>(2 * i);
    a.row(r) << -p.x(), -p.y(), -1, 0, 0, 0, q.x() * p.x(), q.x() * p.y(), q.x();
    a.row(r + 1) << 0, 0, 0, -p.x(), -p.y(), -1, q.y() * p.x(), q.y() * p.y(), q.y();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  // A rank below 8 leaves more than one solution.
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() < 8 || sv(7) < 1e-9 * sv(0)) return std::nullopt;
  const Eigen::VectorXd hv = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << hv(0), hv(1), hv(2), hv(3), hv(4), hv(5), hv(6), hv(7), hv(8);
  Homography h = td.inverse() * hn * ts;
  if (!h.allFinite() || std::fabs(h(2, 2)) < 1e-12) return std::nullopt;
  h /= h(2, 2);
  if (std::fabs(h.determinant()) < 1e-12) return std::nullopt;
  return h;
}

std::optional<Point2> project(const Homography& h, const Point2& p) {
  const Eigen::Vector3d q = h * p.homogeneous();
  if (std::fabs(q.z()) < 1e-12) return std::nullopt;
  return Point2(q.x() / q.z(), q.y() / q.z());
}

bool has_collinear_triple(const std::vector<Point2>& pts, double min_area) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      for (std::size_t k = j + 1; k < pts.size(); ++k) {
        const Point2 u = pts[j] - pts[i], v = pts[k] - pts[i];
        if (std::fabs(u.x() * v.y() - u.y() * v.x()) * 0.5 < min_area) return true;
      }
    }
  }
  return false;
}

}  // namespace lle
