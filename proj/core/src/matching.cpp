#include "lle/matching.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "lle/error.hpp"
#include "lle/homography.hpp"

namespace lle {

std::vector<IndexPair> match(const std::vector<Descriptor>& query, const std::vector<Descriptor>& train, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ArgumentError("ratio must lie in (0, 1)");
  std::vector<IndexPair> out;
  if (train.size() < 2 || query.empty()) return out;

  // Best query per train entry, for the mutual check.
  std::vector<std::size_t> best_query(train.size(), 0);
  std::vector<int> best_query_dist(train.size(), std::numeric_limits<int>::max());
  std::vector<std::size_t> nearest(query.size());
  std::vector<int> d1(query.size()), d2(query.size());
  for (std::size_t i = 0; i < query.size(); ++i) {
    int first = std::numeric_limits<int>::max(), second = std::numeric_limits<int>::max();
    std::size_t first_idx = 0;
    for (std::size_t j = 0; j < train.size(); ++j) {
      const int d = hamming(query[i], train[j]);
      if (d < first) {
        second = first;
        first = d;
        first_idx = j;
      } else if (d < second) {
        second = d;
      }
      if (d < best_query_dist[j]) {
        best_query_dist[j] = d;
        best_query[j] = i;
      }
    }
    nearest[i] = first_idx;
    d1[i] = first;
    d2[i] = second;
  }
  for (std::size_t i = 0; i < query.size(); ++i) {
    if (!(static_cast<double>(d1[i]) < ratio * static_cast<double>(d2[i]))) continue;
    if (best_query[nearest[i]] != i) continue;
    out.push_back({i, nearest[i]});
  }
  return out;
}

std::vector<IndexPair> ransac_filter(const std::vector<IndexPair>& matches, const std::vector<Keypoint>& kps1,
                                     const std::vector<Keypoint>& kps2, const RansacConfig& cfg) {
  if (matches.size() < 4) {
    spdlog::warn("RANSAC needs at least 4 matches, got {}; passing them through", matches.size());
    return matches;
  }
  std::vector<Point2> src, dst;
  for (const auto& m : matches) {
    if (m.first >= kps1.size() || m.second >= kps2.size()) throw ArgumentError("match index out of range");
    src.emplace_back(kps1[m.first].x, kps1[m.first].y);
    dst.emplace_back(kps2[m.second].x, kps2[m.second].y);
  }
  auto inliers_of = [&](const Homography& h) {
    std::vector<std::size_t> in;
    for (std::size_t i = 0; i < src.size(); ++i) {
      const auto p = project(h, src[i]);
      if (p && (*p - dst[i]).norm() < cfg.tolerance_px) in.push_back(i);
    }
    return in;
  };

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> best;
  std::vector<std::size_t> order(matches.size());
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    std::optional<Homography> h;
    for (std::size_t attempt = 0; attempt <= cfg.max_degenerate_retries && !h; ++attempt) {
      // Partial Fisher-Yates for four distinct indices.
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t k = 0; k < 4; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, order.size() - 1);
        std::swap(order[k], order[pick(rng)]);
      }
      std::vector<Point2> s, d;
      for (std::size_t k = 0; k < 4; ++k) {
        s.push_back(src[order[k]]);
        d.push_back(dst[order[k]]);
      }
      if (has_collinear_triple(s) || has_collinear_triple(d)) continue;
      h = fit_homography(s, d);
    }
    if (!h) continue;
    auto in = inliers_of(*h);
    if (in.size() > best.size()) best = std::move(in);
  }
  if (best.size() >= 4) {
    std::vector<Point2> s, d;
    for (std::size_t i : best) {
      s.push_back(src[i]);
      d.push_back(dst[i]);
    }
    if (auto refined = fit_homography(s, d)) {
      auto in = inliers_of(*refined);
      if (in.size() >= best.size()) best = std::move(in);
    }
  }
  std::vector<IndexPair> out;
  for (std::size_t i : best) out.push_back(matches[i]);
  return out;
}

double match_rate(std::size_t matches, std::size_t detected_normal) {
  return detected_normal == 0 ? 0.0 : static_cast<double>(matches) / static_cast<double>(detected_normal);
}

MatchReport evaluate_pair(const RgbImage& low, const RgbImage& normal, const ImageTransform& enhancer,
                          const MatchEvalConfig& cfg) {
  const RgbImage query_img = enhancer ? enhancer(low) : low;
  const auto kps_low = detect(query_img, cfg.max_points, cfg.detector);
  const auto kps_normal = detect(normal, cfg.max_points, cfg.detector);
  const auto desc_low = describe(query_img, kps_low);
  const auto desc_normal = describe(normal, kps_normal);

  std::vector<Descriptor> q, t;
  for (const auto& d : desc_low) q.push_back(d.descriptor);
  for (const auto& d : desc_normal) t.push_back(d.descriptor);
  std::vector<IndexPair> pairs;
  for (const auto& m : match(q, t, cfg.ratio)) {
    pairs.push_back({desc_low[m.first].keypoint_index, desc_normal[m.second].keypoint_index});
  }
  const auto kept = ransac_filter(pairs, kps_low, kps_normal, cfg.ransac);

  MatchReport r;
  r.detected_low = kps_low.size();
  r.detected_normal = kps_normal.size();
  r.matches = kept.size();
  r.match_rate = match_rate(r.matches, r.detected_normal);
  return r;
}

MatchReport aggregate(const std::vector<MatchReport>& reports) {
  MatchReport total;
  for (const auto& r : reports) {
    total.detected_low += r.detected_low;
    total.detected_normal += r.detected_normal;
    total.matches += r.matches;
  }
  total.match_rate = match_rate(total.matches, total.detected_normal);
  return total;
}

}  // namespace lle
