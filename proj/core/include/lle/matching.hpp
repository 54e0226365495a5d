#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lle/features.hpp"

namespace lle {

struct IndexPair {
  std::size_t first;
  std::size_t second;

  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

/// Two-nearest-neighbour ratio matching by Hamming distance. A query is kept
/// when its nearest distance is strictly below `ratio` times the
/// second-nearest and the pair is mutually nearest (first occurrence wins
/// ties). Returns nothing when `train` has fewer than two entries.
std::vector<IndexPair> match(const std::vector<Descriptor>& query, const std::vector<Descriptor>& train, double ratio);

struct RansacConfig {
  std::size_t iterations = 500;
  double tolerance_px = 2.0;
  std::uint64_t seed = 0;
  /// Resampling budget per iteration for collinear minimal samples.
  std::size_t max_degenerate_retries = 50;
};

/// Keeps the largest set of matches consistent with one homography (mapping
/// kps1 into kps2). `matches` index into kps1/kps2. Fewer than four matches
/// are passed through unchanged with a warning. Output preserves input order.
std::vector<IndexPair> ransac_filter(const std::vector<IndexPair>& matches, const std::vector<Keypoint>& kps1,
                                     const std::vector<Keypoint>& kps2, const RansacConfig& cfg = {});

/// One row of the matching evaluation.
struct MatchReport {
  std::size_t detected_low = 0;
  std::size_t detected_normal = 0;
  std::size_t matches = 0;
  /// matches / detected_normal (0 when nothing was detected in the normal image).
  double match_rate = 0.0;
};

double match_rate(std::size_t matches, std::size_t detected_normal);

struct MatchEvalConfig {
  std::size_t max_points = 1000;
  double ratio = 0.3;
  DetectorConfig detector;
  RansacConfig ransac;
};

using ImageTransform = std::function<RgbImage(const RgbImage&)>;

/// Enhances `low` (when `enhancer` is set), then detect -> describe -> ratio
/// match -> RANSAC against `normal`.
MatchReport evaluate_pair(const RgbImage& low, const RgbImage& normal, const ImageTransform& enhancer = {},
                          const MatchEvalConfig& cfg = {});

/// Sums counts; the pooled rate is total matches over total normal detections.
MatchReport aggregate(const std::vector<MatchReport>& reports);

}  // namespace lle
