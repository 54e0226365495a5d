#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

#include "lle/image.hpp"

namespace lle {

/// Multivariate Gaussian over natural-scene-statistics features of pristine
/// image patches. Each patch yields 18 features at full and half
/// resolution (36 total): a generalized-Gaussian fit of the MSCN
/// coefficients plus asymmetric fits of four neighbour products.
struct NiqeModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::size_t patch_size = 0;
  std::string corpus_id;
};

struct NiqeOptions {
  std::size_t patch_size = 96;
  /// Patches sharper than this fraction of the sharpest patch enter the fit.
  double sharpness_threshold = 0.75;
  /// Added to the covariance diagonal.
  double regularization = 1e-6;
  std::string corpus_id = "unnamed";
};

inline constexpr std::size_t kNiqeFeatureCount = 36;
inline constexpr std::size_t kNiqeMinCorpus = 20;

/// Patch feature vectors of one image (rows), in raster order.
Eigen::MatrixXd niqe_patch_features(const RgbImage& img, std::size_t patch_size);

/// Fits the pristine model. Throws ArgumentError for fewer than 20 images or
/// images smaller than one patch.
NiqeModel niqe_fit(const std::vector<RgbImage>& corpus, const NiqeOptions& opts = {});

/// Distance between the model and the image's own feature Gaussian
/// (lower is better). Needs at least two patches and non-constant content.
double niqe_score(const RgbImage& img, const NiqeModel& model, double regularization = 1e-6);

/// Persists as "niqe.mean", "niqe.cov", "niqe.patch_size" and a
/// "niqe.corpus.<id>" marker in the checkpoint container.
void save_niqe_model(const NiqeModel& model, const std::filesystem::path& path);
NiqeModel load_niqe_model(const std::filesystem::path& path);

}  // namespace lle
