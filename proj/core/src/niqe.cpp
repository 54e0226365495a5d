#include "lle/niqe.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "filter.hpp"
#include "lle/checkpoint.hpp"
#include "lle/error.hpp"

namespace lle {

namespace {

struct Plane {
  std::size_t w = 0, h = 0;
  std::vector<double> v;
  double at(std::size_t x, std::size_t y) const { return v[y * w + x]; }
};

// Shape parameters 0.2:0.001:10 and the matching moment ratio
// Gamma(2/a)^2 / (Gamma(1/a) Gamma(3/a)).
const std::vector<std::pair<double, double>>& shape_table() {
  static const auto table = [] {
    std::vector<std::pair<double, double>> t;
    for (int i = 200; i <= 10000; ++i) {
      const double a = i / 1000.0;
      const double r = std::pow(std::tgamma(2.0 / a), 2) / (std::tgamma(1.0 / a) * std::tgamma(3.0 / a));
      t.emplace_back(a, r);
    }
    return t;
  }();
  return table;
}

struct AggdFit {
  double alpha, left, right;
};

// Asymmetric generalized Gaussian moment matching.
AggdFit fit_aggd(const std::vector<double>& x) {
  double left_sq = 0.0, right_sq = 0.0, abs_sum = 0.0, sq_sum = 0.0;
  std::size_t left_n = 0, right_n = 0;
  for (double v : x) {
    if (v < 0.0) {
      left_sq += v * v;
      ++left_n;
    } else if (v > 0.0) {
      right_sq += v * v;
      ++right_n;
    }
    abs_sum += std::fabs(v);
    sq_sum += v * v;
  }
  const double n = static_cast<double>(x.size());
  const double left_std = left_n ? std::sqrt(left_sq / static_cast<double>(left_n)) : 0.0;
  const double right_std = right_n ? std::sqrt(right_sq / static_cast<double>(right_n)) : 0.0;
  constexpr double tiny = 1e-12;
  const double gamma_hat = (left_std + tiny) / (right_std + tiny);
  const double mean_abs = abs_sum / n;
  const double r_hat = mean_abs * mean_abs / (sq_sum / n + tiny);
  const double r_norm = r_hat * (gamma_hat * gamma_hat * gamma_hat + 1.0) * (gamma_hat + 1.0) /
                        std::pow(gamma_hat * gamma_hat + 1.0, 2);
  const auto& table = shape_table();
  double alpha = table.front().first;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [a, r] : table) {
    const double d = (r - r_norm) * (r - r_norm);
    if (d < best) {
      best = d;
      alpha = a;
    }
  }
  const double scale = std::sqrt(std::tgamma(1.0 / alpha) / std::tgamma(3.0 / alpha));
  return {alpha, left_std * scale, right_std * scale};
}

// Mean-subtracted contrast-normalized coefficients on the 0..255 scale,
// 7x7 Gaussian (sigma 7/6), plus the local deviation map.
std::pair<Plane, Plane> mscn(const Plane& img) {
  static const auto k = detail::gaussian_kernel<double>(7.0 / 6.0, 3);
  std::vector<double> sq(img.v.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = img.v[i] * img.v[i];
  const auto mu = detail::separable_filter(img.v, img.w, img.h, k);
  const auto mu_sq = detail::separable_filter(sq, img.w, img.h, k);
  Plane coeff{img.w, img.h, std::vector<double>(img.v.size())};
  Plane sigma{img.w, img.h, std::vector<double>(img.v.size())};
  for (std::size_t i = 0; i < img.v.size(); ++i) {
    sigma.v[i] = std::sqrt(std::fabs(mu_sq[i] - mu[i] * mu[i]));
    coeff.v[i] = (img.v[i] - mu[i]) / (sigma.v[i] + 1.0);
  }
  return {std::move(coeff), std::move(sigma)};
}

void patch_features(const Plane& coeff, std::size_t x0, std::size_t y0, std::size_t p, double* out) {
  std::vector<double> values;
  values.reserve(p * p);
  for (std::size_t y = 0; y < p; ++y) {
    for (std::size_t x = 0; x < p; ++x) values.push_back(coeff.at(x0 + x, y0 + y));
  }
  const AggdFit base = fit_aggd(values);
  out[0] = base.alpha;
  out[1] = (base.left * base.left + base.right * base.right) / 2.0;

  // Horizontal, vertical, main-diagonal and anti-diagonal neighbour products.
  constexpr std::array<std::array<int, 2>, 4> shifts{{{1, 0}, {0, 1}, {1, 1}, {-1, 1}}};
  for (std::size_t s = 0; s < shifts.size(); ++s) {
    const int dx = shifts[s][0], dy = shifts[s][1];
    std::vector<double> prod;
    prod.reserve(p * p);
    for (std::size_t y = 0; y + dy < p; ++y) {
      for (std::size_t x = dx < 0 ? 1 : 0; x < p && (dx <= 0 || x + 1 < p); ++x) {
        prod.push_back(coeff.at(x0 + x, y0 + y) * coeff.at(x0 + x + dx, y0 + y + dy));
      }
    }
    const AggdFit f = fit_aggd(prod);
    const double eta = (f.right - f.left) * std::tgamma(2.0 / f.alpha) / std::tgamma(1.0 / f.alpha);
    double* o = out + 2 + 4 * s;
    o[0] = f.alpha;
    o[1] = eta;
    o[2] = f.left * f.left;
    o[3] = f.right * f.right;
  }
}

Plane luminance_255(const RgbImage& img, std::size_t w, std::size_t h) {
  const ImagePlane lum = luminance(img);
  Plane out{w, h, std::vector<double>(w * h)};
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) out.v[y * w + x] = 255.0 * lum(x, y);
  }
  return out;
}

Plane half(const Plane& img) {
  Plane out{img.w / 2, img.h / 2, {}};
  out.v.resize(out.w * out.h);
  for (std::size_t y = 0; y < out.h; ++y) {
    for (std::size_t x = 0; x < out.w; ++x) {
      out.v[y * out.w + x] =
          0.25 * (img.at(2 * x, 2 * y) + img.at(2 * x + 1, 2 * y) + img.at(2 * x, 2 * y + 1) + img.at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

struct PatchSet {
  Eigen::MatrixXd features;  // one row per patch
  std::vector<double> sharpness;
};

PatchSet extract(const RgbImage& img, std::size_t p) {
  if (p < 8 || p % 2 != 0) throw ArgumentError("NIQE patch size must be even and at least 8");
  const std::size_t cols = img.width() / p, rows = img.height() / p;
  if (cols == 0 || rows == 0) {
    throw ArgumentError("image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                        " is smaller than one " + std::to_string(p) + "px NIQE patch");
  }
  const Plane full = luminance_255(img, cols * p, rows * p);
  const auto [coeff1, sigma1] = mscn(full);
  const auto [coeff2, sigma2] = mscn(half(full));
  PatchSet set;
  set.features.resize(static_cast<Eigen::Index>(rows * cols), kNiqeFeatureCount);
  std::array<double, kNiqeFeatureCount> row{};
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      patch_features(coeff1, c * p, r * p, p, row.data());
      patch_features(coeff2, c * p / 2, r * p / 2, p / 2, row.data() + kNiqeFeatureCount / 2);
      const auto idx = static_cast<Eigen::Index>(r * cols + c);
      for (std::size_t f = 0; f < kNiqeFeatureCount; ++f) set.features(idx, static_cast<Eigen::Index>(f)) = row[f];
      double sharp = 0.0;
      for (std::size_t y = 0; y < p; ++y) {
        for (std::size_t x = 0; x < p; ++x) sharp += sigma1.at(c * p + x, r * p + y);
      }
      set.sharpness.push_back(sharp / static_cast<double>(p * p));
    }
  }
  return set;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> gaussian_fit(const Eigen::MatrixXd& rows) {
  Eigen::VectorXd mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - mean.transpose();
  const double denom = rows.rows() > 1 ? static_cast<double>(rows.rows() - 1) : 1.0;
  Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;
  return {std::move(mean), 0.5 * (cov + cov.transpose())};
}

}  // namespace

Eigen::MatrixXd niqe_patch_features(const RgbImage& img, std::size_t patch_size) {
  return extract(img, patch_size).features;
}

NiqeModel niqe_fit(const std::vector<RgbImage>& corpus, const NiqeOptions& opts) {
  if (corpus.size() < kNiqeMinCorpus) {
    throw ArgumentError("NIQE corpus needs at least " + std::to_string(kNiqeMinCorpus) + " images, got " +
                        std::to_string(corpus.size()));
  }
  std::vector<PatchSet> sets;
  double max_sharp = 0.0;
  for (const auto& img : corpus) {
    sets.push_back(extract(img, opts.patch_size));
    for (double s : sets.back().sharpness) max_sharp = std::max(max_sharp, s);
  }
  const double cutoff = opts.sharpness_threshold * max_sharp;
  std::vector<Eigen::VectorXd> kept;
  for (const auto& set : sets) {
    for (std::size_t i = 0; i < set.sharpness.size(); ++i) {
      if (set.sharpness[i] >= cutoff) kept.push_back(set.features.row(static_cast<Eigen::Index>(i)).transpose());
    }
  }
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(kept.size()), kNiqeFeatureCount);
  for (std::size_t i = 0; i < kept.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = kept[i].transpose();
  auto [mean, cov] = gaussian_fit(rows);
  cov.diagonal().array() += opts.regularization;
  return {std::move(mean), std::move(cov), opts.patch_size, opts.corpus_id};
}

double niqe_score(const RgbImage& img, const NiqeModel& model, double regularization) {
  if (model.mean.size() != static_cast<Eigen::Index>(kNiqeFeatureCount)) throw ArgumentError("malformed NIQE model");
  const ImagePlane lum = luminance(img);
  const auto [lo, hi] = std::minmax_element(lum.data().begin(), lum.data().end());
  if (lo == hi || *lo == *hi) throw NumericError("degenerate image statistics: constant image");
  const PatchSet set = extract(img, model.patch_size);
  if (set.features.rows() < 2) throw ArgumentError("NIQE scoring needs at least two patches");
  if (!set.features.allFinite()) throw NumericError("degenerate image statistics: non-finite NIQE features");
  const auto [mean, cov] = gaussian_fit(set.features);
  Eigen::MatrixXd pooled = 0.5 * (model.cov + cov);
  pooled.diagonal().array() += regularization;
  const Eigen::VectorXd diff = model.mean - mean;
  const Eigen::MatrixXd inv = pooled.completeOrthogonalDecomposition().pseudoInverse();
  const double d2 = diff.dot(inv * diff);
  return std::sqrt(std::max(d2, 0.0));
}

void save_niqe_model(const NiqeModel& model, const std::filesystem::path& path) {
  const auto n = static_cast<std::size_t>(model.mean.size());
  std::vector<StoredTensor> tensors;
  tensors.push_back({"niqe.mean", {n}, std::vector<float>(model.mean.data(), model.mean.data() + n)});
  std::vector<float> cov(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      cov[r * n + c] = static_cast<float>(model.cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
  }
  tensors.push_back({"niqe.cov", {n, n}, std::move(cov)});
  tensors.push_back({"niqe.patch_size", {1}, {static_cast<float>(model.patch_size)}});
  tensors.push_back({"niqe.corpus." + model.corpus_id, {0}, {}});
  write_tensor_file(path, tensors);
}

NiqeModel load_niqe_model(const std::filesystem::path& path) {
  NiqeModel model;
  const StoredTensor* mean = nullptr;
  const StoredTensor* cov = nullptr;
  const auto tensors = read_tensor_file(path);
  const std::string corpus_prefix = "niqe.corpus.";
  for (const auto& t : tensors) {
    if (t.name == "niqe.mean") mean = &t;
    if (t.name == "niqe.cov") cov = &t;
    if (t.name == "niqe.patch_size" && t.data.size() == 1) model.patch_size = static_cast<std::size_t>(t.data[0]);
    if (t.name.rfind(corpus_prefix, 0) == 0) model.corpus_id = t.name.substr(corpus_prefix.size());
  }
  if (!mean || !cov) throw CheckpointError("'" + path.string() + "' holds no NIQE model (niqe.mean/niqe.cov)");
  const std::size_t n = mean->data.size();
  if (cov->shape != ag::Shape{n, n}) throw CheckpointError("shape mismatch for tensor 'niqe.cov'");
  if (model.patch_size == 0) throw CheckpointError("'" + path.string() + "' lacks tensor 'niqe.patch_size'");
  model.mean = Eigen::VectorXd(static_cast<Eigen::Index>(n));
  model.cov = Eigen::MatrixXd(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) model.mean(static_cast<Eigen::Index>(i)) = mean->data[i];
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      model.cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cov->data[r * n + c];
    }
  }
  return model;
}

}  // namespace lle
