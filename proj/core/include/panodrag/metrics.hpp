// Evaluation statistics: image fidelity over a pluggable pair distance,
// Fréchet distance between feature Gaussians, and the per-FOV report that
// stitches them together over perspective views.
//
// The neural extractors the numbers usually come from are out of scope, so
// the report carries a metric_variant label ("IF/mad+FID/rp64") naming the
// stand-ins: mean absolute difference for the pair distance and a seeded
// 64-dim random projection of grid patches for features. Scores are only
// comparable with the same variant string.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "panodrag/geom.hpp"
#include "panodrag/image.hpp"
#include "panodrag/reproject.hpp"

namespace panodrag::metrics {

// Sample mean and unbiased covariance of a feature set. The centered factor
// C (dim x n, column i = (x_i - mean)/sqrt(n-1)) satisfies cov = C*C^T and
// lets frechet_distance run in O(n^3) instead of O(dim^3) when n << dim.
struct GaussianStats {
  std::vector<double> mean;      // dim
  std::vector<double> cov;       // dim*dim row-major, exactly symmetric
  std::vector<double> centered;  // dim*n column-major factor C
  int dim = 0;
  int n = 0;
};

struct FovMetrics {
  double if_score = 0.0;
  double fid = 0.0;
  double sfid = 0.0;
};

struct MetricReport {
  double if_score = 0.0;  // means over the per-FOV table
  double fid = 0.0;
  double sfid = 0.0;
  std::map<int, FovMetrics> per_fov;  // keyed by FOV degrees
  std::string metric_variant = "IF/mad+FID/rp64";
  std::uint64_t seed = 0;
};

using PairDistance =
    std::function<double(const repro::PlanarImage&, const repro::PlanarImage&)>;

// Mean absolute difference over co-registered samples; 0 iff bit-identical,
// <= 1 on [0,1]-valued images. Errors on dimension mismatch.
double default_distance(const repro::PlanarImage& a, const repro::PlanarImage& b);

// IF = 1 - mean over pairs of dist(original, edited). Errors on an empty
// list or a distance value outside [0,1].
double image_fidelity(
    const std::vector<std::pair<repro::PlanarImage, repro::PlanarImage>>& pairs,
    const PairDistance& dist = default_distance);

// Mean, unbiased covariance (symmetrized), and the centered factor of >= 2
// equal-dimension vectors.
GaussianStats gaussian_stats(const std::vector<std::vector<double>>& features);

// Symmetric PSD square root via eigendecomposition; eigenvalues in
// [-1e-8, 0) clip to 0, below that is a not-PSD error. Row-major dim x dim.
std::vector<double> matrix_sqrt_psd(const std::vector<double>& cov, int dim);

// ||mu1-mu2||^2 + Tr(S1 + S2 - 2*sqrt(sqrt(S1)*S2*sqrt(S1))), clamped >= 0.
// When both stats carry centered factors the trace term is computed exactly
// from the factor cross-Gram; otherwise the dense sandwich form is used.
double frechet_distance(const GaussianStats& s1, const GaussianStats& s2);

// Seeded random-projection features over a fixed grid x grid tiling:
// each cell is resampled to 4x4 points per channel and projected to
// out_dim values. spatial_features concatenates the cells in row-major
// order (out_dim * grid^2 values); global_features mean-pools them into a
// single out_dim vector. Deterministic in (image, seed).
std::vector<double> spatial_features(const repro::PlanarImage& img,
                                     std::uint64_t seed, int grid = 7,
                                     int out_dim = 64);
std::vector<double> global_features(const repro::PlanarImage& img,
                                    std::uint64_t seed, int grid = 7,
                                    int out_dim = 64);

// Per-FOV evaluation: extract views of each original/edited pair at that
// pair's center, then IF over the pairs plus FID (global features) and
// sFID (spatial features) between the two view sets. Needs >= 2 pairs for
// the Gaussians to exist.
MetricReport evaluate_metrics(const std::vector<img::ErpImage>& originals,
                              const std::vector<img::ErpImage>& editeds,
                              const std::vector<geom::SphericalCoord>& centers,
                              const std::vector<int>& fovs_deg,
                              std::uint64_t seed, int out_size = 512);

}  // namespace panodrag::metrics
