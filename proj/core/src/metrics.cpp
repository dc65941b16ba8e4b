#include "panodrag/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "panodrag/error.hpp"

namespace panodrag::metrics {

namespace {

using MatrixMap = Eigen::Map<const Eigen::MatrixXd>;

// Clamp-at-edges bilinear sample on a square planar image (no seam wrap).
double planar_sample(const repro::PlanarImage& img, double x, double y, int c) {
  double cx = std::clamp(x, 0.0, double(img.size - 1));
  double cy = std::clamp(y, 0.0, double(img.size - 1));
  int x0 = static_cast<int>(std::floor(cx));
  int y0 = static_cast<int>(std::floor(cy));
  int x1 = std::min(x0 + 1, img.size - 1);
  int y1 = std::min(y0 + 1, img.size - 1);
  double tx = cx - x0, ty = cy - y0;
  double top = img.at(x0, y0, c) + tx * (img.at(x1, y0, c) - img.at(x0, y0, c));
  double bot = img.at(x0, y1, c) + tx * (img.at(x1, y1, c) - img.at(x0, y1, c));
  return top + ty * (bot - top);
}

// Fixed projection for (seed, in_dim, out_dim): out_dim x in_dim Gaussian
// entries scaled by 1/sqrt(in_dim) so descriptor variance stays O(1).
std::vector<double> projection_matrix(std::uint64_t seed, int in_dim, int out_dim) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(double(in_dim)));
  std::vector<double> p(static_cast<std::size_t>(out_dim) * in_dim);
  for (double& v : p) v = gauss(rng);
  return p;
}

constexpr int kCellSamples = 4;  // per axis; descriptor input = 16 * channels

std::vector<double> cell_features(const repro::PlanarImage& img,
                                  std::uint64_t seed, int grid, int out_dim) {
  if (img.size < grid)
    fail(ErrorKind::kInvalidArgument, "spatial_features: image smaller than grid");
  if (img.channels < 1 || img.size < 1)
    fail(ErrorKind::kInvalidArgument, "spatial_features: empty image");
  const int in_dim = kCellSamples * kCellSamples * img.channels;
  const std::vector<double> proj = projection_matrix(seed, in_dim, out_dim);
  std::vector<double> out(static_cast<std::size_t>(grid) * grid * out_dim);
  std::vector<double> patch(in_dim);
  const double cell = double(img.size) / grid;
  for (int gy = 0; gy < grid; ++gy)
    for (int gx = 0; gx < grid; ++gx) {
      int k = 0;
      for (int sy = 0; sy < kCellSamples; ++sy)
        for (int sx = 0; sx < kCellSamples; ++sx) {
          double x = (gx + (sx + 0.5) / kCellSamples) * cell - 0.5;
          double y = (gy + (sy + 0.5) / kCellSamples) * cell - 0.5;
          for (int c = 0; c < img.channels; ++c)
            patch[k++] = planar_sample(img, x, y, c);
        }
      double* dst = out.data() + (static_cast<std::size_t>(gy) * grid + gx) * out_dim;
      for (int r = 0; r < out_dim; ++r) {
        double acc = 0.0;
        const double* row = proj.data() + static_cast<std::size_t>(r) * in_dim;
        for (int q = 0; q < in_dim; ++q) acc += row[q] * patch[q];
        dst[r] = acc;
      }
    }
  return out;
}

// Eigenvalues below -1e-8 are a contract violation; the band [-1e-8, 0) is
// rounding debris and clips to zero.
constexpr double kPsdTol = 1e-8;

Eigen::VectorXd clipped_eigenvalues(const Eigen::VectorXd& ev, const char* who) {
  Eigen::VectorXd out = ev;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] < -kPsdTol)
      fail(ErrorKind::kNotPsd, std::string(who) + ": eigenvalue below -1e-8");
    if (out[i] < 0.0) out[i] = 0.0;
  }
  return out;
}

}  // namespace

double default_distance(const repro::PlanarImage& a, const repro::PlanarImage& b) {
  if (a.size != b.size || a.channels != b.channels)
    fail(ErrorKind::kDimensionMismatch, "default_distance: image shapes differ");
  if (a.data.empty())
    fail(ErrorKind::kInvalidArgument, "default_distance: empty image");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    sum += std::abs(a.data[i] - b.data[i]);
  return sum / double(a.data.size());
}

double image_fidelity(
    const std::vector<std::pair<repro::PlanarImage, repro::PlanarImage>>& pairs,
    const PairDistance& dist) {
  if (pairs.empty())
    fail(ErrorKind::kInvalidArgument, "image_fidelity: no pairs");
  double sum = 0.0;
  for (const auto& [orig, edit] : pairs) {
    double d = dist(orig, edit);
    if (!(d >= 0.0 && d <= 1.0))
      fail(ErrorKind::kInvalidMetric, "image_fidelity: distance outside [0,1]");
    sum += d;
  }
  return 1.0 - sum / double(pairs.size());
}

GaussianStats gaussian_stats(const std::vector<std::vector<double>>& features) {
  if (features.size() < 2)
    fail(ErrorKind::kInsufficientSamples, "gaussian_stats: need >= 2 samples");
  const int dim = static_cast<int>(features.front().size());
  const int n = static_cast<int>(features.size());
  if (dim == 0)
    fail(ErrorKind::kInvalidArgument, "gaussian_stats: zero-dimensional features");
  for (const auto& f : features)
    if (static_cast<int>(f.size()) != dim)
      fail(ErrorKind::kDimensionMismatch, "gaussian_stats: ragged feature list");

  GaussianStats s;
  s.dim = dim;
  s.n = n;
  s.mean.assign(dim, 0.0);
  for (const auto& f : features)
    for (int i = 0; i < dim; ++i) s.mean[i] += f[i];
  for (int i = 0; i < dim; ++i) s.mean[i] /= double(n);

  const double scale = 1.0 / std::sqrt(double(n - 1));
  s.centered.resize(static_cast<std::size_t>(dim) * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < dim; ++i)
      s.centered[static_cast<std::size_t>(k) * dim + i] =
          (features[k][i] - s.mean[i]) * scale;

  MatrixMap c(s.centered.data(), dim, n);
  Eigen::MatrixXd cov = c * c.transpose();
  cov = ((cov + cov.transpose()) * 0.5).eval();
  s.cov.assign(cov.data(), cov.data() + cov.size());
  return s;
}

std::vector<double> matrix_sqrt_psd(const std::vector<double>& cov, int dim) {
  if (static_cast<int>(cov.size()) != dim * dim || dim < 1)
    fail(ErrorKind::kDimensionMismatch, "matrix_sqrt_psd: not dim x dim");
  MatrixMap m(cov.data(), dim, dim);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    fail(ErrorKind::kInvalidArgument, "matrix_sqrt_psd: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  Eigen::VectorXd ev = clipped_eigenvalues(eig.eigenvalues(), "matrix_sqrt_psd");
  Eigen::MatrixXd root = eig.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
                         eig.eigenvectors().transpose();
  root = ((root + root.transpose()) * 0.5).eval();
  return {root.data(), root.data() + root.size()};
}

double frechet_distance(const GaussianStats& s1, const GaussianStats& s2) {
  if (s1.dim != s2.dim || s1.dim < 1)
    fail(ErrorKind::kDimensionMismatch, "frechet_distance: dimension mismatch");
  const int dim = s1.dim;
  double mean_sq = 0.0;
  for (int i = 0; i < dim; ++i) {
    double d = s1.mean[i] - s2.mean[i];
    mean_sq += d * d;
  }

  double trace_root;
  double tr1, tr2;
  const bool factored = !s1.centered.empty() && !s2.centered.empty();
  if (factored) {
    MatrixMap c1(s1.centered.data(), dim, s1.n);
    MatrixMap c2(s2.centered.data(), dim, s2.n);
    tr1 = c1.squaredNorm();
    tr2 = c2.squaredNorm();
    // Nonzero eigenvalues of sqrt(S1)*S2*sqrt(S1) equal those of
    // (C1^T C2)(C1^T C2)^T, so the sandwich-root trace is the singular
    // value sum of the n1 x n2 cross-Gram. SVD of the factor, not
    // eigendecomposition of its square: squaring doubles the error of the
    // near-zero spectrum and the square root then inflates it.
    Eigen::MatrixXd cross = c1.transpose() * c2;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross);
    trace_root = svd.singularValues().sum();
  } else {
    if (static_cast<int>(s1.cov.size()) != dim * dim ||
        static_cast<int>(s2.cov.size()) != dim * dim)
      fail(ErrorKind::kDimensionMismatch, "frechet_distance: covariance shape");
    MatrixMap m1(s1.cov.data(), dim, dim);
    MatrixMap m2(s2.cov.data(), dim, dim);
    tr1 = m1.trace();
    tr2 = m2.trace();
    std::vector<double> root1 = matrix_sqrt_psd(s1.cov, dim);
    MatrixMap r1(root1.data(), dim, dim);
    // Validates PSD of s2 as the contract requires even though only the
    // sandwich spectrum is consumed.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check2(m2);
    clipped_eigenvalues(check2.eigenvalues(), "frechet_distance");
    Eigen::MatrixXd sandwich = r1 * m2 * r1;
    sandwich = ((sandwich + sandwich.transpose()) * 0.5).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sandwich);
    Eigen::VectorXd ev = clipped_eigenvalues(eig.eigenvalues(), "frechet_distance");
    trace_root = ev.cwiseSqrt().sum();
  }

  double fd = mean_sq + tr1 + tr2 - 2.0 * trace_root;
  if (fd < -kPsdTol)
    fail(ErrorKind::kNotPsd, "frechet_distance: negative beyond tolerance");
  return std::max(fd, 0.0);
}

std::vector<double> spatial_features(const repro::PlanarImage& img,
                                     std::uint64_t seed, int grid, int out_dim) {
  if (grid < 1 || out_dim < 1)
    fail(ErrorKind::kInvalidArgument, "spatial_features: grid/out_dim < 1");
  return cell_features(img, seed, grid, out_dim);
}

std::vector<double> global_features(const repro::PlanarImage& img,
                                    std::uint64_t seed, int grid, int out_dim) {
  std::vector<double> cells = spatial_features(img, seed, grid, out_dim);
  std::vector<double> pooled(out_dim, 0.0);
  const int ncells = grid * grid;
  for (int c = 0; c < ncells; ++c)
    for (int r = 0; r < out_dim; ++r)
      pooled[r] += cells[static_cast<std::size_t>(c) * out_dim + r];
  for (double& v : pooled) v /= double(ncells);
  return pooled;
}

MetricReport evaluate_metrics(const std::vector<img::ErpImage>& originals,
                              const std::vector<img::ErpImage>& editeds,
                              const std::vector<geom::SphericalCoord>& centers,
                              const std::vector<int>& fovs_deg,
                              std::uint64_t seed, int out_size) {
  if (originals.size() != editeds.size() || originals.size() != centers.size())
    fail(ErrorKind::kDimensionMismatch, "evaluate_metrics: set sizes differ");
  if (originals.empty())
    fail(ErrorKind::kInvalidArgument, "evaluate_metrics: no image pairs");
  if (fovs_deg.empty())
    fail(ErrorKind::kInvalidArgument, "evaluate_metrics: no FOVs");
  if (originals.size() < 2)
    fail(ErrorKind::kInsufficientSamples,
         "evaluate_metrics: FID needs >= 2 pairs");

  MetricReport report;
  report.seed = seed;
  for (int fov : fovs_deg) {
    std::vector<std::pair<repro::PlanarImage, repro::PlanarImage>> views;
    views.reserve(originals.size());
    for (std::size_t i = 0; i < originals.size(); ++i) {
      repro::PerspectiveSpec spec;
      spec.center = centers[i];
      spec.fov_deg = double(fov);
      spec.out_size = out_size;
      views.emplace_back(repro::extract_perspective(originals[i], spec),
                         repro::extract_perspective(editeds[i], spec));
    }
    FovMetrics fm;
    fm.if_score = image_fidelity(views);
    std::vector<std::vector<double>> go, ge, so, se;
    for (const auto& [vo, veh] : views) {
      go.push_back(global_features(vo, seed));
      ge.push_back(global_features(veh, seed));
      so.push_back(spatial_features(vo, seed));
      se.push_back(spatial_features(veh, seed));
    }
    fm.fid = frechet_distance(gaussian_stats(go), gaussian_stats(ge));
    fm.sfid = frechet_distance(gaussian_stats(so), gaussian_stats(se));
    if (!std::isfinite(fm.if_score) || !std::isfinite(fm.fid) ||
        !std::isfinite(fm.sfid))
      fail(ErrorKind::kInvalidMetric, "evaluate_metrics: non-finite metric");
    report.per_fov[fov] = fm;
  }
  for (const auto& [fov, fm] : report.per_fov) {
    report.if_score += fm.if_score;
    report.fid += fm.fid;
    report.sfid += fm.sfid;
  }
  const double nf = double(report.per_fov.size());
  report.if_score /= nf;
  report.fid /= nf;
  report.sfid /= nf;
  return report;
}

}  // namespace panodrag::metrics
