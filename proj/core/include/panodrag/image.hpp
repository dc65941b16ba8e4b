// Equirectangular raster types and sampling.
//
// Images store interleaved row-major doubles in [0,1]; masks store {0,1}
// bytes. Sampling follows the ERP topology: columns wrap around the seam,
// rows clamp at the poles. Bilinear interpolation uses the two-lerp form
// a + t*(b - a), which reproduces constant regions bit-exactly.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace panodrag::img {

struct ErpImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;

  ErpImage() = default;
  ErpImage(int w, int h, int c, double fill = 0.0);

  std::size_t index(int i, int j, int c) const {
    return (static_cast<std::size_t>(j) * width + i) * channels + c;
  }
  double at(int i, int j, int c) const { return data[index(i, j, c)]; }
  double& at(int i, int j, int c) { return data[index(i, j, c)]; }
};

struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  MaskImage() = default;
  MaskImage(int w, int h, std::uint8_t fill = 0);

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * width + i;
  }
  std::uint8_t at(int i, int j) const { return data[index(i, j)]; }
  std::uint8_t& at(int i, int j) { return data[index(i, j)]; }

  // Spherical area of the set bits: sum of cos(lat) * (2pi/W) * (pi/H).
  double spherical_area() const;
};

// Shape checks shared by the resampling ops. W = 2H and non-empty.
void require_erp_shape(const ErpImage& img);
void require_erp_shape(const MaskImage& mask);

// Full value validation (finite, in range / strictly binary); used at IO
// and synthesis boundaries where data enters the system.
void validate_values(const ErpImage& img);
void validate_values(const MaskImage& mask);

// Bilinear sample at continuous pixel coordinates; writes channels values
// to out. Columns wrap mod W, rows clamp to [0, H-1].
void bilinear_sample(const ErpImage& img, double x, double y, double* out);

// Nearest-neighbor sample with the same wrap/clamp rules.
std::uint8_t nearest_sample(const MaskImage& mask, double x, double y);

// Peak signal-to-noise ratio in dB for unit-range images (peak = 1.0).
// Identical images return infinity.
double psnr(const ErpImage& a, const ErpImage& b);

// Binary PPM (P6) for 3-channel images, binary PGM (P5) for masks.
// Writes quantize with round-half-to-even at maxval 255; mask reads treat
// any nonzero byte as 1.
void save_ppm(const ErpImage& img, const std::string& path);
ErpImage load_ppm(const std::string& path);
void save_pgm(const MaskImage& mask, const std::string& path);
MaskImage load_pgm(const std::string& path);

}  // namespace panodrag::img
