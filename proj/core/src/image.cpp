#include "panodrag/image.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>

#include "panodrag/error.hpp"
#include "panodrag/geom.hpp"

namespace panodrag::img {

namespace {

int wrap_i(int i, int w) {
  int r = i % w;
  return r < 0 ? r + w : r;
}

int clamp_j(int j, int h) { return j < 0 ? 0 : (j >= h ? h - 1 : j); }

}  // namespace

ErpImage::ErpImage(int w, int h, int c, double fill)
    : width(w), height(h), channels(c) {
  if (w <= 0 || h <= 0 || c <= 0)
    fail(ErrorKind::kInvalidArgument, "image dimensions must be positive");
  data.assign(static_cast<std::size_t>(w) * h * c, fill);
}

MaskImage::MaskImage(int w, int h, std::uint8_t fill) : width(w), height(h) {
  if (w <= 0 || h <= 0)
    fail(ErrorKind::kInvalidArgument, "mask dimensions must be positive");
  data.assign(static_cast<std::size_t>(w) * h, fill);
}

double MaskImage::spherical_area() const {
  require_erp_shape(*this);
  const double cell = (geom::kTwoPi / width) * (geom::kPi / height);
  double area = 0.0;
  for (int j = 0; j < height; ++j) {
    double lat = geom::kHalfPi - (static_cast<double>(j) / height) * geom::kPi;
    double row = 0.0;
    for (int i = 0; i < width; ++i) row += at(i, j);
    area += row * std::cos(lat) * cell;
  }
  return area;
}

void require_erp_shape(const ErpImage& img) {
  if (img.width <= 0 || img.height <= 0 || img.channels <= 0)
    fail(ErrorKind::kValidation, "empty image");
  if (img.width != 2 * img.height)
    fail(ErrorKind::kValidation, "equirectangular image requires W = 2H");
  if (img.data.size() !=
      static_cast<std::size_t>(img.width) * img.height * img.channels)
    fail(ErrorKind::kValidation, "image buffer size mismatch");
}

void require_erp_shape(const MaskImage& mask) {
  if (mask.width <= 0 || mask.height <= 0)
    fail(ErrorKind::kValidation, "empty mask");
  if (mask.width != 2 * mask.height)
    fail(ErrorKind::kValidation, "equirectangular mask requires W = 2H");
  if (mask.data.size() != static_cast<std::size_t>(mask.width) * mask.height)
    fail(ErrorKind::kValidation, "mask buffer size mismatch");
}

void validate_values(const ErpImage& img) {
  require_erp_shape(img);
  for (double v : img.data)
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      fail(ErrorKind::kValidation, "image values must be finite and in [0,1]");
}

void validate_values(const MaskImage& mask) {
  require_erp_shape(mask);
  for (std::uint8_t v : mask.data)
    if (v > 1) fail(ErrorKind::kValidation, "mask values must be 0 or 1");
}

void bilinear_sample(const ErpImage& img, double x, double y, double* out) {
  const int w = img.width, h = img.height, c = img.channels;
  double fx = std::floor(x), fy = std::floor(y);
  double tx = x - fx, ty = y - fy;
  int i0 = wrap_i(static_cast<int>(fx), w);
  int i1 = i0 + 1 == w ? 0 : i0 + 1;
  int j0 = clamp_j(static_cast<int>(fy), h);
  int j1 = clamp_j(static_cast<int>(fy) + 1, h);
  const double* p00 = &img.data[img.index(i0, j0, 0)];
  const double* p10 = &img.data[img.index(i1, j0, 0)];
  const double* p01 = &img.data[img.index(i0, j1, 0)];
  const double* p11 = &img.data[img.index(i1, j1, 0)];
  for (int k = 0; k < c; ++k) {
    double top = p00[k] + tx * (p10[k] - p00[k]);
    double bot = p01[k] + tx * (p11[k] - p01[k]);
    out[k] = top + ty * (bot - top);
  }
}

std::uint8_t nearest_sample(const MaskImage& mask, double x, double y) {
  int i = wrap_i(static_cast<int>(std::floor(x + 0.5)), mask.width);
  int j = clamp_j(static_cast<int>(std::floor(y + 0.5)), mask.height);
  return mask.at(i, j);
}

double psnr(const ErpImage& a, const ErpImage& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    fail(ErrorKind::kDimensionMismatch, "psnr requires matching shapes");
  double se = 0.0;
  for (std::size_t k = 0; k < a.data.size(); ++k) {
    double d = a.data[k] - b.data[k];
    se += d * d;
  }
  if (se == 0.0) return std::numeric_limits<double>::infinity();
  double mse = se / static_cast<double>(a.data.size());
  return -10.0 * std::log10(mse);
}

namespace {

std::uint8_t quantize(double v) {
  double s = v * 255.0;
  if (s <= 0.0) return 0;
  if (s >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::nearbyint(s));
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

void read_header(std::istream& in, const char* magic, int& w, int& h) {
  if (next_token(in) != magic)
    fail(ErrorKind::kIo, std::string("expected ") + magic + " header");
  try {
    w = std::stoi(next_token(in));
    h = std::stoi(next_token(in));
    if (std::stoi(next_token(in)) != 255)
      fail(ErrorKind::kIo, "only maxval 255 is supported");
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorKind::kIo, "malformed image header");
  }
  if (w <= 0 || h <= 0) fail(ErrorKind::kIo, "non-positive image dimensions");
}

}  // namespace

void save_ppm(const ErpImage& img, const std::string& path) {
  if (img.channels != 3)
    fail(ErrorKind::kInvalidArgument, "save_ppm requires 3 channels");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path + " for writing");
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * 3);
  for (int j = 0; j < img.height; ++j) {
    for (int i = 0; i < img.width; ++i)
      for (int c = 0; c < 3; ++c)
        row[static_cast<std::size_t>(i) * 3 + c] = quantize(img.at(i, j, c));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  if (!out) fail(ErrorKind::kIo, "failed writing " + path);
}

ErpImage load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path);
  int w = 0, h = 0;
  read_header(in, "P6", w, h);
  ErpImage img(w, h, 3);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * 3);
  for (int j = 0; j < h; ++j) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size()));
    if (!in) fail(ErrorKind::kIo, "truncated pixel data in " + path);
    for (int i = 0; i < w; ++i)
      for (int c = 0; c < 3; ++c)
        img.at(i, j, c) = row[static_cast<std::size_t>(i) * 3 + c] / 255.0;
  }
  return img;
}

void save_pgm(const MaskImage& mask, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path + " for writing");
  out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  std::vector<std::uint8_t> row(static_cast<std::size_t>(mask.width));
  for (int j = 0; j < mask.height; ++j) {
    for (int i = 0; i < mask.width; ++i)
      row[static_cast<std::size_t>(i)] = mask.at(i, j) ? 255 : 0;
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  if (!out) fail(ErrorKind::kIo, "failed writing " + path);
}

MaskImage load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path);
  int w = 0, h = 0;
  read_header(in, "P5", w, h);
  MaskImage mask(w, h);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(w));
  for (int j = 0; j < h; ++j) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size()));
    if (!in) fail(ErrorKind::kIo, "truncated pixel data in " + path);
    for (int i = 0; i < w; ++i) mask.at(i, j) = row[i] ? 1 : 0;
  }
  return mask;
}

}  // namespace panodrag::img
