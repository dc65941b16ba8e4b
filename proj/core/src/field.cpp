#include "panodrag/field.hpp"

#include <cmath>

#include "panodrag/error.hpp"

namespace panodrag::field {

FeatureField::FeatureField(int w, int h, int c, int s, double fill)
    : width(w), height(h), dim(c), factor(s) {
  if (w <= 0 || h <= 0 || c <= 0 || s <= 0)
    fail(ErrorKind::kInvalidArgument, "field dimensions must be positive");
  data.assign(static_cast<std::size_t>(w) * h * c, fill);
}

FeatureField build_field(const img::ErpImage& img, int s) {
  img::require_erp_shape(img);
  if (s <= 0 || img.width % s != 0 || img.height % s != 0)
    fail(ErrorKind::kInvalidArgument, "downsample factor must divide both dimensions");
  const int w = img.width / s, h = img.height / s, c = img.channels;
  FeatureField f(w, h, c, s);
  const double inv = 1.0 / (static_cast<double>(s) * s);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int k = 0; k < c; ++k) {
        double acc = 0.0;
        for (int dj = 0; dj < s; ++dj)
          for (int di = 0; di < s; ++di)
            acc += img.at(x * s + di, y * s + dj, k);
        f.at(x, y, k) = acc * inv;
      }
  return f;
}

BilinearStencil bilinear_stencil(const FeatureField& f, double x, double y) {
  const int w = f.width, h = f.height;
  double fx = std::floor(x), fy = std::floor(y);
  auto wrap = [w](int i) {
    int r = i % w;
    return r < 0 ? r + w : r;
  };
  auto clamp = [h](int j) { return j < 0 ? 0 : (j >= h ? h - 1 : j); };
  BilinearStencil st;
  st.tx = x - fx;
  st.ty = y - fy;
  st.x0 = wrap(static_cast<int>(fx));
  st.x1 = st.x0 + 1 == w ? 0 : st.x0 + 1;
  st.y0 = clamp(static_cast<int>(fy));
  st.y1 = clamp(static_cast<int>(fy) + 1);
  st.in_bounds = y >= 0.0 && y <= h - 1.0;
  return st;
}

bool sample_feature(const FeatureField& f, double x, double y, double* out) {
  const BilinearStencil st = bilinear_stencil(f, x, y);
  const double* p00 = &f.data[f.index(st.x0, st.y0, 0)];
  const double* p10 = &f.data[f.index(st.x1, st.y0, 0)];
  const double* p01 = &f.data[f.index(st.x0, st.y1, 0)];
  const double* p11 = &f.data[f.index(st.x1, st.y1, 0)];
  for (int k = 0; k < f.dim; ++k) {
    double top = p00[k] + st.tx * (p10[k] - p00[k]);
    double bot = p01[k] + st.tx * (p11[k] - p01[k]);
    out[k] = top + st.ty * (bot - top);
  }
  return st.in_bounds;
}

img::MaskImage downsample_mask(const img::MaskImage& mask, int s) {
  img::require_erp_shape(mask);
  if (s <= 0 || mask.width % s != 0 || mask.height % s != 0)
    fail(ErrorKind::kInvalidArgument, "downsample factor must divide both dimensions");
  const int w = mask.width / s, h = mask.height / s;
  img::MaskImage out(w, h);
  const int half = s * s;  // majority threshold: 2*count >= s*s, ties editable
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int count = 0;
      for (int dj = 0; dj < s; ++dj)
        for (int di = 0; di < s; ++di) count += mask.at(x * s + di, y * s + dj);
      out.at(x, y) = (2 * count >= half) ? 1 : 0;
    }
  return out;
}

}  // namespace panodrag::field
