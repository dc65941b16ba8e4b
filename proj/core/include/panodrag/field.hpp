// Feature fields: the optimization substrate for drag editing.
//
// A field is a box-downsampled copy of an ERP image (identity feature
// extractor), so every cell is a C-vector and the cell grid keeps the
// equirectangular topology at reduced resolution.

#pragma once

#include <vector>

#include "panodrag/image.hpp"

namespace panodrag::field {

struct FeatureField {
  int width = 0;    // W' cells
  int height = 0;   // H' cells
  int dim = 0;      // C' feature dimension
  int factor = 1;   // image-to-field downsample ratio s
  std::vector<double> data;

  FeatureField() = default;
  FeatureField(int w, int h, int c, int s, double fill = 0.0);

  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * dim + c;
  }
  double at(int x, int y, int c) const { return data[index(x, y, c)]; }
  double& at(int x, int y, int c) { return data[index(x, y, c)]; }
};

// Box-downsample each channel by s (mean over s x s blocks). s must divide
// both image dimensions; s = 1 copies the image.
FeatureField build_field(const img::ErpImage& img, int s);

// The four cells and weights a continuous position interpolates between;
// columns wrap, rows clamp. in_bounds is false when the vertical
// coordinate had to be clamped.
struct BilinearStencil {
  int x0, y0, x1, y1;
  double tx, ty;  // fractional offsets inside the cell
  bool in_bounds;
};
BilinearStencil bilinear_stencil(const FeatureField& f, double x, double y);

// Bilinear feature lookup at a continuous cell position; columns wrap,
// rows clamp. Writes dim values to out; returns false when the vertical
// coordinate had to be clamped.
bool sample_feature(const FeatureField& f, double x, double y, double* out);

// Mask at field resolution: majority vote over each s x s block, ties
// counted as editable (1).
img::MaskImage downsample_mask(const img::MaskImage& mask, int s);

}  // namespace panodrag::field
