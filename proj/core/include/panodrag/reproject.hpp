// Adaptive reprojection: recentering a drag case so the edit region sits
// away from the seam and poles, plus the inverse mapping back, and
// perspective extraction for evaluation.
//
// Alignment rotates the whole case so the first pair's spherical midpoint
// lands on target_lon (longitude only by default; keep_lat=false also
// zeroes its latitude). Images resample bilinearly, masks nearest-neighbor,
// points rotate analytically, so point geometry is exact while rasters pay
// one interpolation.

#pragma once

#include <string>
#include <vector>

#include "panodrag/geom.hpp"
#include "panodrag/image.hpp"

namespace panodrag::repro {

using geom::Mat3;
using geom::PixelCoord;
using geom::SphericalCoord;

struct PointPair {
  PixelCoord handle;
  PixelCoord target;
};

struct DragCase {
  img::ErpImage image;
  img::MaskImage mask;
  std::vector<PointPair> pairs;
  std::string id;
};

struct AlignmentRecord {
  Mat3 rotation;
  double target_lon = 0.0;
  bool keep_lat = true;
  SphericalCoord midpoint_before{0.0, 0.0};
  SphericalCoord midpoint_after{0.0, 0.0};
};

struct PerspectiveSpec {
  SphericalCoord center{0.0, 0.0};
  double fov_deg = 90.0;
  int out_size = 512;
};

// Planar output of extract_perspective (square, not ERP-shaped).
struct PlanarImage {
  int size = 0;
  int channels = 0;
  std::vector<double> data;
  double at(int u, int v, int c) const {
    return data[(static_cast<std::size_t>(v) * size + u) * channels + c];
  }
};

// Structural validation of a case: ERP shapes match, >= 1 pair, points in
// bounds, handle != target per pair.
void validate_case(const DragCase& c);

// Shortest-arc midpoint normalize(P_han + P_tar) in spherical coordinates.
// Robust across the seam, unlike averaging pixel columns.
SphericalCoord spherical_midpoint(PixelCoord handle, PixelCoord target, int w, int h);

// Exact analytic rotation of a pixel coordinate. A result within 1e-12 of
// a pole has no well-defined longitude; the flag reports it and the
// returned pixel uses lon = 0.
PixelCoord rotate_point(PixelCoord p, const Mat3& r, int w, int h,
                        bool* at_pole = nullptr);

// Inverse-mapping resample of a full panorama: each output pixel samples
// the source at R^T of its sphere point. Identity rotations copy the
// buffer so aligned-already cases are bit-identical.
img::ErpImage rotate_erp_image(const img::ErpImage& img, const Mat3& r);
img::MaskImage rotate_erp_mask(const img::MaskImage& mask, const Mat3& r);

// Rotates image, mask, and all point pairs by the alignment rotation of
// the FIRST pair's midpoint. Returns the aligned case and the record
// needed to undo it.
std::pair<DragCase, AlignmentRecord> align_case(const DragCase& c,
                                                double target_lon = 0.0,
                                                bool keep_lat = true);

// Applies the transpose rotation; align then inverse_align restores point
// coordinates exactly and images up to resampling error.
DragCase inverse_align(const DragCase& c, const AlignmentRecord& rec);

// Gnomonic (pinhole) view: square frustum of fov_deg centered on
// spec.center, bilinear sampling with seam wrap. Output row v
// increases downward; the frame center (size/2, size/2) lies on the
// optical axis.
PlanarImage extract_perspective(const img::ErpImage& img, const PerspectiveSpec& spec);

}  // namespace panodrag::repro
