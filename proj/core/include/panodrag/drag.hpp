// The drag-editing loop: motion-supervision loss over a feature field,
// its exact subgradient, the latitude-adaptive search region, point
// tracking, and the iterate-until-converged driver.
//
// Two ablation switches mirror the method's components: gcta_enabled
// picks great-circle motion directions over planar ones, ssrt_enabled
// picks the latitude-scaled search region over the fixed square. The
// stop-gradient semantics of the loss are realized by freezing the
// initial field (field0) and by capturing reference features from the
// current field before each step (MotionRefs).

#pragma once

#include <functional>
#include <vector>

#include "panodrag/field.hpp"
#include "panodrag/geom.hpp"
#include "panodrag/image.hpp"

namespace panodrag::drag {

using geom::DirectionVec2;
using geom::PixelCoord;

// Which axis of the search region the 1/cos(lat) factor scales. Vertical
// is the published rule; horizontal is exposed for investigation.
enum class SsrtAxis { kVertical, kHorizontal };

struct DragConfig {
  double lambda = 0.1;    // off-mask preservation weight
  double lr = 0.01;       // gradient step size
  double r_base = 3.0;    // base tracking radius, field cells
  double r0 = 3.0;        // unscaled-axis radius
  int r_motion = 1;       // motion patch radius: (2r+1)^2 cells
  int max_iter = 80;
  double stop_eps = 1.0;  // great-circle stop threshold, field cells
  bool ssrt_enabled = true;
  bool gcta_enabled = true;
  double r_cap = -1.0;    // scaled-axis cap; < 0 means H'/4
  SsrtAxis ssrt_axis = SsrtAxis::kVertical;
};

void validate(const DragConfig& cfg);

struct SearchRegion {
  PixelCoord center{0.0, 0.0};
  double rx = 0.0;  // continuous radii, cells
  double ry = 0.0;
  struct Cell {
    int x;
    int y;
  };
  std::vector<Cell> cells;  // row-major, x wrapped into [0, W')
};

struct DragState {
  int k = 0;
  PixelCoord handle{0.0, 0.0};
  field::FeatureField field;
  field::FeatureField field0;
  std::vector<double> handle0_feature;
  std::vector<PixelCoord> trajectory;
};

struct DragResult {
  bool converged = false;
  int iterations = 0;
  std::vector<PixelCoord> trajectory;
  field::FeatureField final_field;
  double final_distance = 0.0;  // cells
};

struct TraceRecord {
  int k = 0;
  PixelCoord handle{0.0, 0.0};
  double loss = 0.0;
  DirectionVec2 direction{0.0, 0.0};
};
using TraceSink = std::function<void(const TraceRecord&)>;

// Reference features for the frozen side of the motion term: one feature
// vector per patch cell q in the (2r+1)^2 patch around handle, sampled
// from the field passed in. Vertically clipped cells are dropped and
// reported via clipped.
struct MotionRefs {
  std::vector<PixelCoord> positions;
  std::vector<double> features;  // positions.size() * dim, row-per-cell
  bool clipped = false;
};

MotionRefs capture_motion_refs(const field::FeatureField& f, PixelCoord handle,
                               int r_motion);

// Great-circle distance between two field-cell positions, in cells of the
// given grid (radians * W' / 2pi).
double cell_distance(PixelCoord a, PixelCoord b, int w, int h);

// Unit step direction: great-circle (through the drag pair's circle,
// projected at cur) when gcta is on, plain normalized pixel difference
// target - cur when off.
DirectionVec2 motion_direction(PixelCoord handle0, PixelCoord target,
                               PixelCoord cur, const DragConfig& cfg, int w, int h);

// term1 + lambda * term2 with the reference side frozen:
//   term1 = sum over patch cells q of |sample(field, q + d) - refs(q)|_1
//   term2 = |(field - field0) .* (1 - M)|_1 over all cells and channels.
double motion_supervision_loss(const field::FeatureField& f,
                               const field::FeatureField& f0,
                               const MotionRefs& refs, DirectionVec2 d,
                               const img::MaskImage& mask, const DragConfig& cfg);

// Exact subgradient of the loss w.r.t. every field entry; sign(0) = 0.
// term1 touches only the bilinear stencils at q + d.
std::vector<double> loss_gradient(const field::FeatureField& f,
                                  const field::FeatureField& f0,
                                  const MotionRefs& refs, DirectionVec2 d,
                                  const img::MaskImage& mask, const DragConfig& cfg);

// Convenience forms matching the drag state: references captured from
// state.field at state.handle (stop-gradient capture included).
double motion_supervision_loss(const DragState& st, DirectionVec2 d,
                               const img::MaskImage& mask, const DragConfig& cfg);
std::vector<double> loss_gradient(const DragState& st, DirectionVec2 d,
                                  const img::MaskImage& mask, const DragConfig& cfg);

// SSRT on: the scaled axis gets min(r_base / cos(lat), cap), the other
// keeps r0. SSRT off: an r_base square. Radii discretize to the nearest
// integer (half away from zero); columns wrap, rows clip.
SearchRegion build_search_region(PixelCoord handle, const DragConfig& cfg,
                                 int w, int h);

// Argmin over region cells of |field[q] - handle0_feature|_1; ties break
// toward the smallest great-circle distance to cur, then row-major.
PixelCoord track_point(const field::FeatureField& f, const SearchRegion& region,
                       const std::vector<double>& handle0_feature, PixelCoord cur);

// Full loop: stop once the handle is within stop_eps cells of the target
// (great-circle), else direction -> one gradient step -> re-track, at most
// max_iter times. field_mask must be at field resolution.
DragResult run_drag(const field::FeatureField& f, const img::MaskImage& field_mask,
                    PixelCoord handle, PixelCoord target, const DragConfig& cfg,
                    const TraceSink* trace = nullptr);

}  // namespace panodrag::drag
