#include "panodrag/drag.hpp"

#include <algorithm>
#include <cmath>

#include "panodrag/error.hpp"

namespace panodrag::drag {

using field::FeatureField;
using geom::kTwoPi;

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_field_mask(const FeatureField& f, const img::MaskImage& mask) {
  if (mask.width != f.width || mask.height != f.height)
    fail(ErrorKind::kDimensionMismatch, "mask must be at field resolution");
}

geom::Vec3 cell_to_vec(PixelCoord p, int w, int h) {
  return geom::spherical_to_cartesian(geom::pixel_to_spherical(p, w, h));
}

}  // namespace

void validate(const DragConfig& cfg) {
  if (!(cfg.lambda >= 0.0)) fail(ErrorKind::kInvalidArgument, "lambda must be >= 0");
  if (!(cfg.lr > 0.0)) fail(ErrorKind::kInvalidArgument, "lr must be > 0");
  if (!(cfg.r_base >= 1.0) || !(cfg.r0 >= 1.0) || cfg.r_motion < 1)
    fail(ErrorKind::kInvalidArgument, "radii must be >= 1");
  if (cfg.max_iter < 1) fail(ErrorKind::kInvalidArgument, "max_iter must be >= 1");
  if (!(cfg.stop_eps >= 0.0)) fail(ErrorKind::kInvalidArgument, "stop_eps must be >= 0");
}

MotionRefs capture_motion_refs(const FeatureField& f, PixelCoord handle,
                               int r_motion) {
  MotionRefs refs;
  const int n = 2 * r_motion + 1;
  refs.positions.reserve(static_cast<std::size_t>(n) * n);
  std::vector<double> feat(f.dim);
  for (int dy = -r_motion; dy <= r_motion; ++dy)
    for (int dx = -r_motion; dx <= r_motion; ++dx) {
      PixelCoord q{handle.i + dx, handle.j + dy};
      if (q.j < 0.0 || q.j > f.height - 1.0) {
        refs.clipped = true;  // patch cell outside the pole rows is skipped
        continue;
      }
      sample_feature(f, q.i, q.j, feat.data());
      refs.positions.push_back(q);
      refs.features.insert(refs.features.end(), feat.begin(), feat.end());
    }
  return refs;
}

double cell_distance(PixelCoord a, PixelCoord b, int w, int h) {
  double rad = geom::great_circle_distance(cell_to_vec(a, w, h), cell_to_vec(b, w, h));
  return rad * w / kTwoPi;
}

DirectionVec2 motion_direction(PixelCoord handle0, PixelCoord target,
                               PixelCoord cur, const DragConfig& cfg, int w, int h) {
  if (cfg.gcta_enabled)
    return geom::great_circle_direction(handle0, target, cur, w, h);
  double di = target.i - cur.i, dj = target.j - cur.j;
  double n = std::hypot(di, dj);
  if (n < geom::kDegenerateTol)
    fail(ErrorKind::kDegenerateInput, "zero planar direction");
  return {di / n, dj / n};
}

double motion_supervision_loss(const FeatureField& f, const FeatureField& f0,
                               const MotionRefs& refs, DirectionVec2 d,
                               const img::MaskImage& mask, const DragConfig& cfg) {
  require_field_mask(f, mask);
  std::vector<double> moved(f.dim);
  double term1 = 0.0;
  for (std::size_t q = 0; q < refs.positions.size(); ++q) {
    PixelCoord p = refs.positions[q];
    sample_feature(f, p.i + d.di, p.j + d.dj, moved.data());
    const double* ref = &refs.features[q * f.dim];
    for (int c = 0; c < f.dim; ++c) term1 += std::abs(moved[c] - ref[c]);
  }
  double term2 = 0.0;
  if (cfg.lambda > 0.0) {
    for (int y = 0; y < f.height; ++y)
      for (int x = 0; x < f.width; ++x) {
        if (mask.at(x, y)) continue;
        for (int c = 0; c < f.dim; ++c)
          term2 += std::abs(f.at(x, y, c) - f0.at(x, y, c));
      }
  }
  return term1 + cfg.lambda * term2;
}

std::vector<double> loss_gradient(const FeatureField& f, const FeatureField& f0,
                                  const MotionRefs& refs, DirectionVec2 d,
                                  const img::MaskImage& mask, const DragConfig& cfg) {
  require_field_mask(f, mask);
  std::vector<double> grad(f.data.size(), 0.0);
  std::vector<double> moved(f.dim);
  for (std::size_t q = 0; q < refs.positions.size(); ++q) {
    PixelCoord p = refs.positions[q];
    field::BilinearStencil st = bilinear_stencil(f, p.i + d.di, p.j + d.dj);
    sample_feature(f, p.i + d.di, p.j + d.dj, moved.data());
    const double* ref = &refs.features[q * f.dim];
    const double w00 = (1.0 - st.tx) * (1.0 - st.ty), w10 = st.tx * (1.0 - st.ty);
    const double w01 = (1.0 - st.tx) * st.ty, w11 = st.tx * st.ty;
    for (int c = 0; c < f.dim; ++c) {
      double s = sign(moved[c] - ref[c]);
      if (s == 0.0) continue;
      grad[f.index(st.x0, st.y0, c)] += s * w00;
      grad[f.index(st.x1, st.y0, c)] += s * w10;
      grad[f.index(st.x0, st.y1, c)] += s * w01;
      grad[f.index(st.x1, st.y1, c)] += s * w11;
    }
  }
  if (cfg.lambda > 0.0) {
    for (int y = 0; y < f.height; ++y)
      for (int x = 0; x < f.width; ++x) {
        if (mask.at(x, y)) continue;
        for (int c = 0; c < f.dim; ++c) {
          std::size_t e = f.index(x, y, c);
          grad[e] += cfg.lambda * sign(f.data[e] - f0.data[e]);
        }
      }
  }
  return grad;
}

double motion_supervision_loss(const DragState& st, DirectionVec2 d,
                               const img::MaskImage& mask, const DragConfig& cfg) {
  MotionRefs refs = capture_motion_refs(st.field, st.handle, cfg.r_motion);
  return motion_supervision_loss(st.field, st.field0, refs, d, mask, cfg);
}

std::vector<double> loss_gradient(const DragState& st, DirectionVec2 d,
                                  const img::MaskImage& mask, const DragConfig& cfg) {
  MotionRefs refs = capture_motion_refs(st.field, st.handle, cfg.r_motion);
  return loss_gradient(st.field, st.field0, refs, d, mask, cfg);
}

SearchRegion build_search_region(PixelCoord handle, const DragConfig& cfg,
                                 int w, int h) {
  validate(cfg);
  SearchRegion region;
  region.center = handle;
  if (cfg.ssrt_enabled) {
    double lat = geom::pixel_to_spherical(handle, w, h).lat;
    double cap = cfg.r_cap >= 0.0 ? cfg.r_cap : h / 4.0;
    double scaled = std::min(cfg.r_base / std::cos(lat), cap);
    if (cfg.ssrt_axis == SsrtAxis::kVertical) {
      region.rx = cfg.r0;
      region.ry = scaled;
    } else {
      region.rx = scaled;
      region.ry = cfg.r0;
    }
  } else {
    region.rx = cfg.r_base;
    region.ry = cfg.r_base;
  }

  // Nearest-integer extents keep the discretized solid angle near the
  // continuous one; ceiling would bias it high by up to a full row.
  const int rx = static_cast<int>(std::floor(region.rx + 0.5));
  const int ry = static_cast<int>(std::floor(region.ry + 0.5));
  const int x_lo = static_cast<int>(std::ceil(handle.i - rx));
  const int x_hi = static_cast<int>(std::floor(handle.i + rx));
  const int y_lo = std::max(0, static_cast<int>(std::ceil(handle.j - ry)));
  const int y_hi = std::min(h - 1, static_cast<int>(std::floor(handle.j + ry)));
  const bool full_row = x_hi - x_lo + 1 >= w;
  auto wrap = [w](int x) {
    int r = x % w;
    return r < 0 ? r + w : r;
  };
  for (int y = y_lo; y <= y_hi; ++y) {
    if (full_row) {
      for (int x = 0; x < w; ++x) region.cells.push_back({x, y});
    } else {
      for (int x = x_lo; x <= x_hi; ++x) region.cells.push_back({wrap(x), y});
    }
  }
  return region;
}

PixelCoord track_point(const FeatureField& f, const SearchRegion& region,
                       const std::vector<double>& handle0_feature, PixelCoord cur) {
  if (region.cells.empty())
    fail(ErrorKind::kInvalidArgument, "empty search region");
  if (static_cast<int>(handle0_feature.size()) != f.dim)
    fail(ErrorKind::kDimensionMismatch, "handle feature dimension mismatch");
  const geom::Vec3 cur_vec = cell_to_vec(cur, f.width, f.height);
  bool have = false;
  double best_l1 = 0.0, best_gc = 0.0;
  SearchRegion::Cell best{0, 0};
  for (const SearchRegion::Cell& cell : region.cells) {
    double l1 = 0.0;
    const double* feat = &f.data[f.index(cell.x, cell.y, 0)];
    for (int c = 0; c < f.dim; ++c) l1 += std::abs(feat[c] - handle0_feature[c]);
    if (have && l1 > best_l1) continue;
    double gc = geom::great_circle_distance(
        cell_to_vec({double(cell.x), double(cell.y)}, f.width, f.height), cur_vec);
    // Lexicographic (l1, gc, row-major); cells arrive in row-major order.
    if (!have || l1 < best_l1 || (l1 == best_l1 && gc < best_gc)) {
      have = true;
      best_l1 = l1;
      best_gc = gc;
      best = cell;
    }
  }
  return {double(best.x), double(best.y)};
}

DragResult run_drag(const FeatureField& f, const img::MaskImage& field_mask,
                    PixelCoord handle, PixelCoord target, const DragConfig& cfg,
                    const TraceSink* trace) {
  validate(cfg);
  require_field_mask(f, field_mask);
  auto in_bounds = [&](PixelCoord p) {
    return std::isfinite(p.i) && std::isfinite(p.j) && p.j >= 0.0 &&
           p.j <= f.height - 1.0;
  };
  if (!in_bounds(handle) || !in_bounds(target))
    fail(ErrorKind::kInvalidArgument, "handle/target outside the field");
  if (handle.i == target.i && handle.j == target.j)
    fail(ErrorKind::kInvalidArgument, "handle equals target");

  DragState st;
  st.handle = handle;
  st.field = f;
  st.field0 = f;
  st.handle0_feature.resize(f.dim);
  sample_feature(st.field0, handle.i, handle.j, st.handle0_feature.data());
  st.trajectory.push_back(handle);

  double dist = cell_distance(st.handle, target, f.width, f.height);
  bool converged = false;
  while (true) {
    if (dist <= cfg.stop_eps) {
      converged = true;
      break;
    }
    if (st.k >= cfg.max_iter) break;

    DirectionVec2 d =
        motion_direction(handle, target, st.handle, cfg, f.width, f.height);
    MotionRefs refs = capture_motion_refs(st.field, st.handle, cfg.r_motion);
    double loss = motion_supervision_loss(st.field, st.field0, refs, d,
                                          field_mask, cfg);
    if (!std::isfinite(loss)) fail(ErrorKind::kValidation, "non-finite loss");
    if (trace && *trace) (*trace)({st.k, st.handle, loss, d});

    std::vector<double> grad =
        loss_gradient(st.field, st.field0, refs, d, field_mask, cfg);
    for (std::size_t e = 0; e < grad.size(); ++e)
      st.field.data[e] -= cfg.lr * grad[e];

    SearchRegion region = build_search_region(st.handle, cfg, f.width, f.height);
    st.handle = track_point(st.field, region, st.handle0_feature, st.handle);
    st.trajectory.push_back(st.handle);
    ++st.k;
    dist = cell_distance(st.handle, target, f.width, f.height);
  }

  DragResult res;
  res.converged = converged;
  res.iterations = st.k;
  res.trajectory = std::move(st.trajectory);
  res.final_field = std::move(st.field);
  res.final_distance = dist;
  return res;
}

}  // namespace panodrag::drag
