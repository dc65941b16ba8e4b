#include "panodrag/reproject.hpp"

#include <cmath>
#include <utility>

#include "panodrag/error.hpp"

namespace panodrag::repro {

using geom::cartesian_to_spherical;
using geom::kHalfPi;
using geom::kPi;
using geom::spherical_to_cartesian;
using geom::spherical_to_pixel;
using geom::Vec3;

void validate_case(const DragCase& c) {
  img::require_erp_shape(c.image);
  img::require_erp_shape(c.mask);
  if (c.mask.width != c.image.width || c.mask.height != c.image.height)
    fail(ErrorKind::kValidation, "mask dimensions must match the image");
  if (c.pairs.empty())
    fail(ErrorKind::kValidation, "a case needs at least one handle/target pair");
  const double w = c.image.width, h = c.image.height;
  for (const PointPair& p : c.pairs) {
    for (const PixelCoord& q : {p.handle, p.target}) {
      if (!std::isfinite(q.i) || !std::isfinite(q.j) || q.i < 0.0 ||
          q.i >= w || q.j < 0.0 || q.j > h - 1.0)
        fail(ErrorKind::kValidation, "point outside image bounds");
    }
    if (p.handle.i == p.target.i && p.handle.j == p.target.j)
      fail(ErrorKind::kValidation, "handle and target coincide");
  }
}

SphericalCoord spherical_midpoint(PixelCoord handle, PixelCoord target, int w, int h) {
  Vec3 a = spherical_to_cartesian(geom::pixel_to_spherical(handle, w, h));
  Vec3 b = spherical_to_cartesian(geom::pixel_to_spherical(target, w, h));
  Vec3 sum = a + b;
  if (sum.norm() < geom::kDegenerateTol)
    fail(ErrorKind::kDegenerateInput, "antipodal pair has no unique midpoint");
  return cartesian_to_spherical(sum.normalized());
}

PixelCoord rotate_point(PixelCoord p, const Mat3& r, int w, int h, bool* at_pole) {
  if (r.is_identity()) {
    if (at_pole) *at_pole = false;
    return p;
  }
  Vec3 v = r.apply(spherical_to_cartesian(geom::pixel_to_spherical(p, w, h)));
  SphericalCoord s = cartesian_to_spherical(v);
  bool pole = std::abs(s.lat) >= kHalfPi - 1e-12;
  if (pole) s.lon = 0.0;
  if (at_pole) *at_pole = pole;
  return spherical_to_pixel(s, w, h);
}

img::ErpImage rotate_erp_image(const img::ErpImage& src, const Mat3& r) {
  img::require_erp_shape(src);
  if (r.is_identity()) return src;
  const int w = src.width, h = src.height, c = src.channels;
  const Mat3 rt = r.transposed();
  img::ErpImage out(w, h, c);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      SphericalCoord s = geom::pixel_to_spherical({double(i), double(j)}, w, h);
      PixelCoord srcp = spherical_to_pixel(
          cartesian_to_spherical(rt.apply(spherical_to_cartesian(s))), w, h);
      img::bilinear_sample(src, srcp.i, srcp.j, &out.at(i, j, 0));
    }
  }
  return out;
}

img::MaskImage rotate_erp_mask(const img::MaskImage& src, const Mat3& r) {
  img::require_erp_shape(src);
  if (r.is_identity()) return src;
  const int w = src.width, h = src.height;
  const Mat3 rt = r.transposed();
  img::MaskImage out(w, h);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      SphericalCoord s = geom::pixel_to_spherical({double(i), double(j)}, w, h);
      PixelCoord srcp = spherical_to_pixel(
          cartesian_to_spherical(rt.apply(spherical_to_cartesian(s))), w, h);
      out.at(i, j) = img::nearest_sample(src, srcp.i, srcp.j);
    }
  }
  return out;
}

std::pair<DragCase, AlignmentRecord> align_case(const DragCase& c,
                                                double target_lon, bool keep_lat) {
  validate_case(c);
  const int w = c.image.width, h = c.image.height;

  AlignmentRecord rec;
  rec.target_lon = geom::normalize_lon(target_lon);
  rec.keep_lat = keep_lat;
  rec.midpoint_before =
      spherical_midpoint(c.pairs[0].handle, c.pairs[0].target, w, h);
  rec.rotation = geom::alignment_rotation(rec.midpoint_before, target_lon, keep_lat);
  rec.midpoint_after = cartesian_to_spherical(
      rec.rotation.apply(spherical_to_cartesian(rec.midpoint_before)));
  if (std::abs(geom::normalize_lon(rec.midpoint_after.lon - rec.target_lon)) > 1e-9)
    fail(ErrorKind::kValidation, "alignment failed to reach the target longitude");

  DragCase aligned;
  aligned.id = c.id;
  aligned.image = rotate_erp_image(c.image, rec.rotation);
  aligned.mask = rotate_erp_mask(c.mask, rec.rotation);
  aligned.pairs.reserve(c.pairs.size());
  for (const PointPair& p : c.pairs)
    aligned.pairs.push_back({rotate_point(p.handle, rec.rotation, w, h),
                             rotate_point(p.target, rec.rotation, w, h)});
  return {std::move(aligned), rec};
}

DragCase inverse_align(const DragCase& c, const AlignmentRecord& rec) {
  validate_case(c);
  const int w = c.image.width, h = c.image.height;
  const Mat3 rt = rec.rotation.transposed();
  DragCase out;
  out.id = c.id;
  out.image = rotate_erp_image(c.image, rt);
  out.mask = rotate_erp_mask(c.mask, rt);
  out.pairs.reserve(c.pairs.size());
  for (const PointPair& p : c.pairs)
    out.pairs.push_back(
        {rotate_point(p.handle, rt, w, h), rotate_point(p.target, rt, w, h)});
  return out;
}

PlanarImage extract_perspective(const img::ErpImage& src, const PerspectiveSpec& spec) {
  img::require_erp_shape(src);
  if (!(spec.fov_deg > 0.0) || spec.fov_deg >= 180.0)
    fail(ErrorKind::kInvalidArgument, "fov must be in (0, 180) degrees");
  if (spec.out_size < 16)
    fail(ErrorKind::kInvalidArgument, "out_size must be at least 16");

  const int s = spec.out_size;
  const double half = std::tan(spec.fov_deg * kPi / 180.0 / 2.0);
  const Vec3 fwd = spherical_to_cartesian(spec.center);
  const geom::TangentBasis basis = geom::tangent_basis(spec.center);

  PlanarImage out;
  out.size = s;
  out.channels = src.channels;
  out.data.assign(static_cast<std::size_t>(s) * s * src.channels, 0.0);
  for (int v = 0; v < s; ++v) {
    // Row v grows downward; camera up is the north tangent.
    double b = (s / 2.0 - v) / (s / 2.0) * half;
    for (int u = 0; u < s; ++u) {
      double a = (u - s / 2.0) / (s / 2.0) * half;
      Vec3 dir = fwd + basis.east * a + basis.north * b;
      PixelCoord p = spherical_to_pixel(cartesian_to_spherical(dir.normalized()),
                                        src.width, src.height);
      img::bilinear_sample(
          src, p.i, p.j,
          &out.data[(static_cast<std::size_t>(v) * s + u) * src.channels]);
    }
  }
  return out;
}

}  // namespace panodrag::repro
