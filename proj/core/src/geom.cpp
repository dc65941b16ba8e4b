#include "panodrag/geom.hpp"

#include <cmath>

#include "panodrag/error.hpp"

namespace panodrag::geom {

namespace {

void require_finite(double v, const char* who) {
  if (!std::isfinite(v)) {
    fail(ErrorKind::kInvalidArgument, std::string(who) + ": non-finite input");
  }
}

void require_grid(int width, int height, const char* who) {
  if (width < 1 || height < 1) {
    fail(ErrorKind::kInvalidArgument,
         std::string(who) + ": grid dimensions must be positive");
  }
}

// Angles this small are resampling noise, not intent; snapping them keeps
// already-aligned cases on the exact-identity fast path.
constexpr double kAngleSnapTol = 1e-13;

double snap_angle(double a) { return std::abs(a) < kAngleSnapTol ? 0.0 : a; }

}  // namespace

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Vec3 Vec3::normalized() const {
  double n = norm();
  if (n < 1e-12) {
    fail(ErrorKind::kDegenerateInput, "Vec3: cannot normalize near-zero vector");
  }
  return {x / n, y / n, z / n};
}

Vec3 Mat3::apply(const Vec3& v) const {
  return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
          m[3] * v.x + m[4] * v.y + m[5] * v.z,
          m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

Mat3 Mat3::transposed() const {
  Mat3 t;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) t.at(r, c) = at(c, r);
  return t;
}

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 p;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      p.at(r, c) = at(r, 0) * o.at(0, c) + at(r, 1) * o.at(1, c) +
                   at(r, 2) * o.at(2, c);
    }
  }
  return p;
}

bool Mat3::is_identity() const {
  static const Mat3 kId = Mat3::identity();
  return m == kId.m;
}

double normalize_lon(double lon) {
  require_finite(lon, "normalize_lon");
  if (lon > -kPi && lon <= kPi) return lon;
  double r = std::remainder(lon, kTwoPi);  // lands in [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double wrap_column(double i, int width) {
  require_finite(i, "wrap_column");
  double w = static_cast<double>(width);
  double r = i - w * std::floor(i / w);
  if (r >= w) r -= w;  // guards the i/w rounding edge
  return r;
}

SphericalCoord pixel_to_spherical(PixelCoord p, int width, int height) {
  require_grid(width, height, "pixel_to_spherical");
  require_finite(p.i, "pixel_to_spherical");
  require_finite(p.j, "pixel_to_spherical");
  double i = wrap_column(p.i, width);
  double j = p.j;
  if (j < 0.0) j = 0.0;
  double h = static_cast<double>(height);
  if (j > h) j = h;
  SphericalCoord s;
  s.lat = kHalfPi - (j / h) * kPi;
  s.lon = normalize_lon((i / static_cast<double>(width)) * kTwoPi - kPi);
  return s;
}

PixelCoord spherical_to_pixel(SphericalCoord s, int width, int height) {
  require_grid(width, height, "spherical_to_pixel");
  require_finite(s.lat, "spherical_to_pixel");
  require_finite(s.lon, "spherical_to_pixel");
  if (std::abs(s.lat) > kHalfPi + 1e-9) {
    fail(ErrorKind::kInvalidArgument,
         "spherical_to_pixel: latitude outside [-pi/2, pi/2]");
  }
  double lat = s.lat;
  if (lat > kHalfPi) lat = kHalfPi;
  if (lat < -kHalfPi) lat = -kHalfPi;
  double lon = normalize_lon(s.lon);
  PixelCoord p;
  p.i = wrap_column((lon + kPi) / kTwoPi * static_cast<double>(width), width);
  p.j = (kHalfPi - lat) / kPi * static_cast<double>(height);
  return p;
}

UnitVec3 spherical_to_cartesian(SphericalCoord s) {
  require_finite(s.lat, "spherical_to_cartesian");
  require_finite(s.lon, "spherical_to_cartesian");
  double cl = std::cos(s.lat);
  return {cl * std::cos(s.lon), cl * std::sin(s.lon), std::sin(s.lat)};
}

SphericalCoord cartesian_to_spherical(Vec3 v) {
  require_finite(v.x, "cartesian_to_spherical");
  require_finite(v.y, "cartesian_to_spherical");
  require_finite(v.z, "cartesian_to_spherical");
  double n = v.norm();
  if (n < 1e-12) {
    fail(ErrorKind::kDegenerateInput, "cartesian_to_spherical: zero vector");
  }
  double z = v.z / n;
  if (z > 1.0) z = 1.0;
  if (z < -1.0) z = -1.0;
  SphericalCoord s;
  s.lat = std::asin(z);
  if (v.x == 0.0 && v.y == 0.0) {
    s.lon = 0.0;  // pole: longitude fixed to 0 by convention
  } else {
    s.lon = normalize_lon(std::atan2(v.y, v.x));
  }
  return s;
}

RotationMatrix3 rotation_lon(double dlon) {
  require_finite(dlon, "rotation_lon");
  double c = std::cos(dlon), s = std::sin(dlon);
  Mat3 r;
  r.m = {c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0};
  return r;
}

RotationMatrix3 rotation_lat(double dlat) {
  require_finite(dlat, "rotation_lat");
  double c = std::cos(dlat), s = std::sin(dlat);
  Mat3 r;
  r.m = {1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c};
  return r;
}

RotationMatrix3 alignment_rotation(SphericalCoord mid, double target_lon,
                                   bool keep_lat) {
  require_finite(mid.lat, "alignment_rotation");
  require_finite(mid.lon, "alignment_rotation");
  require_finite(target_lon, "alignment_rotation");
  if (std::abs(mid.lat) > kHalfPi + 1e-9) {
    fail(ErrorKind::kInvalidArgument,
         "alignment_rotation: midpoint latitude outside [-pi/2, pi/2]");
  }
  double dphi = snap_angle(normalize_lon(target_lon - mid.lon));
  double dtheta = keep_lat ? 0.0 : snap_angle(-mid.lat);
  if (dtheta == 0.0) {
    return rotation_lon(dphi);
  }
  // The x-axis rotation moves latitude only along the lon = pi/2 meridian,
  // so route the midpoint through it: lon -> pi/2, zero the latitude there,
  // then carry lon pi/2 -> target_lon.
  return rotation_lon(target_lon - kHalfPi) * rotation_lat(dtheta) *
         rotation_lon(kHalfPi - mid.lon);
}

TangentBasis tangent_basis(SphericalCoord s) {
  require_finite(s.lat, "tangent_basis");
  require_finite(s.lon, "tangent_basis");
  if (std::abs(s.lat) >= kHalfPi - kPoleLatMargin) {
    fail(ErrorKind::kDegenerateBasis,
         "tangent_basis: undefined within 1e-6 rad of a pole");
  }
  double sl = std::sin(s.lat), cl = std::cos(s.lat);
  double so = std::sin(s.lon), co = std::cos(s.lon);
  TangentBasis b;
  b.east = {-so, co, 0.0};
  b.north = {-sl * co, -sl * so, cl};
  return b;
}

double great_circle_distance(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

double great_circle_distance(SphericalCoord a, SphericalCoord b) {
  return great_circle_distance(spherical_to_cartesian(a),
                               spherical_to_cartesian(b));
}

DirectionVec2 great_circle_direction(PixelCoord han, PixelCoord tar,
                                     PixelCoord cur, int width, int height) {
  SphericalCoord s_han = pixel_to_spherical(han, width, height);
  SphericalCoord s_tar = pixel_to_spherical(tar, width, height);
  SphericalCoord s_cur = pixel_to_spherical(cur, width, height);
  Vec3 p_han = spherical_to_cartesian(s_han);
  Vec3 p_tar = spherical_to_cartesian(s_tar);
  Vec3 p_cur = spherical_to_cartesian(s_cur);

  Vec3 n_raw = p_han.cross(p_tar);
  if (n_raw.norm() < kDegenerateTol) {
    fail(ErrorKind::kDegenerateGreatCircle,
         "great_circle_direction: handle and target coincident or antipodal");
  }
  Vec3 n = n_raw.normalized();

  if (great_circle_distance(p_cur, p_tar) < kDegenerateTol) {
    return {0.0, 0.0};  // at target: caller's stop condition fires
  }

  Vec3 proj = p_cur - n * p_cur.dot(n);
  if (proj.norm() < kDegenerateTol) {
    fail(ErrorKind::kDegenerateProjection,
         "great_circle_direction: current point parallel to circle normal");
  }
  Vec3 p_prime = proj.normalized();

  Vec3 chord = p_tar - p_prime;
  if (chord.norm() < kDegenerateTol) {
    return {0.0, 0.0};  // projection already on the target
  }
  Vec3 v_move = chord.normalized();

  TangentBasis basis = tangent_basis(s_cur);  // pole input errors here
  double v_east = v_move.dot(basis.east);
  double v_north = v_move.dot(basis.north);

  // An angular velocity (dlon, dlat) moves (v_east, v_north) = (cos(lat) *
  // dlon, dlat) on the surface, and ERP columns/rows scale dlon and dlat by
  // the same factor when W = 2H, so the pixel direction needs only the
  // 1/cos(lat) stretch on the east component and the row-sign flip.
  double di = v_east / std::cos(s_cur.lat);
  double dj = -v_north;
  double len = std::hypot(di, dj);
  if (len < kDegenerateTol) {
    fail(ErrorKind::kDegenerateProjection,
         "great_circle_direction: motion has no tangent component");
  }
  return {di / len, dj / len};
}

}  // namespace panodrag::geom
