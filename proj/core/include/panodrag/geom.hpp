#pragma once

// Spherical geometry over equirectangular (ERP) pixel grids.
//
// Conventions, fixed for the whole library:
//   - Latitude lat in [-pi/2, pi/2], positive north. Longitude lon in
//     (-pi, pi], positive east; -pi is normalized to pi so every meridian
//     has one representative.
//   - An ERP grid of W x H pixels maps pixel (i, j) to
//       lat = pi/2 - (j/H) * pi,   lon = (i/W) * 2*pi - pi.
//     i wraps modulo W (the seam), j clamps to [0, H].
//   - Unit-sphere embedding of (lat, lon):
//       (cos lat * cos lon, cos lat * sin lon, sin lat).
//   - Image rows grow southward, so a northward tangent motion has dj < 0.

#include <array>
#include <cstddef>

namespace panodrag::geom {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHalfPi = kPi / 2.0;
inline constexpr double kTwoPi = 2.0 * kPi;

// Cross products and projections with norms below this are degenerate.
inline constexpr double kDegenerateTol = 1e-9;
// Tangent bases are rejected within this latitude margin of a pole.
inline constexpr double kPoleLatMargin = 1e-6;

struct PixelCoord {
  double i = 0.0;  // column; wraps modulo the grid width
  double j = 0.0;  // row; clamped to [0, H]
};

struct SphericalCoord {
  double lat = 0.0;
  double lon = 0.0;
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const;
  Vec3 normalized() const;  // degenerate-input error on near-zero vectors
};

// Unit-norm by contract where an operation states it; same layout as Vec3.
using UnitVec3 = Vec3;

// Row-major 3x3 rotation matrix.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return Mat3{}; }
  double at(int r, int c) const { return m[static_cast<size_t>(r) * 3 + c]; }
  double& at(int r, int c) { return m[static_cast<size_t>(r) * 3 + c]; }
  Vec3 apply(const Vec3& v) const;
  Mat3 transposed() const;
  Mat3 operator*(const Mat3& o) const;
  // Exact element-wise comparison; rotations built from zero angles are
  // bit-exact identities and short-circuit resampling.
  bool is_identity() const;
};

using RotationMatrix3 = Mat3;

struct TangentBasis {
  UnitVec3 east;
  UnitVec3 north;
};

// Pixel-space direction; unit norm except the documented zero "at target"
// signal returned by great_circle_direction.
struct DirectionVec2 {
  double di = 0.0;
  double dj = 0.0;
};

// Maps any angle to the canonical (-pi, pi] representative.
double normalize_lon(double lon);

// Maps a column coordinate into [0, W) by wrapping modulo W.
double wrap_column(double i, int width);

SphericalCoord pixel_to_spherical(PixelCoord p, int width, int height);
PixelCoord spherical_to_pixel(SphericalCoord s, int width, int height);

UnitVec3 spherical_to_cartesian(SphericalCoord s);
// Renormalizes internally; at a pole the longitude is fixed to 0.
SphericalCoord cartesian_to_spherical(Vec3 v);

// Rotation about the z-axis: adds dlon to every point's longitude.
RotationMatrix3 rotation_lon(double dlon);
// Rotation about the x-axis: adds dlat to latitude along the lon = pi/2
// meridian (the plane the x-axis rotation moves).
RotationMatrix3 rotation_lat(double dlat);

// Rotation taking `mid` to longitude target_lon. With keep_lat the latitude
// is preserved (a pure longitude rotation); otherwise the latitude is also
// brought to 0 by conjugating the x-axis rotation through the lon = pi/2
// meridian. Sub-degenerate angles snap to zero so already-centered inputs
// produce an exact identity.
RotationMatrix3 alignment_rotation(SphericalCoord mid, double target_lon,
                                   bool keep_lat);

// Local east/north frame; degenerate-basis error within kPoleLatMargin of a
// pole.
TangentBasis tangent_basis(SphericalCoord s);

// Arc length in radians, in [0, pi].
double great_circle_distance(SphericalCoord a, SphericalCoord b);
double great_circle_distance(const Vec3& a, const Vec3& b);

// Pixel-space unit direction moving `cur` along the handle->target great
// circle: embed all three points, project cur onto the circle plane, take
// the normalized chord toward the target, decompose onto the local tangent
// frame, rescale the east component by 1/cos(lat) for ERP stretching, and
// flip the north component into row convention. Returns the zero direction
// when cur already sits on the target.
DirectionVec2 great_circle_direction(PixelCoord han, PixelCoord tar,
                                     PixelCoord cur, int width, int height);

}  // namespace panodrag::geom
