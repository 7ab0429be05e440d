#pragma once

// Plaintext field-of-view geometry: equirectangular projection of GPS
// coordinates onto a local East/North plane, camera cone tests, and the
// unit conversions the shortlisting protocol consumes.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace privadome::geo {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

/// East (x) / North (y) displacement in meters.
using PlanarVector = Vector2<double>;

template <typename Scalar>
struct GeoCoordT {
  Scalar lat{0};  ///< degrees, [-90, 90]
  Scalar lon{0};  ///< degrees, [-180, 180]

  friend bool operator==(const GeoCoordT&, const GeoCoordT&) = default;
};

using GeoCoord = GeoCoordT<double>;

struct GeometryConstants {
  double earth_radius_m = 6'371'000.0;

  /// Meters spanned by one degree of latitude (or of longitude at the equator).
  [[nodiscard]] double meters_per_degree() const {
    return earth_radius_m * std::numbers::pi / 180.0;
  }
};

inline constexpr GeometryConstants kDefaultConstants{};

struct CameraSpec {
  double focal_length_mm = 1.0;
  double sensor_dim_mm = 1.0;
  double half_angle_rad = std::atan(0.5);

  static CameraSpec from_optics(double focal_length_mm, double sensor_dim_mm);
  /// Builds a spec with f = 1 mm and the sensor size that yields `half_angle_rad`.
  static CameraSpec from_half_angle(double half_angle_rad);
};

struct DronePose {
  std::string id;
  GeoCoord pos_t;
  GeoCoord pos_t_delta;
  CameraSpec camera;
  std::optional<double> gimbal_yaw_rad;
};

/// Great-circle radius around the drone (literal DetectFieldOfView test).
struct RadiusVicinity {
  double meters = 0;
};

/// Per-axis coordinate-difference thresholds (the form evaluated under MPC).
struct ThresholdVicinity {
  double lat_deg = 0;
  double lon_deg = 0;
};

using VicinitySpec = std::variant<RadiusVicinity, ThresholdVicinity>;

void validate(const GeoCoord& c);

template <typename Scalar>
Scalar deg_to_rad(Scalar deg) {
  return deg * Scalar(std::numbers::pi) / Scalar(180);
}

template <typename Scalar>
Scalar rad_to_deg(Scalar rad) {
  return rad * Scalar(180) / Scalar(std::numbers::pi);
}

double camera_half_angle(double focal_length_mm, double sensor_dim_mm);

/**
 * Equirectangular projection of `target` relative to `origin`.
 *
 * Coordinate differences are taken in radians before scaling by R, so a
 * 0.001 degree latitude step maps to roughly 111.2 m.
 */
template <typename Scalar>
Vector2<Scalar> vectorize(const GeoCoordT<Scalar>& origin, const GeoCoordT<Scalar>& target,
                          const GeometryConstants& k = kDefaultConstants) {
  const Scalar r = Scalar(k.earth_radius_m);
  const Scalar x = r * deg_to_rad(target.lon - origin.lon) * std::cos(deg_to_rad(origin.lat));
  const Scalar y = r * deg_to_rad(target.lat - origin.lat);
  return {x, y};
}

template <typename Scalar>
Scalar haversine_distance(const GeoCoordT<Scalar>& a, const GeoCoordT<Scalar>& b,
                          const GeometryConstants& k = kDefaultConstants) {
  using std::asin;
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Scalar dlat = deg_to_rad(b.lat - a.lat);
  const Scalar dlon = deg_to_rad(b.lon - a.lon);
  const Scalar s1 = sin(dlat / 2);
  const Scalar s2 = sin(dlon / 2);
  Scalar h = s1 * s1 + cos(deg_to_rad(a.lat)) * cos(deg_to_rad(b.lat)) * s2 * s2;
  h = std::min(h, Scalar(1));
  return Scalar(2) * Scalar(k.earth_radius_m) * asin(sqrt(h));
}

/// Unsigned angle in [0, pi]; the cosine is clamped to [-1, 1].
template <typename Scalar>
Scalar angle_between(const Vector2<Scalar>& d, const Vector2<Scalar>& c) {
  const Scalar nd = d.norm();
  const Scalar nc = c.norm();
  if (!(nd > Scalar(0)) || !(nc > Scalar(0))) {
    throw DomainError("angle_between: zero-length vector");
  }
  Scalar cosine = d.dot(c) / (nd * nc);
  cosine = std::clamp(cosine, Scalar(-1), Scalar(1));
  return std::acos(cosine);
}

/// Counter-clockwise rotation in the East/North plane.
template <typename Scalar>
Vector2<Scalar> rotate_vector(const Vector2<Scalar>& d, Scalar alpha_rad) {
  const Scalar c = std::cos(alpha_rad);
  const Scalar s = std::sin(alpha_rad);
  return {c * d.x() - s * d.y(), s * d.x() + c * d.y()};
}

/// Direction the camera looks along: the motion vector, rotated by the gimbal yaw if any.
PlanarVector camera_axis(const DronePose& drone, const GeometryConstants& k = kDefaultConstants);

bool in_vicinity(const GeoCoord& citizen, const GeoCoord& drone, const VicinitySpec& vicinity,
                 const GeometryConstants& k = kDefaultConstants);

/// Angle between the camera axis and the drone-to-citizen vector.
double field_of_view_angle(const GeoCoord& citizen, const DronePose& drone,
                           const GeometryConstants& k = kDefaultConstants);

bool detect_field_of_view(const GeoCoord& citizen, const DronePose& drone,
                          const VicinitySpec& vicinity,
                          const GeometryConstants& k = kDefaultConstants);

bool vertical_fov_check(double altitude_m, double dist_m, double theta_rad);

ThresholdVicinity meters_to_degree_thresholds(double radius_m, double at_lat_deg,
                                              const GeometryConstants& k = kDefaultConstants);

}  // namespace privadome::geo
