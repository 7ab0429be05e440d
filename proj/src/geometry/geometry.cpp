#include "privadome/geometry.hpp"

#include <cmath>
#include <string>

namespace privadome::geo {

void validate(const GeoCoord& c) {
  if (!std::isfinite(c.lat) || !std::isfinite(c.lon) || c.lat < -90.0 || c.lat > 90.0 ||
      c.lon < -180.0 || c.lon > 180.0) {
    throw DomainError("coordinate out of range: (" + std::to_string(c.lat) + ", " +
                      std::to_string(c.lon) + ")");
  }
}

double camera_half_angle(double focal_length_mm, double sensor_dim_mm) {
  if (!(focal_length_mm > 0.0) || !(sensor_dim_mm > 0.0)) {
    throw DomainError("camera_half_angle: focal length and sensor size must be positive");
  }
  return std::atan(sensor_dim_mm / (2.0 * focal_length_mm));
}

CameraSpec CameraSpec::from_optics(double focal_length_mm, double sensor_dim_mm) {
  return {focal_length_mm, sensor_dim_mm, camera_half_angle(focal_length_mm, sensor_dim_mm)};
}

CameraSpec CameraSpec::from_half_angle(double half_angle_rad) {
  if (!(half_angle_rad > 0.0) || !(half_angle_rad < std::numbers::pi / 2)) {
    throw DomainError("camera half angle must lie in (0, pi/2)");
  }
  return {1.0, 2.0 * std::tan(half_angle_rad), half_angle_rad};
}

PlanarVector camera_axis(const DronePose& drone, const GeometryConstants& k) {
  validate(drone.pos_t);
  validate(drone.pos_t_delta);
  if (drone.pos_t == drone.pos_t_delta) {
    throw DomainError("drone '" + drone.id + "': pose pair does not define a direction");
  }
  PlanarVector d = vectorize(drone.pos_t, drone.pos_t_delta, k);
  if (drone.gimbal_yaw_rad) d = rotate_vector(d, *drone.gimbal_yaw_rad);
  return d;
}

bool in_vicinity(const GeoCoord& citizen, const GeoCoord& drone, const VicinitySpec& vicinity,
                 const GeometryConstants& k) {
  if (const auto* r = std::get_if<RadiusVicinity>(&vicinity)) {
    if (!(r->meters > 0.0)) throw DomainError("vicinity radius must be positive");
    return haversine_distance(citizen, drone, k) <= r->meters;
  }
  const auto& t = std::get<ThresholdVicinity>(vicinity);
  if (!(t.lat_deg > 0.0) || !(t.lon_deg > 0.0)) {
    throw DomainError("vicinity thresholds must be positive");
  }
  return std::abs(citizen.lat - drone.lat) <= t.lat_deg &&
         std::abs(citizen.lon - drone.lon) <= t.lon_deg;
}

double field_of_view_angle(const GeoCoord& citizen, const DronePose& drone,
                           const GeometryConstants& k) {
  validate(citizen);
  const PlanarVector axis = camera_axis(drone, k);
  const PlanarVector to_citizen = vectorize(drone.pos_t, citizen, k);
  return angle_between(axis, to_citizen);
}

bool detect_field_of_view(const GeoCoord& citizen, const DronePose& drone,
                          const VicinitySpec& vicinity, const GeometryConstants& k) {
  validate(citizen);
  if (!in_vicinity(citizen, drone.pos_t, vicinity, k)) return false;
  return field_of_view_angle(citizen, drone, k) <= drone.camera.half_angle_rad;
}

bool vertical_fov_check(double altitude_m, double dist_m, double theta_rad) {
  if (!(dist_m > 0.0)) throw DomainError("vertical_fov_check: distance must be positive");
  if (altitude_m < 0.0) throw DomainError("vertical_fov_check: altitude must be non-negative");
  return std::atan(altitude_m / dist_m) < theta_rad;
}

ThresholdVicinity meters_to_degree_thresholds(double radius_m, double at_lat_deg,
                                              const GeometryConstants& k) {
  if (!(radius_m > 0.0)) throw DomainError("vicinity radius must be positive");
  if (!(std::abs(at_lat_deg) < 89.0)) {
    throw DomainError("meters_to_degree_thresholds: latitude too close to a pole");
  }
  const double lat_deg = radius_m / k.meters_per_degree();
  return {lat_deg, lat_deg / std::cos(deg_to_rad(at_lat_deg))};
}

}  // namespace privadome::geo
