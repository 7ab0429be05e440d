#include "privadome/netlink/fleet.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <unordered_set>

namespace privadome::net {
namespace {

using nlohmann::json;

double number_field(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw FleetError(where + ": missing field '" + key + "'");
  if (!it->is_number()) throw FleetError(where + ": field '" + key + "' is not a number");
  return it->get<double>();
}

FleetEntry make_entry(const geo::DronePose& pose) {
  return {pose, shortlist::derive_drone_input(pose), std::chrono::system_clock::now()};
}

}  // namespace

geo::DronePose parse_fleet_line(const std::string& line, std::size_t line_no) {
  const std::string where = "fleet line " + std::to_string(line_no);
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw FleetError(where + ": " + e.what());
  }
  if (!j.is_object()) throw FleetError(where + ": expected a JSON object");
  static const std::unordered_set<std::string> kKnown = {"id",     "lat_t",     "lon_t",         "lat_t2",
                                                         "lon_t2", "theta_deg", "gimbal_yaw_deg"};
  for (const auto& [key, _] : j.items()) {
    if (!kKnown.contains(key)) throw FleetError(where + ": unknown field '" + key + "'");
  }
  const auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw FleetError(where + ": 'id' must be a non-empty string");
  }
  geo::DronePose p;
  p.id = id->get<std::string>();
  p.pos_t = {number_field(j, "lat_t", where), number_field(j, "lon_t", where)};
  p.pos_t_delta = {number_field(j, "lat_t2", where), number_field(j, "lon_t2", where)};
  const double theta_deg = number_field(j, "theta_deg", where);
  if (!(theta_deg > 0.0 && theta_deg < 90.0)) throw FleetError(where + ": theta_deg must lie in (0, 90)");
  p.camera = geo::CameraSpec::from_half_angle(geo::deg_to_rad(theta_deg));
  if (j.contains("gimbal_yaw_deg")) p.gimbal_yaw_rad = geo::deg_to_rad(number_field(j, "gimbal_yaw_deg", where));
  try {
    geo::validate(p.pos_t);
    geo::validate(p.pos_t_delta);
    if (p.pos_t == p.pos_t_delta) throw geo::DomainError("pos_t equals pos_t2, direction undefined");
    shortlist::derive_drone_input(p);
  } catch (const geo::DomainError& e) {
    throw FleetError(where + ": " + e.what());
  }
  return p;
}

std::string fleet_line(const geo::DronePose& pose) {
  json j = {{"id", pose.id},
            {"lat_t", pose.pos_t.lat},
            {"lon_t", pose.pos_t.lon},
            {"lat_t2", pose.pos_t_delta.lat},
            {"lon_t2", pose.pos_t_delta.lon},
            {"theta_deg", geo::rad_to_deg(pose.camera.half_angle_rad)}};
  if (pose.gimbal_yaw_rad) j["gimbal_yaw_deg"] = geo::rad_to_deg(*pose.gimbal_yaw_rad);
  return j.dump();
}

void validate(const BoundingBox& b) {
  try {
    geo::validate({b.lat_min, b.lon_min});
    geo::validate({b.lat_max, b.lon_max});
  } catch (const geo::DomainError& e) {
    throw FleetError(std::string("bounding box: ") + e.what());
  }
  if (!(b.lat_min < b.lat_max) || !(b.lon_min < b.lon_max)) {
    throw FleetError("bounding box: min must be below max on both axes");
  }
  if (std::max(std::abs(b.lat_min), std::abs(b.lat_max)) > 85.0) {
    throw FleetError("bounding box: latitudes beyond +/-85 degrees are not supported");
  }
}

std::vector<geo::DronePose> generate_fleet(std::size_t n, const BoundingBox& bbox, std::uint64_t seed,
                                           const geo::GeometryConstants& k) {
  validate(bbox);
  mpc::Prg rng(seed, "fleetgen");
  const double m = k.meters_per_degree();
  std::vector<geo::DronePose> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    geo::DronePose p;
    char id[32];
    std::snprintf(id, sizeof id, "drone-%04zu", i);
    p.id = id;
    p.pos_t = {rng.uniform_real(bbox.lat_min, bbox.lat_max), rng.uniform_real(bbox.lon_min, bbox.lon_max)};
    const double heading = rng.uniform_real(0.0, 2.0 * std::numbers::pi);
    const double speed = rng.uniform_real(3.0, 20.0);
    const double cos_lat = std::cos(geo::deg_to_rad(p.pos_t.lat));
    p.pos_t_delta = {p.pos_t.lat + speed * std::cos(heading) / m,
                     p.pos_t.lon + speed * std::sin(heading) / (m * cos_lat)};
    p.camera = geo::CameraSpec::from_half_angle(geo::deg_to_rad(rng.uniform_real(20.0, 45.0)));
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<shortlist::DroneInput> FleetSnapshot::inputs() const {
  std::vector<shortlist::DroneInput> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.input);
  return out;
}

FleetRegistry::FleetRegistry() : snap_(std::make_shared<const FleetSnapshot>()) {}

FleetRegistry::FleetRegistry(FleetRegistry&& other) noexcept {
  std::lock_guard lock(other.mu_);
  snap_ = std::move(other.snap_);
  other.snap_ = std::make_shared<const FleetSnapshot>();
}

FleetRegistry FleetRegistry::ingest_fleet(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FleetError("cannot open fleet file " + path.string());
  return ingest_fleet(in);
}

FleetRegistry FleetRegistry::ingest_fleet(std::istream& in) {
  auto snap = std::make_shared<FleetSnapshot>();
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    geo::DronePose pose = parse_fleet_line(line, line_no);
    if (!seen.insert(pose.id).second) {
      throw FleetError("fleet line " + std::to_string(line_no) + ": duplicate id '" + pose.id + "'");
    }
    snap->entries.push_back(make_entry(pose));
  }
  FleetRegistry reg;
  reg.snap_ = std::move(snap);
  return reg;
}

void FleetRegistry::add(const geo::DronePose& pose) {
  FleetEntry entry = make_entry(pose);
  std::lock_guard lock(mu_);
  for (const auto& e : snap_->entries) {
    if (e.pose.id == pose.id) throw FleetError("duplicate id '" + pose.id + "'");
  }
  auto next = std::make_shared<FleetSnapshot>(*snap_);
  next->entries.push_back(std::move(entry));
  ++next->version;
  snap_ = std::move(next);
}

void FleetRegistry::update_drone(const std::string& id, const geo::GeoCoord& pos_t,
                                 const geo::GeoCoord& pos_t_delta) {
  std::lock_guard lock(mu_);
  auto next = std::make_shared<FleetSnapshot>(*snap_);
  for (auto& e : next->entries) {
    if (e.pose.id != id) continue;
    geo::DronePose pose = e.pose;
    pose.pos_t = pos_t;
    pose.pos_t_delta = pos_t_delta;
    e = make_entry(pose);
    ++next->version;
    snap_ = std::move(next);
    return;
  }
  throw FleetError("unknown drone id '" + id + "'");
}

std::shared_ptr<const FleetSnapshot> FleetRegistry::snapshot() const {
  std::lock_guard lock(mu_);
  return snap_;
}

}  // namespace privadome::net
