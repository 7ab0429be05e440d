#pragma once

#include "privadome/geometry.hpp"
#include "privadome/shortlist/shortlist.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace privadome::net {

/// Malformed fleet input; the message names the offending line.
class FleetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses one fleet JSONL object. `line_no` only feeds error messages.
geo::DronePose parse_fleet_line(const std::string& line, std::size_t line_no = 0);
/// Serializes a pose as one fleet JSONL object (no trailing newline).
std::string fleet_line(const geo::DronePose& pose);

struct BoundingBox {
  double lat_min = 0;
  double lon_min = 0;
  double lat_max = 0;
  double lon_max = 0;
};

/// Throws FleetError unless min < max on both axes and the corners are valid coordinates.
void validate(const BoundingBox& b);

/**
 * Synthetic fleet: positions uniform over `bbox`, uniform headings, the
 * second pose one second later at 3-20 m/s, half-angles uniform in [20, 45] degrees.
 * Deterministic in `seed`.
 */
std::vector<geo::DronePose> generate_fleet(std::size_t n, const BoundingBox& bbox, std::uint64_t seed,
                                           const geo::GeometryConstants& k = geo::kDefaultConstants);

struct FleetEntry {
  geo::DronePose pose;
  shortlist::DroneInput input;
  std::chrono::system_clock::time_point updated_at;
};

/// Immutable view of the fleet at one instant. Sessions hold one for their lifetime.
struct FleetSnapshot {
  std::vector<FleetEntry> entries;
  std::uint64_t version = 0;

  [[nodiscard]] std::vector<shortlist::DroneInput> inputs() const;
};

/// Copy-on-write registry: updates publish a new snapshot and never touch old ones.
class FleetRegistry {
 public:
  FleetRegistry();
  FleetRegistry(FleetRegistry&& other) noexcept;
  FleetRegistry& operator=(FleetRegistry&&) = delete;

  static FleetRegistry ingest_fleet(const std::filesystem::path& path);
  static FleetRegistry ingest_fleet(std::istream& in);

  void add(const geo::DronePose& pose);
  void update_drone(const std::string& id, const geo::GeoCoord& pos_t, const geo::GeoCoord& pos_t_delta);

  [[nodiscard]] std::shared_ptr<const FleetSnapshot> snapshot() const;
  [[nodiscard]] std::size_t size() const { return snapshot()->entries.size(); }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const FleetSnapshot> snap_;
};

}  // namespace privadome::net
