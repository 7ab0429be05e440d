// privadome: operator, citizen, bench and audit commands.
//
// Exit codes: 0 success, 1 IO/parse/usage, 2 network/protocol, 3 audit verdict failure.

#include "privadome/audit/audit.hpp"
#include "privadome/netlink/fleet.hpp"
#include "privadome/netlink/service.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace privadome;
namespace fs = std::filesystem;
using nlohmann::json;

enum Exit : int { kOk = 0, kIoError = 1, kNetworkError = 2, kAuditFailure = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << data;
}

std::pair<std::string, std::uint16_t> split_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw UsageError("address must be host:port, got '" + addr + "'");
  std::string host = addr.substr(0, colon);
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  int port = 0;
  try {
    port = std::stoi(addr.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("bad port in '" + addr + "'");
  }
  if (port < 0 || port > 65535) throw UsageError("port out of range in '" + addr + "'");
  return {host, static_cast<std::uint16_t>(port)};
}

net::BoundingBox parse_bbox(const std::vector<double>& v) {
  if (v.size() != 4) throw UsageError("--bbox takes lat_min,lon_min,lat_max,lon_max");
  net::BoundingBox b{v[0], v[1], v[2], v[3]};
  try {
    net::validate(b);
  } catch (const net::FleetError& e) {
    throw UsageError(e.what());
  }
  return b;
}

struct VicinityFlags {
  std::optional<double> radius_m;
  std::optional<double> lat_vic_deg;
  std::optional<double> lon_vic_deg;

  void add(CLI::App* cmd) {
    auto* r = cmd->add_option("--radius-m", radius_m, "vicinity radius in meters");
    auto* a = cmd->add_option("--lat-vic-deg", lat_vic_deg, "latitude difference threshold (degrees)");
    auto* b = cmd->add_option("--lon-vic-deg", lon_vic_deg, "longitude difference threshold (degrees)");
    r->excludes(a)->excludes(b);
    a->needs(b);
    b->needs(a);
  }

  geo::ThresholdVicinity resolve(double lat) const {
    if (radius_m) return geo::meters_to_degree_thresholds(*radius_m, lat);
    if (lat_vic_deg && lon_vic_deg) return {*lat_vic_deg, *lon_vic_deg};
    throw UsageError("give --radius-m or both --lat-vic-deg and --lon-vic-deg");
  }
};

// fleetgen ------------------------------------------------------------------

struct FleetgenArgs {
  std::size_t n = 0;
  std::vector<double> bbox = {40.70, -74.02, 40.74, -73.98};
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_fleetgen(const FleetgenArgs& a) {
  if (a.n == 0) throw UsageError("--n must be at least 1");
  const auto poses = net::generate_fleet(a.n, parse_bbox(a.bbox), a.seed);
  std::string text;
  for (const auto& p : poses) text += net::fleet_line(p) + "\n";
  if (a.out.empty() || a.out == "-") {
    std::cout << text;
  } else {
    write_file(a.out, text);
  }
  return kOk;
}

// authority / citizen -------------------------------------------------------

struct AuthorityArgs {
  std::string fleet;
  std::string listen = "127.0.0.1:7700";
  std::uint64_t dealer_seed = net::kDefaultDealerSeed;
  std::optional<std::uint64_t> seed;
  std::size_t max_sessions = 0;
};

std::atomic<bool> g_stop{false};

int cmd_authority(const AuthorityArgs& a) {
  net::FleetRegistry registry = net::FleetRegistry::ingest_fleet(a.fleet);
  const auto [host, port] = split_address(a.listen);
  net::AuthorityOptions opts;
  opts.host = host;
  opts.port = port;
  opts.dealer_seed = a.dealer_seed;
  opts.seed = a.seed;
  net::AuthorityServer server(registry, opts);
  const std::uint16_t bound = server.start();
  std::cout << "authority: " << registry.size() << " drones, listening on " << host << ":" << bound << std::endl;
  std::signal(SIGINT, [](int) { g_stop = true; });
  std::signal(SIGTERM, [](int) { g_stop = true; });
  std::size_t reported = 0;
  while (!g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    const auto summaries = server.summaries();
    for (; reported < summaries.size(); ++reported) {
      const auto& s = summaries[reported];
      std::cout << "session " << audit::to_hex(s.session_id) << " n=" << s.n << " variant=" << to_string(s.variant)
                << " bytes=" << net::framed_bytes(s.transcript)
                << (s.error.empty() ? std::string() : " error=" + s.error) << std::endl;
    }
    if (a.max_sessions && reported >= a.max_sessions) break;
  }
  server.stop();
  return kOk;
}

struct CitizenArgs {
  std::string connect = "127.0.0.1:7700";
  double lat = 0;
  double lon = 0;
  VicinityFlags vicinity;
  std::string variant = "oblivious";
  std::uint64_t dealer_seed = net::kDefaultDealerSeed;
  std::optional<std::uint64_t> seed;
  bool json_out = false;
};

json transcript_json(const mpc::Transcript& t) {
  return {{"rounds", t.rounds()},
          {"c2a_bytes", t.bytes(mpc::Direction::CitizenToAuthority)},
          {"a2c_bytes", t.bytes(mpc::Direction::AuthorityToCitizen)},
          {"online_bytes", t.online_total()},
          {"messages", t.messages().size()},
          {"preprocessing_bytes", t.preprocessing_bytes()}};
}

int cmd_citizen(const CitizenArgs& a) {
  const auto variant = shortlist::variant_from_string(a.variant);
  if (!variant) throw UsageError("--variant must be oblivious or non-oblivious");
  const geo::GeoCoord pos{a.lat, a.lon};
  geo::validate(pos);
  const geo::ThresholdVicinity vic = a.vicinity.resolve(a.lat);
  const auto [host, port] = split_address(a.connect);
  net::CitizenQuery q{pos, vic.lat_deg, vic.lon_deg, *variant, a.dealer_seed, a.seed};
  const net::CitizenQueryResult r = net::query_as_citizen(host, port, q);

  if (a.json_out) {
    json ds = json::array();
    for (const auto& d : r.decisions) {
      json j = {{"id", d.id}, {"in_vicinity", d.in_vicinity}, {"shortlisted", d.shortlisted}, {"invalid", d.invalid}};
      j["phi_deg"] = d.phi_rad ? json(geo::rad_to_deg(*d.phi_rad)) : json(nullptr);
      ds.push_back(j);
    }
    json t = transcript_json(r.transcript);
    t["wire_bytes"] = r.bytes_sent + r.bytes_received;
    std::cout << json{{"variant", a.variant}, {"decisions", ds}, {"transcript", t}}.dump(2) << "\n";
    return kOk;
  }
  std::printf("%-20s %-10s %-10s %s\n", "id", "vicinity", "phi_deg", "verdict");
  for (const auto& d : r.decisions) {
    char phi[32] = "-";
    if (d.phi_rad) std::snprintf(phi, sizeof phi, "%.3f", geo::rad_to_deg(*d.phi_rad));
    const char* verdict = d.invalid ? "invalid" : d.shortlisted ? "SHORTLISTED" : "clear";
    std::printf("%-20s %-10s %-10s %s\n", d.id.c_str(), d.in_vicinity ? "yes" : "no", phi, verdict);
  }
  std::size_t shortlisted = 0;
  for (const auto& d : r.decisions) shortlisted += d.shortlisted;
  std::printf("\n%zu of %zu drones shortlisted\n", shortlisted, r.decisions.size());
  std::printf("transcript: %u rounds, %zu B citizen->authority, %zu B authority->citizen, %llu B on the wire\n",
              r.transcript.rounds(), r.transcript.bytes(mpc::Direction::CitizenToAuthority),
              r.transcript.bytes(mpc::Direction::AuthorityToCitizen),
              static_cast<unsigned long long>(r.bytes_sent + r.bytes_received));
  return kOk;
}

// bench ---------------------------------------------------------------------

struct BenchArgs {
  std::vector<std::size_t> n_list = {100, 200, 500, 1000};
  std::size_t repeats = 3;
  std::string variant = "oblivious";
  std::string out;
  std::string units = "bytes";
  std::uint64_t seed = 1;
  double vicinity_deg = 0.01;
};

int cmd_bench(const BenchArgs& a) {
  std::vector<shortlist::Variant> variants;
  if (a.variant == "both") {
    variants = {shortlist::Variant::Oblivious, shortlist::Variant::NonOblivious};
  } else if (const auto v = shortlist::variant_from_string(a.variant)) {
    variants = {*v};
  } else {
    throw UsageError("--variant must be oblivious, non-oblivious or both");
  }
  if (a.units != "bytes" && a.units != "mb") throw UsageError("--units must be bytes or mb");
  if (a.n_list.empty()) throw UsageError("--n-list is empty");
  for (const auto n : a.n_list) {
    if (n == 0) throw UsageError("--n-list entries must be at least 1");
  }

  const net::BoundingBox bbox{40.70, -74.02, 40.74, -73.98};
  const geo::GeoCoord citizen{40.72, -74.00};
  std::ostringstream csv;
  csv << "n,variant,total_bytes,c2a_bytes,a2c_bytes,rounds,preprocessing_bytes,wall_ms\n";
  auto fmt = [&](std::uint64_t bytes) {
    if (a.units == "bytes") return std::to_string(bytes);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", static_cast<double>(bytes) / 1e6);
    return std::string(buf);
  };
  for (const auto n : a.n_list) {
    for (std::size_t rep = 0; rep < a.repeats; ++rep) {
      net::FleetRegistry registry;
      for (const auto& p : net::generate_fleet(n, bbox, a.seed + rep)) registry.add(p);
      for (const auto variant : variants) {
        net::CitizenQuery q{citizen, a.vicinity_deg, a.vicinity_deg, variant, net::kDefaultDealerSeed, a.seed + rep};
        net::AuthorityOptions opts;
        opts.seed = a.seed + rep;
        net::CitizenQueryResult r;
        const auto t0 = std::chrono::steady_clock::now();
        mpc::run_two_party([&](mpc::Channel& ch) { r = net::citizen_query(ch, q); },
                           [&](mpc::Channel& ch) {
                             const auto s = net::serve_session(ch, registry, opts);
                             if (!s.error.empty()) throw mpc::ProtocolError(s.error);
                           });
        const double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        const auto& t = r.transcript;
        const std::uint64_t c2a = t.bytes(mpc::Direction::CitizenToAuthority) +
                                  net::kFrameHeaderBytes * t.message_count(mpc::Direction::CitizenToAuthority);
        const std::uint64_t a2c = t.bytes(mpc::Direction::AuthorityToCitizen) +
                                  net::kFrameHeaderBytes * t.message_count(mpc::Direction::AuthorityToCitizen);
        char wall_buf[32];
        std::snprintf(wall_buf, sizeof wall_buf, "%.3f", wall);
        csv << n << "," << to_string(variant) << "," << fmt(c2a + a2c) << "," << fmt(c2a) << "," << fmt(a2c) << ","
            << t.rounds() << "," << fmt(t.preprocessing_bytes()) << "," << wall_buf << "\n";
      }
    }
  }
  if (a.out.empty() || a.out == "-") {
    std::cout << csv.str();
  } else {
    write_file(a.out, csv.str());
  }
  return kOk;
}

// oracle --------------------------------------------------------------------

struct OracleArgs {
  std::string fleet;
  double lat = 0;
  double lon = 0;
  VicinityFlags vicinity;
  bool json_out = false;
};

int cmd_oracle(const OracleArgs& a) {
  const geo::GeoCoord pos{a.lat, a.lon};
  geo::validate(pos);
  const net::FleetRegistry registry = net::FleetRegistry::ingest_fleet(a.fleet);
  geo::VicinitySpec spec;
  if (a.vicinity.radius_m) {
    spec = geo::RadiusVicinity{*a.vicinity.radius_m};
  } else {
    spec = a.vicinity.resolve(a.lat);
  }
  json out = json::array();
  for (const auto& e : registry.snapshot()->entries) {
    const bool near = geo::in_vicinity(pos, e.pose.pos_t, spec);
    std::optional<double> phi;
    try {
      phi = geo::field_of_view_angle(pos, e.pose);
    } catch (const geo::DomainError&) {
    }
    const bool hit = near && phi && *phi <= e.pose.camera.half_angle_rad;
    if (a.json_out) {
      out.push_back({{"id", e.pose.id},
                     {"in_vicinity", near},
                     {"phi_deg", phi ? json(geo::rad_to_deg(*phi)) : json(nullptr)},
                     {"in_view", hit}});
    } else {
      std::printf("%-20s vicinity=%-3s phi=%-9s %s\n", e.pose.id.c_str(), near ? "yes" : "no",
                  phi ? std::to_string(geo::rad_to_deg(*phi)).substr(0, 8).c_str() : "-", hit ? "IN VIEW" : "clear");
    }
  }
  if (a.json_out) std::cout << out.dump(2) << "\n";
  return kOk;
}

// audit ---------------------------------------------------------------------

struct AuditSignArgs {
  std::string trail;
  std::string key_seed;
  std::string out;
};

int cmd_audit_sign(const AuditSignArgs& a) {
  const audit::SigningKey key = audit::keygen_from_text(a.key_seed);
  audit::AuditTrail t = audit::parse_trail(read_file(a.trail));
  t.device_pubkey = key.public_hex();
  audit::sign_trail(t, key);
  const std::string doc = audit::canonical_json(t);
  if (a.out.empty() || a.out == "-") {
    std::cout << doc << "\n";
  } else {
    write_file(a.out, doc);
  }
  return kOk;
}

struct AuditVerifyArgs {
  std::string trail;
  std::string policy;
  std::string measurements;
};

int cmd_audit_verify(const AuditVerifyArgs& a) {
  audit::AuditPolicy policy = a.policy.empty() ? audit::AuditPolicy{} : audit::parse_policy(read_file(a.policy));
  if (!a.measurements.empty()) policy.expected = audit::parse_measurements(read_file(a.measurements));
  const audit::VerdictReport v = audit::verify_trail_document(read_file(a.trail), policy);
  std::cout << audit::verdict_json(v) << "\n";
  return v.pass() ? kOk : kAuditFailure;
}

struct AuditFixtureArgs {
  std::string out_dir = ".";
  std::string seed = "privadome-fixture";
};

int cmd_audit_fixture(const AuditFixtureArgs& a) {
  const audit::Fixture f = audit::compliant_fixture(a.seed);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  write_file(dir / "trail.json", audit::canonical_json(f.trail));
  write_file(dir / "trail_rogue.json", audit::canonical_json(audit::add_rogue_subscriber(f.trail, f.policy, f.key)));
  write_file(dir / "trail_measurement.json",
             audit::canonical_json(audit::tamper_measurement(f.trail, 0, audit::component::kMiddleware, f.key)));
  write_file(dir / "trail_signature.json", audit::canonical_json(audit::flip_signature_byte(f.trail)));
  write_file(dir / "policy.json", audit::policy_json(f.policy) + "\n");
  write_file(dir / "measurements.json", audit::measurements_json(f.policy.expected) + "\n");
  std::cout << "wrote audit fixtures to " << dir.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privadome: privacy-preserving drone shortlisting"};
  app.require_subcommand(1);

  FleetgenArgs fg;
  auto* fleetgen = app.add_subcommand("fleetgen", "generate a synthetic fleet as JSONL");
  fleetgen->add_option("--n", fg.n, "number of drones")->required();
  fleetgen->add_option("--bbox", fg.bbox, "lat_min,lon_min,lat_max,lon_max")->delimiter(',')->expected(4);
  fleetgen->add_option("--seed", fg.seed, "generator seed");
  fleetgen->add_option("--out", fg.out, "output path (default stdout)");

  AuthorityArgs au;
  auto* authority = app.add_subcommand("authority", "serve shortlisting queries for a fleet");
  authority->add_option("--fleet", au.fleet, "fleet JSONL")->required();
  authority->add_option("--listen", au.listen, "host:port (port 0 picks one)");
  authority->add_option("--dealer-seed", au.dealer_seed, "shared triple-dealer seed");
  authority->add_option("--seed", au.seed, "fix masks and share randomness");
  authority->add_option("--max-sessions", au.max_sessions, "exit after this many sessions (0 = run until signalled)");

  CitizenArgs ci;
  auto* citizen = app.add_subcommand("citizen", "query an authority for drones that can see you");
  citizen->add_option("--connect", ci.connect, "authority host:port");
  citizen->add_option("--lat", ci.lat, "latitude (degrees)")->required();
  citizen->add_option("--lon", ci.lon, "longitude (degrees)")->required();
  ci.vicinity.add(citizen);
  citizen->add_option("--variant", ci.variant, "oblivious | non-oblivious");
  citizen->add_option("--dealer-seed", ci.dealer_seed, "shared triple-dealer seed");
  citizen->add_option("--seed", ci.seed, "fix session id, masks and share randomness");
  citizen->add_flag("--json", ci.json_out, "print JSON");

  BenchArgs be;
  auto* bench = app.add_subcommand("bench", "measure per-query traffic over fleet sizes");
  bench->add_option("--n-list", be.n_list, "comma-separated fleet sizes")->delimiter(',');
  bench->add_option("--repeats", be.repeats, "runs per fleet size");
  bench->add_option("--variant", be.variant, "oblivious | non-oblivious | both");
  bench->add_option("--out", be.out, "CSV path (default stdout)");
  bench->add_option("--units", be.units, "bytes | mb");
  bench->add_option("--seed", be.seed, "fleet and party seed");
  bench->add_option("--vicinity-deg", be.vicinity_deg, "citizen threshold on both axes");

  OracleArgs orc;
  auto* oracle = app.add_subcommand("oracle", "plaintext field-of-view check against a fleet");
  oracle->add_option("--fleet", orc.fleet, "fleet JSONL")->required();
  oracle->add_option("--lat", orc.lat, "latitude (degrees)")->required();
  oracle->add_option("--lon", orc.lon, "longitude (degrees)")->required();
  orc.vicinity.add(oracle);
  oracle->add_flag("--json", orc.json_out, "print JSON");

  AuditSignArgs as;
  auto* audit_sign = app.add_subcommand("audit-sign", "sign a trail with a device key derived from a seed");
  audit_sign->add_option("--trail", as.trail, "trail JSON")->required();
  audit_sign->add_option("--key-seed", as.key_seed, "device key seed text")->required();
  audit_sign->add_option("--out", as.out, "output path (default stdout)");

  AuditVerifyArgs av;
  auto* audit_verify = app.add_subcommand("audit-verify", "run the three audit checks on a trail");
  audit_verify->add_option("--trail", av.trail, "trail JSON")->required();
  audit_verify->add_option("--policy", av.policy, "policy JSON");
  audit_verify->add_option("--measurements", av.measurements, "expected measurements JSON");

  AuditFixtureArgs af;
  auto* audit_fixture = app.add_subcommand("audit-fixture", "write compliant and tampered example trails");
  audit_fixture->add_option("--out-dir", af.out_dir, "output directory");
  audit_fixture->add_option("--seed", af.seed, "device key seed text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kIoError;
  }

  try {
    if (*fleetgen) return cmd_fleetgen(fg);
    if (*authority) return cmd_authority(au);
    if (*citizen) return cmd_citizen(ci);
    if (*bench) return cmd_bench(be);
    if (*oracle) return cmd_oracle(orc);
    if (*audit_sign) return cmd_audit_sign(as);
    if (*audit_verify) return cmd_audit_verify(av);
    if (*audit_fixture) return cmd_audit_fixture(af);
  } catch (const net::NetworkError& e) {
    std::cerr << "network error: " << e.what() << "\n";
    return kNetworkError;
  } catch (const mpc::ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kNetworkError;
  } catch (const net::FrameError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kNetworkError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kIoError;
}
