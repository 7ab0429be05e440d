#pragma once

#include "privadome/mpc/channel.hpp"
#include "privadome/mpc/transcript.hpp"
#include "privadome/netlink/fleet.hpp"
#include "privadome/netlink/frame.hpp"
#include "privadome/netlink/socket.hpp"
#include "privadome/shortlist/shortlist.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace privadome::net {

/// Shared by both sides unless overridden; both must agree for triples to match.
inline constexpr std::uint64_t kDefaultDealerSeed = 0x50524956'41444f4dULL;

struct AuthorityOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  std::uint64_t dealer_seed = kDefaultDealerSeed;
  /// Fixes the authority's masks and share randomness; entropy when unset.
  std::optional<std::uint64_t> seed;
};

struct SessionSummary {
  shortlist::SessionId session_id{};
  std::size_t n = 0;
  shortlist::Variant variant = shortlist::Variant::Oblivious;
  mpc::Transcript transcript;
  std::vector<std::size_t> learned_in_vicinity;
  std::string error;  ///< empty on success
};

/// Authority side of one query over an already-connected channel.
SessionSummary serve_session(mpc::Channel& ch, const FleetRegistry& registry, const AuthorityOptions& opts);

struct CitizenQuery {
  geo::GeoCoord pos;
  double lat_vicinity_deg = 0;
  double lon_vicinity_deg = 0;
  shortlist::Variant variant = shortlist::Variant::Oblivious;
  std::uint64_t dealer_seed = kDefaultDealerSeed;
  /// Fixes the session id, masks and share randomness; entropy when unset.
  std::optional<std::uint64_t> seed;
};

struct CitizenQueryResult {
  shortlist::SessionId session_id{};
  std::vector<PublicDrone> drones;
  std::vector<shortlist::ShortlistRecord> records;
  std::vector<shortlist::ShortlistDecision> decisions;
  mpc::Transcript transcript;
  /// Socket-level counters, framing included. Zero for non-socket channels.
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t frames = 0;
};

/// Citizen side of one query over an already-connected channel.
CitizenQueryResult citizen_query(mpc::Channel& ch, const CitizenQuery& q);

/// Connects, runs one query, closes. Connection failures raise NetworkError.
CitizenQueryResult query_as_citizen(const std::string& host, std::uint16_t port, const CitizenQuery& q);

/// Bytes a transcript occupies on the wire: payloads plus one header per message.
std::uint64_t framed_bytes(const mpc::Transcript& t);

/**
 * TCP front end for the authority. Every accepted connection runs one
 * session on its own thread against the registry snapshot current at HELLO.
 */
class AuthorityServer {
 public:
  AuthorityServer(const FleetRegistry& registry, AuthorityOptions opts);
  ~AuthorityServer();
  AuthorityServer(const AuthorityServer&) = delete;
  AuthorityServer& operator=(const AuthorityServer&) = delete;

  /// Binds and starts accepting. Returns the bound port.
  std::uint16_t start();
  /// Stops accepting and waits for running sessions to finish.
  void stop();
  /// Blocks until stop() is called from elsewhere.
  void wait();

  [[nodiscard]] std::uint16_t port() const { return port_; }
  [[nodiscard]] std::vector<SessionSummary> summaries() const;

 private:
  void accept_loop();

  const FleetRegistry& registry_;
  AuthorityOptions opts_;
  std::unique_ptr<TcpListener> listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  mutable std::mutex mu_;
  std::vector<std::thread> sessions_;
  std::vector<SessionSummary> summaries_;
};

}  // namespace privadome::net
