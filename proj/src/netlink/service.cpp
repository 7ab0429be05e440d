#include "privadome/netlink/service.hpp"

namespace privadome::net {
namespace {

using mpc::MsgType;
using mpc::PartyRole;

mpc::Prg party_rng(const std::optional<std::uint64_t>& seed, std::string_view domain) {
  return seed ? mpc::Prg(*seed, domain) : mpc::Prg::from_entropy();
}

}  // namespace

std::uint64_t framed_bytes(const mpc::Transcript& t) {
  return t.total_bytes() + kFrameHeaderBytes * t.messages().size();
}

SessionSummary serve_session(mpc::Channel& ch, const FleetRegistry& registry, const AuthorityOptions& opts) {
  SessionSummary s;
  mpc::Endpoint ep(PartyRole::Authority, ch, s.transcript);
  try {
    const Hello hello = decode_hello(ep.recv(MsgType::Hello).payload);
    s.session_id = hello.session_id;
    s.variant = hello.variant;
    if (hello.version != kProtocolVersion) {
      throw mpc::ProtocolError("unsupported protocol version " + std::to_string(hello.version));
    }
    const std::shared_ptr<const FleetSnapshot> snap = registry.snapshot();
    if (snap->entries.empty()) throw mpc::ProtocolError("fleet is empty");
    s.n = snap->entries.size();

    std::vector<PublicDrone> pub;
    for (const auto& e : snap->entries) pub.push_back({e.input.id, e.input.theta_rad});
    ep.send(MsgType::Hello, encode_hello({kProtocolVersion, hello.variant, static_cast<std::uint32_t>(s.n),
                                          hello.session_id}));
    ep.send(MsgType::ThetasIds, encode_thetas_ids(pub));

    mpc::Prg rng = party_rng(opts.seed, "authority");
    const shortlist::MaskSet masks = shortlist::make_masks(rng, s.n);
    const shortlist::SessionParams params{s.n, hello.variant, hello.session_id, opts.dealer_seed};
    const std::vector<shortlist::DroneInput> drones = snap->inputs();
    s.learned_in_vicinity = shortlist::authority_session(ep, rng, params, drones, masks);

    ep.recv(MsgType::Bye);
    ep.send(MsgType::Bye, {});
  } catch (const NetworkError& e) {
    s.error = e.what();
  } catch (const std::exception& e) {
    s.error = e.what();
    ep.send_error(e.what());
  }
  return s;
}

CitizenQueryResult citizen_query(mpc::Channel& ch, const CitizenQuery& q) {
  CitizenQueryResult r;
  mpc::Prg rng = party_rng(q.seed, "citizen");
  rng.fill(r.session_id);
  mpc::Endpoint ep(PartyRole::Citizen, ch, r.transcript);
  try {
    ep.send(MsgType::Hello, encode_hello({kProtocolVersion, q.variant, 0, r.session_id}));
    const Hello hello = decode_hello(ep.recv(MsgType::Hello).payload);
    if (hello.version != kProtocolVersion) {
      throw mpc::ProtocolError("authority speaks protocol version " + std::to_string(hello.version));
    }
    if (hello.variant != q.variant || hello.session_id != r.session_id) {
      throw mpc::ProtocolError("authority HELLO does not match the request");
    }
    r.drones = decode_thetas_ids(ep.recv(MsgType::ThetasIds).payload);
    const std::size_t n = hello.n;
    if (r.drones.size() != n) throw mpc::ProtocolError("THETAS_IDS count differs from HELLO n");

    const shortlist::CitizenInput input{q.pos, q.lat_vicinity_deg, q.lon_vicinity_deg,
                                        shortlist::make_masks(rng, n)};
    const shortlist::SessionParams params{n, q.variant, r.session_id, q.dealer_seed};
    std::vector<std::string> ids;
    std::vector<double> thetas;
    for (const auto& d : r.drones) {
      ids.push_back(d.id);
      thetas.push_back(d.theta_rad);
    }
    r.records = shortlist::citizen_session(ep, rng, params, input, ids);
    r.decisions = shortlist::citizen_postprocess(r.records, thetas);

    ep.send(MsgType::Bye, {});
    ep.recv(MsgType::Bye);
  } catch (const NetworkError&) {
    throw;
  } catch (const std::exception& e) {
    ep.send_error(e.what());
    throw;
  }
  return r;
}

CitizenQueryResult query_as_citizen(const std::string& host, std::uint16_t port, const CitizenQuery& q) {
  // Reject bad inputs before touching the network.
  shortlist::validate(shortlist::CitizenInput{q.pos, q.lat_vicinity_deg, q.lon_vicinity_deg, {}}, 0);
  SocketChannel ch(connect_tcp(host, port));
  CitizenQueryResult r = citizen_query(ch, q);
  r.bytes_sent = ch.bytes_sent();
  r.bytes_received = ch.bytes_received();
  r.frames = ch.frames_sent() + ch.frames_received();
  ch.close();
  return r;
}

AuthorityServer::AuthorityServer(const FleetRegistry& registry, AuthorityOptions opts)
    : registry_(registry), opts_(std::move(opts)) {}

AuthorityServer::~AuthorityServer() { stop(); }

std::uint16_t AuthorityServer::start() {
  listener_ = std::make_unique<TcpListener>(opts_.host, opts_.port);
  port_ = listener_->port();
  acceptor_ = std::thread([this] { accept_loop(); });
  return port_;
}

void AuthorityServer::accept_loop() {
  while (!stopping_) {
    Socket sock = listener_->accept();
    if (!sock.valid()) break;
    std::lock_guard lock(mu_);
    sessions_.emplace_back([this, s = std::move(sock)]() mutable {
      SocketChannel ch(std::move(s));
      SessionSummary summary = serve_session(ch, registry_, opts_);
      ch.close();
      std::lock_guard inner(mu_);
      summaries_.push_back(std::move(summary));
    });
  }
}

void AuthorityServer::stop() {
  if (!listener_) return;
  stopping_ = true;
  listener_->shutdown();
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> running;
  {
    std::lock_guard lock(mu_);
    running.swap(sessions_);
  }
  for (auto& t : running) t.join();
  listener_.reset();
}

void AuthorityServer::wait() {
  if (acceptor_.joinable()) acceptor_.join();
}

std::vector<SessionSummary> AuthorityServer::summaries() const {
  std::lock_guard lock(mu_);
  return summaries_;
}

}  // namespace privadome::net
