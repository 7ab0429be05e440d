#include "privadome/audit/audit.hpp"

#include <json.hpp>
#include <sodium.h>

#include <algorithm>

namespace privadome::audit {
namespace {

using nlohmann::json;

void ensure_sodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw AuditError("libsodium initialisation failed");
}

bool is_lower_hex(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

// Strict schema reader: every object must have exactly the expected keys.
class Walker {
 public:
  static void keys(const json& j, const std::string& path, std::initializer_list<std::string_view> required,
                   std::initializer_list<std::string_view> optional = {}) {
    if (!j.is_object()) throw AuditParseError(path, "expected an object");
    for (const auto& [k, _] : j.items()) {
      const bool known = std::find(required.begin(), required.end(), k) != required.end() ||
                         std::find(optional.begin(), optional.end(), k) != optional.end();
      if (!known) throw AuditParseError(path, "unknown key '" + k + "'");
    }
    for (const auto k : required) {
      if (!j.contains(std::string(k))) throw AuditParseError(path, "missing key '" + std::string(k) + "'");
    }
  }

  static std::string string(const json& j, const std::string& path) {
    if (!j.is_string()) throw AuditParseError(path, "expected a string");
    return j.get<std::string>();
  }

  static std::string hex(const json& j, const std::string& path, std::size_t bytes) {
    std::string s = string(j, path);
    if (s.size() != 2 * bytes || !is_lower_hex(s)) {
      throw AuditParseError(path, "expected " + std::to_string(2 * bytes) + " lowercase hex digits");
    }
    return s;
  }

  static std::vector<std::string> string_set(const json& j, const std::string& path) {
    if (!j.is_array()) throw AuditParseError(path, "expected an array");
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < j.size(); ++i) {
      std::string s = string(j[i], path + "[" + std::to_string(i) + "]");
      if (s.empty()) throw AuditParseError(path, "empty name");
      if (!seen.insert(s).second) throw AuditParseError(path, "duplicate entry '" + s + "'");
      out.push_back(std::move(s));
    }
    return out;
  }
};

json to_json(const Manifest& m) {
  return {{"app_id", m.app_id},
          {"publishes", m.publishes},
          {"subscribes", m.subscribes},
          {"cert_fingerprint", m.cert_fingerprint}};
}

json to_json(const AuditEntry& e) {
  return {{"timestamp_ms", e.timestamp_ms},
          {"manifest", to_json(e.manifest)},
          {"attestation", e.attestation.measurements}};
}

json entries_json(const AuditTrail& t) {
  json arr = json::array();
  for (const auto& e : t.entries) arr.push_back(to_json(e));
  return arr;
}

Manifest parse_manifest(const json& j, const std::string& path) {
  Walker::keys(j, path, {"app_id", "publishes", "subscribes", "cert_fingerprint"});
  Manifest m;
  m.app_id = Walker::string(j["app_id"], path + ".app_id");
  if (m.app_id.empty()) throw AuditParseError(path + ".app_id", "empty app_id");
  m.publishes = Walker::string_set(j["publishes"], path + ".publishes");
  m.subscribes = Walker::string_set(j["subscribes"], path + ".subscribes");
  m.cert_fingerprint = Walker::hex(j["cert_fingerprint"], path + ".cert_fingerprint", 32);
  return m;
}

AttestationReport parse_attestation(const json& j, const std::string& path) {
  if (!j.is_object()) throw AuditParseError(path, "expected an object");
  AttestationReport r;
  for (const auto& [k, v] : j.items()) {
    const auto& req = required_components();
    if (std::find(req.begin(), req.end(), k) == req.end()) throw AuditParseError(path, "unknown component '" + k + "'");
    r.measurements[k] = Walker::hex(v, path + "." + k, 32);
  }
  for (const auto& c : required_components()) {
    if (!r.measurements.contains(c)) throw AuditParseError(path, "missing component '" + c + "'");
  }
  return r;
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw AuditParseError(what, e.what());
  }
}

void check_component(const AuditEntry& e, std::string_view comp, const AuditPolicy& p, CheckResult& out) {
  const std::string c(comp);
  const auto want = p.expected.find(c);
  const auto have = e.attestation.measurements.find(c);
  if (want == p.expected.end()) {
    out.violations.push_back({e.manifest.app_id, "no expected measurement for " + c});
  } else if (have == e.attestation.measurements.end()) {
    out.violations.push_back({e.manifest.app_id, c + " measurement missing"});
  } else if (have->second != want->second) {
    out.violations.push_back({e.manifest.app_id, c + " measurement mismatch"});
  }
}

CheckResult measurement_check(const AuditTrail& t, const AuditPolicy& p,
                              std::initializer_list<std::string_view> comps) {
  CheckResult r;
  if (t.entries.empty()) r.violations.push_back({"", "no attestation entries"});
  for (const auto& e : t.entries) {
    for (const auto c : comps) check_component(e, c, p, r);
  }
  r.pass = r.violations.empty();
  return r;
}

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& x : s) out += (out.empty() ? "" : ",") + x;
  return out;
}

CheckResult pubsub_check(const AuditTrail& t, const AuditPolicy& p) {
  CheckResult r;
  const std::set<std::string> sanitized{p.sanitized_topic};
  for (const auto& e : t.entries) {
    const Manifest& m = e.manifest;
    const std::set<std::string> subs(m.subscribes.begin(), m.subscribes.end());
    if (m.app_id == p.sanitizer_id) {
      const std::set<std::string> pubs(m.publishes.begin(), m.publishes.end());
      if (subs != p.sensitive_topics) {
        r.violations.push_back({m.app_id, "sanitizer subscribes to {" + join(subs) + "}, expected {" +
                                              join(p.sensitive_topics) + "}"});
      }
      if (pubs != sanitized) {
        r.violations.push_back({m.app_id, "sanitizer publishes {" + join(pubs) + "}, expected {" +
                                              p.sanitized_topic + "}"});
      }
      continue;
    }
    if (p.raw_consumer_allowlist.contains(m.app_id)) continue;
    for (const auto& topic : m.subscribes) {
      if (p.sensitive_topics.contains(topic)) {
        r.violations.push_back({m.app_id, "subscribes to sensitive topic " + topic});
      }
    }
  }
  r.pass = r.violations.empty();
  return r;
}

VerdictReport untrusted(const std::string& why) {
  VerdictReport v;
  for (CheckResult* c : {&v.check1_integrity, &v.check2_trusted_components, &v.check3_pubsub}) {
    c->pass = false;
    c->violations.push_back({"", why});
  }
  return v;
}

json check_json(const CheckResult& c) {
  json vs = json::array();
  for (const auto& v : c.violations) vs.push_back({{"app_id", v.app_id}, {"reason", v.reason}});
  return {{"pass", c.pass}, {"violations", vs}};
}

}  // namespace

const std::vector<std::string>& required_components() {
  static const std::vector<std::string> kAll = {
      std::string(component::kNormalWorldOs),     std::string(component::kMiddleware),
      std::string(component::kSecurityLayer),     std::string(component::kSanitizerFrontend),
      std::string(component::kAppLauncher),       std::string(component::kLaunchedApp)};
  return kAll;
}

void validate(const AuditPolicy& p) {
  if (p.sensitive_topics.contains(p.sanitized_topic)) {
    throw AuditError("policy: sanitized topic '" + p.sanitized_topic + "' is also listed as sensitive");
  }
  if (p.sanitizer_id.empty()) throw AuditError("policy: empty sanitizer_id");
}

std::string SigningKey::public_hex() const { return to_hex(public_key); }

SigningKey keygen(std::span<const std::uint8_t> seed) {
  ensure_sodium();
  if (seed.size() != crypto_sign_SEEDBYTES) throw AuditError("keygen: seed must be 32 bytes");
  SigningKey k;
  crypto_sign_seed_keypair(k.public_key.data(), k.secret_key.data(), seed.data());
  return k;
}

SigningKey keygen_from_text(std::string_view seed_text) {
  ensure_sodium();
  std::array<std::uint8_t, crypto_sign_SEEDBYTES> seed{};
  crypto_generichash(seed.data(), seed.size(), reinterpret_cast<const unsigned char*>(seed_text.data()),
                     seed_text.size(), nullptr, 0);
  return keygen(seed);
}

std::array<std::uint8_t, 64> sign(std::span<const std::uint8_t> message, const SigningKey& key) {
  ensure_sodium();
  std::array<std::uint8_t, 64> sig{};
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), key.secret_key.data());
  return sig;
}

bool verify(std::span<const std::uint8_t> message, std::span<const std::uint8_t> signature,
            std::span<const std::uint8_t> public_key) {
  ensure_sodium();
  if (signature.size() != crypto_sign_BYTES) throw AuditError("verify: signature must be 64 bytes");
  if (public_key.size() != crypto_sign_PUBLICKEYBYTES) throw AuditError("verify: public key must be 32 bytes");
  return crypto_sign_verify_detached(signature.data(), message.data(), message.size(), public_key.data()) == 0;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * bytes.size());
  for (const auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0 || !is_lower_hex(hex)) throw AuditError("invalid lowercase hex string");
  auto nibble = [](char c) { return static_cast<std::uint8_t>(c <= '9' ? c - '0' : c - 'a' + 10); };
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  return out;
}

std::string measure(std::string_view bytes) {
  ensure_sodium();
  std::array<std::uint8_t, crypto_hash_sha256_BYTES> d{};
  crypto_hash_sha256(d.data(), reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
  return to_hex(d);
}

std::string signed_payload(const AuditTrail& t) {
  return json{{"device_pubkey", t.device_pubkey}, {"entries", entries_json(t)}}.dump();
}

std::string canonical_json(const AuditTrail& t) {
  return json{{"device_pubkey", t.device_pubkey}, {"entries", entries_json(t)}, {"signature", t.signature}}.dump();
}

AuditTrail parse_trail(std::string_view text) {
  const json j = parse_json(text, "$");
  Walker::keys(j, "$", {"device_pubkey", "entries", "signature"});
  AuditTrail t;
  t.device_pubkey = Walker::hex(j["device_pubkey"], "$.device_pubkey", 32);
  t.signature = Walker::hex(j["signature"], "$.signature", 64);
  const json& entries = j["entries"];
  if (!entries.is_array()) throw AuditParseError("$.entries", "expected an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string path = "$.entries[" + std::to_string(i) + "]";
    const json& e = entries[i];
    Walker::keys(e, path, {"timestamp_ms", "manifest", "attestation"});
    AuditEntry entry;
    if (!e["timestamp_ms"].is_number_integer()) throw AuditParseError(path + ".timestamp_ms", "expected an integer");
    entry.timestamp_ms = e["timestamp_ms"].get<std::int64_t>();
    if (!t.entries.empty() && entry.timestamp_ms < t.entries.back().timestamp_ms) {
      throw AuditParseError(path + ".timestamp_ms", "timestamps decrease");
    }
    entry.manifest = parse_manifest(e["manifest"], path + ".manifest");
    entry.attestation = parse_attestation(e["attestation"], path + ".attestation");
    t.entries.push_back(std::move(entry));
  }
  return t;
}

AuditTrail new_trail(const SigningKey& key) {
  AuditTrail t;
  t.device_pubkey = key.public_hex();
  sign_trail(t, key);
  return t;
}

void sign_trail(AuditTrail& t, const SigningKey& key) {
  if (t.device_pubkey != key.public_hex()) throw AuditError("signing key does not match the trail's device key");
  const std::string payload = signed_payload(t);
  t.signature = to_hex(sign({reinterpret_cast<const std::uint8_t*>(payload.data()), payload.size()}, key));
}

AuditTrail record_launch(const AuditTrail& trail, const Manifest& manifest, const AttestationReport& measurements,
                         std::int64_t timestamp_ms, const SigningKey& key) {
  if (!trail.entries.empty() && timestamp_ms < trail.entries.back().timestamp_ms) {
    throw AuditError("record_launch: timestamp " + std::to_string(timestamp_ms) + " precedes the last entry");
  }
  for (const auto& c : required_components()) {
    if (!measurements.measurements.contains(c)) throw AuditError("record_launch: missing measurement for " + c);
  }
  AuditTrail next = trail;
  next.entries.push_back({timestamp_ms, manifest, measurements});
  sign_trail(next, key);
  return next;
}

AuditTrail snapshot(const AuditTrail& trail, std::int64_t t_start, std::int64_t t_end, const SigningKey& key) {
  if (t_start > t_end) throw AuditError("snapshot: t_start after t_end");
  AuditTrail out;
  out.device_pubkey = trail.device_pubkey;
  for (const auto& e : trail.entries) {
    if (e.timestamp_ms >= t_start && e.timestamp_ms <= t_end) out.entries.push_back(e);
  }
  sign_trail(out, key);
  return out;
}

VerdictReport verify_trail(const AuditTrail& trail, const AuditPolicy& policy) {
  validate(policy);
  if (policy.trusted_pubkey && *policy.trusted_pubkey != trail.device_pubkey) {
    return untrusted("untrusted trail: device key is not the trusted key");
  }
  bool ok = false;
  try {
    const std::string payload = signed_payload(trail);
    ok = verify({reinterpret_cast<const std::uint8_t*>(payload.data()), payload.size()}, from_hex(trail.signature),
                from_hex(trail.device_pubkey));
  } catch (const AuditError&) {
    ok = false;
  }
  if (!ok) return untrusted("untrusted trail");

  VerdictReport v;
  v.check1_integrity = measurement_check(
      trail, policy, {component::kNormalWorldOs, component::kMiddleware, component::kSecurityLayer});
  v.check2_trusted_components =
      measurement_check(trail, policy, {component::kSanitizerFrontend, component::kAppLauncher});
  v.check3_pubsub = pubsub_check(trail, policy);
  return v;
}

VerdictReport verify_trail_document(std::string_view text, const AuditPolicy& policy) {
  const AuditTrail t = parse_trail(text);
  if (canonical_json(t) != text) return untrusted("untrusted trail: not in canonical form");
  return verify_trail(t, policy);
}

std::string verdict_json(const VerdictReport& v) {
  return json{{"pass", v.pass()},
              {"check1_integrity", check_json(v.check1_integrity)},
              {"check2_trusted_components", check_json(v.check2_trusted_components)},
              {"check3_pubsub", check_json(v.check3_pubsub)}}
      .dump(2);
}

AuditPolicy parse_policy(std::string_view text) {
  const json j = parse_json(text, "$");
  Walker::keys(j, "$", {},
               {"sensitive_topics", "sanitizer_id", "sanitized_topic", "raw_consumer_allowlist", "trusted_pubkey",
                "expected_measurements"});
  AuditPolicy p;
  if (j.contains("sensitive_topics")) {
    const auto v = Walker::string_set(j["sensitive_topics"], "$.sensitive_topics");
    p.sensitive_topics = {v.begin(), v.end()};
  }
  if (j.contains("sanitizer_id")) p.sanitizer_id = Walker::string(j["sanitizer_id"], "$.sanitizer_id");
  if (j.contains("sanitized_topic")) p.sanitized_topic = Walker::string(j["sanitized_topic"], "$.sanitized_topic");
  if (j.contains("raw_consumer_allowlist")) {
    const auto v = Walker::string_set(j["raw_consumer_allowlist"], "$.raw_consumer_allowlist");
    p.raw_consumer_allowlist = {v.begin(), v.end()};
  }
  if (j.contains("trusted_pubkey")) p.trusted_pubkey = Walker::hex(j["trusted_pubkey"], "$.trusted_pubkey", 32);
  if (j.contains("expected_measurements")) p.expected = parse_measurements(j["expected_measurements"].dump());
  try {
    validate(p);
  } catch (const AuditError& e) {
    throw AuditParseError("$", e.what());
  }
  return p;
}

std::string policy_json(const AuditPolicy& p) {
  json j = {{"sensitive_topics", p.sensitive_topics},
            {"sanitizer_id", p.sanitizer_id},
            {"sanitized_topic", p.sanitized_topic},
            {"raw_consumer_allowlist", p.raw_consumer_allowlist}};
  if (p.trusted_pubkey) j["trusted_pubkey"] = *p.trusted_pubkey;
  if (!p.expected.empty()) j["expected_measurements"] = p.expected;
  return j.dump(2);
}

MeasurementDb parse_measurements(std::string_view text) {
  const json j = parse_json(text, "$");
  if (!j.is_object()) throw AuditParseError("$", "expected an object");
  MeasurementDb db;
  for (const auto& [k, v] : j.items()) db[k] = Walker::hex(v, "$." + k, 32);
  return db;
}

std::string measurements_json(const MeasurementDb& db) { return json(db).dump(2); }

Fixture compliant_fixture(std::string_view seed_text) {
  Fixture f;
  f.key = keygen_from_text(seed_text);
  for (const auto& c : required_components()) {
    if (c != component::kLaunchedApp) f.policy.expected[c] = measure(c + ":v1.0");
  }
  f.policy.trusted_pubkey = f.key.public_hex();

  struct App {
    const char* id;
    std::vector<std::string> pubs;
    std::vector<std::string> subs;
  };
  const std::vector<App> apps = {
      {"CameraDriver", {"VideoFeed"}, {}},
      {"Sanitizer-FE", {"PrivVideoFeed"}, {"VideoFeed"}},
      {"DeliveryNav", {"NavCmd"}, {"PrivVideoFeed", "Gps"}},
      {"Telemetry", {"Status"}, {"Gps", "NavCmd"}},
  };
  f.trail = new_trail(f.key);
  std::int64_t t = 1'700'000'000'000;
  for (const auto& a : apps) {
    AttestationReport r;
    r.measurements = f.policy.expected;
    r.measurements[std::string(component::kLaunchedApp)] = measure(std::string(a.id) + ":binary");
    const Manifest m{a.id, a.pubs, a.subs, measure(std::string(a.id) + ":cert")};
    f.trail = record_launch(f.trail, m, r, t, f.key);
    t += 1500;
  }
  return f;
}

AuditTrail tamper_measurement(const AuditTrail& trail, std::size_t entry, std::string_view comp,
                              const SigningKey& key) {
  AuditTrail t = trail;
  std::string& hex = t.entries.at(entry).attestation.measurements.at(std::string(comp));
  hex[0] = hex[0] == '0' ? '1' : '0';
  sign_trail(t, key);
  return t;
}

AuditTrail add_rogue_subscriber(const AuditTrail& trail, const AuditPolicy& policy, const SigningKey& key) {
  AttestationReport r;
  r.measurements = policy.expected;
  r.measurements[std::string(component::kLaunchedApp)] = measure("rogue:binary");
  const Manifest m{"rogue", {}, {*policy.sensitive_topics.begin()}, measure("rogue:cert")};
  const std::int64_t t = trail.entries.empty() ? 0 : trail.entries.back().timestamp_ms + 1;
  return record_launch(trail, m, r, t, key);
}

AuditTrail flip_signature_byte(const AuditTrail& trail, std::size_t index) {
  AuditTrail t = trail;
  std::vector<std::uint8_t> sig = from_hex(t.signature);
  sig.at(index) ^= 0x01;
  t.signature = to_hex(sig);
  return t;
}

}  // namespace privadome::audit
