#pragma once

// Signed launch-time audit trail and the citizen-side verifier.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace privadome::audit {

class AuditError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed trail, policy or measurement file. `path` points into the document.
class AuditParseError : public AuditError {
 public:
  AuditParseError(std::string path, const std::string& reason)
      : AuditError(path + ": " + reason), path_(std::move(path)) {}
  [[nodiscard]] const std::string& path() const { return path_; }

 private:
  std::string path_;
};

namespace component {
inline constexpr std::string_view kNormalWorldOs = "normal_world_os";
inline constexpr std::string_view kMiddleware = "middleware";
inline constexpr std::string_view kSecurityLayer = "security_layer";
inline constexpr std::string_view kSanitizerFrontend = "sanitizer_frontend";
inline constexpr std::string_view kAppLauncher = "app_launcher";
inline constexpr std::string_view kLaunchedApp = "launched_app";
}  // namespace component

/// Every attestation report must carry exactly these components.
const std::vector<std::string>& required_components();

struct Manifest {
  std::string app_id;
  std::vector<std::string> publishes;
  std::vector<std::string> subscribes;
  std::string cert_fingerprint;  ///< lowercase hex
  friend bool operator==(const Manifest&, const Manifest&) = default;
};

struct AttestationReport {
  std::map<std::string, std::string> measurements;  ///< component -> lowercase hex digest
  friend bool operator==(const AttestationReport&, const AttestationReport&) = default;
};

struct AuditEntry {
  std::int64_t timestamp_ms = 0;  ///< UTC
  Manifest manifest;
  AttestationReport attestation;
  friend bool operator==(const AuditEntry&, const AuditEntry&) = default;
};

struct AuditTrail {
  std::string device_pubkey;  ///< hex, 32 bytes
  std::vector<AuditEntry> entries;
  std::string signature;  ///< hex, 64 bytes
  friend bool operator==(const AuditTrail&, const AuditTrail&) = default;
};

using MeasurementDb = std::map<std::string, std::string>;

struct AuditPolicy {
  std::set<std::string> sensitive_topics{"VideoFeed"};
  std::string sanitizer_id = "Sanitizer-FE";
  std::string sanitized_topic = "PrivVideoFeed";
  std::set<std::string> raw_consumer_allowlist;
  MeasurementDb expected;
  /// When set, the trail must be signed by this device key (hex).
  std::optional<std::string> trusted_pubkey;
};

void validate(const AuditPolicy& p);

struct Violation {
  std::string app_id;
  std::string reason;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct CheckResult {
  bool pass = true;
  std::vector<Violation> violations;
};

struct VerdictReport {
  CheckResult check1_integrity;
  CheckResult check2_trusted_components;
  CheckResult check3_pubsub;
  [[nodiscard]] bool pass() const {
    return check1_integrity.pass && check2_trusted_components.pass && check3_pubsub.pass;
  }
};

// Signatures (Ed25519).

struct SigningKey {
  std::array<std::uint8_t, 32> public_key{};
  std::array<std::uint8_t, 64> secret_key{};
  [[nodiscard]] std::string public_hex() const;
};

/// Deterministic: the same 32-byte seed always yields the same key.
SigningKey keygen(std::span<const std::uint8_t> seed);
/// Hashes arbitrary text into a seed first.
SigningKey keygen_from_text(std::string_view seed_text);
std::array<std::uint8_t, 64> sign(std::span<const std::uint8_t> message, const SigningKey& key);
/// Throws AuditError on wrong key or signature lengths.
bool verify(std::span<const std::uint8_t> message, std::span<const std::uint8_t> signature,
            std::span<const std::uint8_t> public_key);

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Strict lowercase hex; throws AuditError otherwise.
std::vector<std::uint8_t> from_hex(std::string_view hex);
/// SHA-256 digest as lowercase hex.
std::string measure(std::string_view bytes);

// Canonical serialization: sorted keys, no whitespace, UTF-8.

std::string canonical_json(const AuditTrail& trail);
/// The bytes the signature covers: {device_pubkey, entries}.
std::string signed_payload(const AuditTrail& trail);
/// Parses a trail document, enforcing the schema. Does not check canonical form or signature.
AuditTrail parse_trail(std::string_view json_text);

AuditTrail new_trail(const SigningKey& key);
void sign_trail(AuditTrail& trail, const SigningKey& key);

/// Appends one launch and re-signs. Throws AuditError on a time regression.
AuditTrail record_launch(const AuditTrail& trail, const Manifest& manifest, const AttestationReport& measurements,
                         std::int64_t timestamp_ms, const SigningKey& key);
/// Entries with timestamp in [t_start, t_end], freshly signed.
AuditTrail snapshot(const AuditTrail& trail, std::int64_t t_start, std::int64_t t_end, const SigningKey& key);

VerdictReport verify_trail(const AuditTrail& trail, const AuditPolicy& policy);
/// Parses and verifies a serialized trail. Bytes that are not the canonical
/// re-serialization of what they parse to are reported as untrusted.
VerdictReport verify_trail_document(std::string_view json_text, const AuditPolicy& policy);

std::string verdict_json(const VerdictReport& v);

AuditPolicy parse_policy(std::string_view json_text);
std::string policy_json(const AuditPolicy& p);
MeasurementDb parse_measurements(std::string_view json_text);
std::string measurements_json(const MeasurementDb& db);

// Fixtures.

struct Fixture {
  SigningKey key;
  AuditTrail trail;
  AuditPolicy policy;
};

/// A small compliant trail: sanitizer, camera driver, two downstream apps.
Fixture compliant_fixture(std::string_view seed_text = "privadome-fixture");
/// Flips one hex digit of a measurement and re-signs.
AuditTrail tamper_measurement(const AuditTrail& trail, std::size_t entry, std::string_view component,
                              const SigningKey& key);
/// Appends a launch of app "rogue" subscribing to the first sensitive topic, re-signed.
AuditTrail add_rogue_subscriber(const AuditTrail& trail, const AuditPolicy& policy, const SigningKey& key);
/// Flips one byte of the signature without re-signing.
AuditTrail flip_signature_byte(const AuditTrail& trail, std::size_t index = 0);

}  // namespace privadome::audit
