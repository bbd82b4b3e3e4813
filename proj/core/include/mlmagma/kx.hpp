#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mlmagma/magma.hpp"
#include "mlmagma/random.hpp"
#include "mlmagma/transport.hpp"

namespace mlm::kx {

class KxError : public Error {
public:
    using Error::Error;
};

/// How each party turns its secret and the peer's public value into a key.
enum class SharedKeyMode {
    /// K = (peer public)^own secret = a^(m n).
    multiplicative,
    /// K = own public * peer public = a^(m + n). Anyone holding the two
    /// public values can compute this; it exists for study only.
    insecure_additive,
};

const char* to_string(SharedKeyMode mode);

template <std::size_t N>
struct PublicParams {
    MagmaParams<N> params;
    Vec<N> base;

    bool operator==(const PublicParams&) const = default;
};

/// Throws KxError if the base is the identity or moduli differ.
template <std::size_t N>
void validate(const PublicParams<N>& pub);

template <std::size_t N>
struct Keypair {
    std::uint64_t secret = 0;
    Vec<N> public_value;
};

/// Secret drawn uniformly from [2^(bits-1), 2^bits), 2 <= bits <= 64,
/// redrawn if its public value would be the identity.
template <std::size_t N>
Keypair<N> keygen(const PublicParams<N>& pub, unsigned bits, Rng& rng);

template <std::size_t N>
Keypair<N> keypair_from_secret(const PublicParams<N>& pub, std::uint64_t secret);

/// Throws KxError when the peer value has another modulus or is the
/// identity.
template <std::size_t N>
Vec<N> derive_shared(const Keypair<N>& own, const Vec<N>& peer_public, const PublicParams<N>& pub,
                     SharedKeyMode mode = SharedKeyMode::multiplicative);

template <std::size_t N>
struct Transcript {
    PublicParams<N> pub;
    SharedKeyMode mode = SharedKeyMode::multiplicative;
    std::uint64_t alice_secret = 0;
    std::uint64_t bob_secret = 0;
    Vec<N> alice_public;
    Vec<N> bob_public;
    Vec<N> alice_key;
    Vec<N> bob_key;
    bool keys_match = false;
};

/// Both roles in one process.
template <std::size_t N>
Transcript<N> run_local_exchange(const PublicParams<N>& pub, unsigned bits, Rng& rng,
                                 SharedKeyMode mode = SharedKeyMode::multiplicative);

template <std::size_t N>
std::string transcript_json(const Transcript<N>& t);

// ---------------------------------------------------------------------------
// Wire format, big-endian:
//   "MLKX" | version:u8 | kind:u8 | body
//   kind 0x01 parameter announce: p:u64 | dim:u8 | count:u8 | count x u64 | dim x u64 (base)
//   kind 0x02 public value:       dim:u8 | dim x u64

inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr std::uint8_t kKindParams = 0x01;
inline constexpr std::uint8_t kKindPublic = 0x02;

struct ParamsAnnounce {
    std::uint64_t p = 0;
    std::uint8_t dim = 0;
    std::vector<std::uint64_t> params;
    std::vector<std::uint64_t> base;

    bool operator==(const ParamsAnnounce&) const = default;
};

struct PublicValue {
    std::uint8_t dim = 0;
    std::vector<std::uint64_t> components;

    bool operator==(const PublicValue&) const = default;
};

struct Message {
    std::uint8_t version = kWireVersion;
    std::variant<ParamsAnnounce, PublicValue> body;

    bool operator==(const Message&) const = default;
};

enum class DecodeErrorKind {
    bad_magic,
    bad_version,
    bad_kind,
    truncated,
    bad_dimension,
    bad_modulus,
    non_canonical,
    trailing_bytes,
};

const char* to_string(DecodeErrorKind kind);

class DecodeError : public KxError {
public:
    DecodeError(DecodeErrorKind kind, const std::string& detail)
        : KxError(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}
    DecodeErrorKind kind() const { return kind_; }

private:
    DecodeErrorKind kind_;
};

std::vector<std::uint8_t> encode_message(const Message& msg);

/// Decodes exactly one message occupying all of `bytes`. Parameter
/// announcements are fully validated (prime p, canonical residues). Public
/// values are checked for canonicality against `modulus` when given.
Message decode_message(std::span<const std::uint8_t> bytes, std::optional<PrimeModulus> modulus = std::nullopt);

/// Reads one message from a stream, never requesting more bytes than the
/// header fields declare.
Message read_message(ByteStream& stream, std::optional<PrimeModulus> modulus = std::nullopt);

// ---------------------------------------------------------------------------
// Runtime-dimension wrappers used by sessions and the CLI.

using AnyPublicParams = std::variant<PublicParams<3>, PublicParams<4>>;
using AnyVector = std::variant<Vector3, Vector4>;

std::string to_string(const AnyVector& v);
ParamsAnnounce to_announce(const AnyPublicParams& pub);
AnyPublicParams from_announce(const ParamsAnnounce& msg);

template <std::size_t N>
PublicValue to_public_value(const Vec<N>& v);

/// Throws DecodeError on a dimension mismatch or non-canonical component.
template <std::size_t N>
Vec<N> from_public_value(const PublicValue& msg, PrimeModulus m);

enum class Role { initiator, responder };

enum class SessionErrorKind { timeout, malformed, parameter_mismatch, version, transport, protocol };

const char* to_string(SessionErrorKind kind);

class SessionError : public KxError {
public:
    SessionError(SessionErrorKind kind, const std::string& detail)
        : KxError(std::string("session aborted (") + to_string(kind) + "): " + detail), kind_(kind) {}
    SessionErrorKind kind() const { return kind_; }

private:
    SessionErrorKind kind_;
};

struct SessionResult {
    AnyPublicParams pub;
    std::uint64_t secret = 0;
    AnyVector own_public;
    AnyVector peer_public;
    AnyVector shared_key;
};

/// Initiator: announce parameters, send its public value, read the reply.
/// Responder: read the announcement (abort if `expected` is set and
/// differs), read the initiator's value, reply with its own. Both derive.
SessionResult run_session(Role role, ByteStream& stream, const std::optional<AnyPublicParams>& pub, unsigned bits,
                          Rng& rng, SharedKeyMode mode = SharedKeyMode::multiplicative);

std::string session_json(const SessionResult& r, Role role, SharedKeyMode mode);

}  // namespace mlm::kx
