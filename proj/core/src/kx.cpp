#include "mlmagma/kx.hpp"

#include "json.hpp"
#include "mlmagma/power.hpp"

namespace mlm::kx {

const char* to_string(SharedKeyMode mode) {
    return mode == SharedKeyMode::multiplicative ? "multiplicative" : "insecure-additive";
}

const char* to_string(SessionErrorKind kind) {
    switch (kind) {
        case SessionErrorKind::timeout: return "timeout";
        case SessionErrorKind::malformed: return "malformed message";
        case SessionErrorKind::parameter_mismatch: return "parameter mismatch";
        case SessionErrorKind::version: return "version";
        case SessionErrorKind::transport: return "transport";
        case SessionErrorKind::protocol: return "protocol";
    }
    return "?";
}

template <std::size_t N>
void validate(const PublicParams<N>& pub) {
    require_same_modulus(pub.params.modulus, pub.base.modulus(), "kx public parameters");
    if (pub.base.is_identity()) throw KxError("base vector is the identity; it generates only itself");
}

template <std::size_t N>
Keypair<N> keypair_from_secret(const PublicParams<N>& pub, std::uint64_t secret) {
    validate(pub);
    if (secret == 0) throw KxError("secret exponent must be positive");
    return Keypair<N>{secret, pow_fast(pub.base, secret, pub.params)};
}

template <std::size_t N>
Keypair<N> keygen(const PublicParams<N>& pub, unsigned bits, Rng& rng) {
    if (bits < 2 || bits > 64) throw KxError("exponent bits must be in [2, 64], got " + std::to_string(bits));
    const std::uint64_t low = std::uint64_t{1} << (bits - 1);
    // low + uniform in [0, low) covers [2^(bits-1), 2^bits), also for bits = 64.
    // A secret whose public value is e would be refused by the peer, so it
    // is redrawn. a^n = a^(n+1) = e forces a = e, which validate() excludes,
    // so this terminates.
    for (;;) {
        auto kp = keypair_from_secret(pub, low + uniform_below(rng, low));
        if (!kp.public_value.is_identity()) return kp;
    }
}

template <std::size_t N>
Vec<N> derive_shared(const Keypair<N>& own, const Vec<N>& peer_public, const PublicParams<N>& pub,
                     SharedKeyMode mode) {
    validate(pub);
    require_same_modulus(pub.params.modulus, peer_public.modulus(), "derive_shared");
    if (peer_public.is_identity()) throw KxError("peer public value is the identity");
    if (mode == SharedKeyMode::insecure_additive) return mul(own.public_value, peer_public, pub.params);
    return pow_fast(peer_public, own.secret, pub.params);
}

template <std::size_t N>
Transcript<N> run_local_exchange(const PublicParams<N>& pub, unsigned bits, Rng& rng, SharedKeyMode mode) {
    const Keypair<N> alice = keygen(pub, bits, rng);
    const Keypair<N> bob = keygen(pub, bits, rng);
    Vec<N> alice_key = derive_shared(alice, bob.public_value, pub, mode);
    Vec<N> bob_key = derive_shared(bob, alice.public_value, pub, mode);
    // Additive mode: alice computes A*B and bob B*A, equal by internal commutativity.
    const bool match = alice_key == bob_key;
    return Transcript<N>{pub,           mode, alice.secret, bob.secret, alice.public_value, bob.public_value,
                         alice_key,     bob_key, match};
}

namespace {

template <std::size_t N>
nlohmann::ordered_json vec_json(const Vec<N>& v) {
    auto j = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < N; ++i) j.push_back(v.value(i));
    return j;
}

template <std::size_t N>
nlohmann::ordered_json pub_json(const PublicParams<N>& pub) {
    nlohmann::ordered_json j;
    j["p"] = pub.params.modulus.value();
    j["dim"] = N;
    auto coeffs = nlohmann::ordered_json::array();
    for (const auto& c : pub.params.coeffs) coeffs.push_back(c.value);
    j["params"] = coeffs;
    j["base"] = vec_json(pub.base);
    return j;
}

nlohmann::ordered_json any_vec_json(const AnyVector& v) {
    return std::visit([](const auto& x) { return vec_json(x); }, v);
}

}  // namespace

template <std::size_t N>
std::string transcript_json(const Transcript<N>& t) {
    nlohmann::ordered_json j;
    j["public"] = pub_json(t.pub);
    j["mode"] = to_string(t.mode);
    j["alice"] = {{"secret", t.alice_secret}, {"public", vec_json(t.alice_public)}, {"key", vec_json(t.alice_key)}};
    j["bob"] = {{"secret", t.bob_secret}, {"public", vec_json(t.bob_public)}, {"key", vec_json(t.bob_key)}};
    j["keys_match"] = t.keys_match;
    return j.dump(2);
}

std::string to_string(const AnyVector& v) {
    return std::visit([](const auto& x) { return x.to_string(); }, v);
}

ParamsAnnounce to_announce(const AnyPublicParams& pub) {
    return std::visit(
        [](const auto& p) {
            ParamsAnnounce a;
            a.p = p.params.modulus.value();
            a.dim = static_cast<std::uint8_t>(p.base.kDim);
            for (const auto& c : p.params.coeffs) a.params.push_back(c.value);
            for (const auto& c : p.base.components()) a.base.push_back(c.value);
            return a;
        },
        pub);
}

namespace {

template <std::size_t N>
PublicParams<N> announce_to(const ParamsAnnounce& msg, PrimeModulus m) {
    MagmaParams<N> params(m);
    for (std::size_t i = 0; i < params.coeffs.size(); ++i) {
        if (msg.params[i] >= m.value()) throw DecodeError(DecodeErrorKind::non_canonical, "parameter");
        params.coeffs[i] = Residue{static_cast<std::uint32_t>(msg.params[i])};
    }
    PublicParams<N> pub{params, from_public_value<N>(PublicValue{msg.dim, msg.base}, m)};
    validate(pub);
    return pub;
}

}  // namespace

AnyPublicParams from_announce(const ParamsAnnounce& msg) {
    if (msg.p < 3 || msg.p >= PrimeModulus::kMaxExclusive || !is_prime(msg.p)) {
        throw DecodeError(DecodeErrorKind::bad_modulus, "p = " + std::to_string(msg.p));
    }
    const PrimeModulus m = PrimeModulus::make(msg.p);
    if (msg.dim == 3 && msg.params.size() == 5 && msg.base.size() == 3) return announce_to<3>(msg, m);
    if (msg.dim == 4 && msg.params.size() == 9 && msg.base.size() == 4) return announce_to<4>(msg, m);
    throw DecodeError(DecodeErrorKind::bad_dimension, "inconsistent parameter announcement");
}

template <std::size_t N>
PublicValue to_public_value(const Vec<N>& v) {
    PublicValue msg;
    msg.dim = static_cast<std::uint8_t>(N);
    for (const auto& c : v.components()) msg.components.push_back(c.value);
    return msg;
}

template <std::size_t N>
Vec<N> from_public_value(const PublicValue& msg, PrimeModulus m) {
    if (msg.dim != N || msg.components.size() != N) {
        throw DecodeError(DecodeErrorKind::bad_dimension,
                          "expected dimension " + std::to_string(N) + ", got " + std::to_string(msg.dim));
    }
    Vec<N> v(m);
    for (std::size_t i = 0; i < N; ++i) {
        if (msg.components[i] >= m.value()) {
            throw DecodeError(DecodeErrorKind::non_canonical, "component " + std::to_string(msg.components[i]));
        }
        v[i] = Residue{static_cast<std::uint32_t>(msg.components[i])};
    }
    return v;
}

// ---------------------------------------------------------------------------
// Sessions

namespace {

void send(ByteStream& stream, const Message& msg) {
    try {
        stream.write_all(encode_message(msg));
    } catch (const TransportError& e) {
        throw SessionError(e.is_timeout() ? SessionErrorKind::timeout : SessionErrorKind::transport, e.what());
    }
}

Message receive(ByteStream& stream, std::optional<PrimeModulus> m) {
    try {
        return read_message(stream, m);
    } catch (const TransportError& e) {
        throw SessionError(e.is_timeout() ? SessionErrorKind::timeout : SessionErrorKind::transport, e.what());
    } catch (const DecodeError& e) {
        const auto kind = e.kind() == DecodeErrorKind::bad_version ? SessionErrorKind::version
                                                                   : SessionErrorKind::malformed;
        throw SessionError(kind, e.what());
    }
}

template <std::size_t N>
SessionResult finish(Role role, ByteStream& stream, const PublicParams<N>& pub, unsigned bits, Rng& rng,
                     SharedKeyMode mode) {
    const PrimeModulus m = pub.params.modulus;
    const Keypair<N> own = keygen(pub, bits, rng);
    auto read_peer = [&] {
        Message msg = receive(stream, m);
        const auto* value = std::get_if<PublicValue>(&msg.body);
        if (value == nullptr) throw SessionError(SessionErrorKind::protocol, "expected a public-value message");
        try {
            return from_public_value<N>(*value, m);
        } catch (const DecodeError& e) {
            throw SessionError(SessionErrorKind::malformed, e.what());
        }
    };

    Vec<N> peer(m);
    if (role == Role::initiator) {
        send(stream, Message{kWireVersion, to_public_value(own.public_value)});
        peer = read_peer();
    } else {
        peer = read_peer();
        send(stream, Message{kWireVersion, to_public_value(own.public_value)});
    }
    if (peer.is_identity()) throw SessionError(SessionErrorKind::protocol, "peer sent the identity");
    // Initiator is "alice": in additive mode both sides compute A * B so the
    // keys agree without leaning on commutativity.
    Vec<N> key = mode == SharedKeyMode::insecure_additive && role == Role::responder
                     ? mul(peer, own.public_value, pub.params)
                     : derive_shared(own, peer, pub, mode);
    return SessionResult{pub, own.secret, own.public_value, peer, key};
}

}  // namespace

SessionResult run_session(Role role, ByteStream& stream, const std::optional<AnyPublicParams>& pub, unsigned bits,
                          Rng& rng, SharedKeyMode mode) {
    auto agree = [&]() -> AnyPublicParams {
        if (role == Role::initiator) {
            if (!pub) throw KxError("initiator needs public parameters");
            std::visit([](const auto& p) { validate(p); }, *pub);
            send(stream, Message{kWireVersion, to_announce(*pub)});
            return *pub;
        }
        Message msg = receive(stream, std::nullopt);
        const auto* announce = std::get_if<ParamsAnnounce>(&msg.body);
        if (announce == nullptr) throw SessionError(SessionErrorKind::protocol, "expected a parameter announcement");
        std::optional<AnyPublicParams> got;
        try {
            got = from_announce(*announce);
        } catch (const KxError& e) {
            throw SessionError(SessionErrorKind::malformed, e.what());
        }
        if (pub && !(to_announce(*pub) == *announce)) {
            throw SessionError(SessionErrorKind::parameter_mismatch,
                               "peer announced p=" + std::to_string(announce->p) + " dim=" +
                                   std::to_string(announce->dim) + " which differs from the expected parameters");
        }
        return *got;
    };
    const AnyPublicParams agreed = agree();
    return std::visit([&](const auto& p) { return finish(role, stream, p, bits, rng, mode); }, agreed);
}

std::string session_json(const SessionResult& r, Role role, SharedKeyMode mode) {
    nlohmann::ordered_json j;
    j["role"] = role == Role::initiator ? "initiator" : "responder";
    j["mode"] = to_string(mode);
    j["public"] = std::visit([](const auto& p) { return pub_json(p); }, r.pub);
    j["secret"] = r.secret;
    j["own_public"] = any_vec_json(r.own_public);
    j["peer_public"] = any_vec_json(r.peer_public);
    j["shared_key"] = any_vec_json(r.shared_key);
    return j.dump(2);
}

#define MLM_KX_INSTANTIATE(N)                                                                              \
    template void validate<N>(const PublicParams<N>&);                                                     \
    template Keypair<N> keygen<N>(const PublicParams<N>&, unsigned, Rng&);                                 \
    template Keypair<N> keypair_from_secret<N>(const PublicParams<N>&, std::uint64_t);                     \
    template Vec<N> derive_shared<N>(const Keypair<N>&, const Vec<N>&, const PublicParams<N>&, SharedKeyMode); \
    template Transcript<N> run_local_exchange<N>(const PublicParams<N>&, unsigned, Rng&, SharedKeyMode);   \
    template std::string transcript_json<N>(const Transcript<N>&);                                         \
    template PublicValue to_public_value<N>(const Vec<N>&);                                                \
    template Vec<N> from_public_value<N>(const PublicValue&, PrimeModulus);

MLM_KX_INSTANTIATE(3)
MLM_KX_INSTANTIATE(4)

}  // namespace mlm::kx
