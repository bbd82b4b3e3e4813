#include <gtest/gtest.h>

#include <thread>

#include "helpers.hpp"
#include "json.hpp"
#include "mlmagma/dip.hpp"
#include "mlmagma/kx.hpp"
#include "mlmagma/power.hpp"

using namespace mlm;
using namespace mlm::kx;
using testing_helpers::mod;

namespace {

PublicParams<3> scalar_pub() {
    const auto m = mod(101);
    return {Params3(m, {1, 1, 1, 1, 1}), Vector3(m, {1, 0, 0})};
}

PublicParams<3> generic_pub() {
    const auto m = mod(101);
    return {Params3(m, {9, 19, 1, 1, 2}), Vector3(m, {0, 1, 7})};
}

std::vector<std::uint8_t> bytes_of(std::initializer_list<int> xs) {
    std::vector<std::uint8_t> v;
    for (int x : xs) v.push_back(static_cast<std::uint8_t>(x));
    return v;
}

}  // namespace

TEST(Kx, KeygenRangeAndDeterminism) {
    const auto pub = generic_pub();
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const auto kp = keygen(pub, 3, rng);
        ASSERT_GE(kp.secret, 4u);
        ASSERT_LE(kp.secret, 7u);
        ASSERT_EQ(kp.public_value, pow_fast(pub.base, kp.secret, pub.params));
    }
    Rng r1(99), r2(99);
    EXPECT_EQ(keygen(pub, 64, r1).secret, keygen(pub, 64, r2).secret);
    Rng r3(5);
    EXPECT_GE(keygen(pub, 64, r3).secret, std::uint64_t{1} << 63);
    EXPECT_THROW(keygen(pub, 1, r3), KxError);
    EXPECT_THROW(keygen(pub, 65, r3), KxError);
}

TEST(Kx, KeygenAvoidsIdentityPublic) {
    // a = (1, 0, 0) over Z_7: a^n = (2^n - 1, 0, 0) and 2^3 = 1, so a^3 = e.
    const auto m = mod(7);
    const PublicParams<3> pub{Params3(m, {1, 1, 1, 1, 1}), Vector3(m, {1, 0, 0})};
    EXPECT_TRUE(keypair_from_secret(pub, 3).public_value.is_identity());
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto kp = keygen(pub, 2, rng);
        ASSERT_EQ(kp.secret, 2u);
        ASSERT_FALSE(kp.public_value.is_identity());
    }
}

TEST(Kx, ScalarExample) {
    const auto pub = scalar_pub();
    const auto& m = pub.params.modulus;
    const auto alice = keypair_from_secret(pub, 3);
    const auto bob = keypair_from_secret(pub, 4);
    EXPECT_EQ(alice.public_value, Vector3(m, {7, 0, 0}));
    EXPECT_EQ(bob.public_value, Vector3(m, {15, 0, 0}));
    EXPECT_EQ(derive_shared(alice, bob.public_value, pub), Vector3(m, {55, 0, 0}));
    EXPECT_EQ(derive_shared(bob, alice.public_value, pub), Vector3(m, {55, 0, 0}));
    // a^(3+4) = 2^7 - 1 = 127 = 26 mod 101
    EXPECT_EQ(derive_shared(alice, bob.public_value, pub, SharedKeyMode::insecure_additive), Vector3(m, {26, 0, 0}));

    const auto one = keypair_from_secret(pub, 1);
    EXPECT_EQ(derive_shared(one, one.public_value, pub), pub.base);
}

TEST(Kx, Rejections) {
    const auto pub = generic_pub();
    const auto kp = keypair_from_secret(pub, 5);
    EXPECT_THROW(derive_shared(kp, identity<3>(pub.params.modulus), pub), KxError);
    EXPECT_THROW(derive_shared(kp, Vector3(mod(103), {1, 2, 3}), pub), Error);
    PublicParams<3> bad{pub.params, identity<3>(pub.params.modulus)};
    EXPECT_THROW(validate(bad), KxError);
    EXPECT_THROW(keypair_from_secret(pub, 0), KxError);
}

TEST(Kx, RandomExchangesAgree) {
    Rng rng(71);
    for (int t = 0; t < 100; ++t) {
        const auto m = mod(t % 2 ? 101 : 2147483647);
        PublicParams<3> pub{random_params<3>(rng, m), random_vector<3>(rng, m)};
        if (pub.base.is_identity()) continue;
        const auto tr = run_local_exchange(pub, 16, rng);
        ASSERT_TRUE(tr.keys_match);
        ASSERT_EQ(tr.alice_key, pow_fast(pub.base, tr.alice_secret * tr.bob_secret, pub.params));
        const auto add = run_local_exchange(pub, 16, rng, SharedKeyMode::insecure_additive);
        ASSERT_TRUE(add.keys_match);
        ASSERT_EQ(add.alice_key, pow_fast(pub.base, add.alice_secret + add.bob_secret, pub.params));
    }
    const auto m = mod(61);
    PublicParams<4> pub4{Params4(m, {1, 2, 3, 4, 5, 6, 7, 8, 9}), Vector4(m, {1, 2, 3, 4})};
    EXPECT_TRUE(run_local_exchange(pub4, 32, rng).keys_match);
}

TEST(Kx, SmallestExponentsAndDipRecovery) {
    const auto pub = generic_pub();
    Rng rng(73);
    const auto tiny = run_local_exchange(pub, 2, rng);
    EXPECT_TRUE(tiny.keys_match);
    EXPECT_GE(tiny.alice_secret, 2u);
    EXPECT_LE(tiny.alice_secret, 3u);

    const auto t = run_local_exchange(pub, 12, rng);
    for (const auto& pubv : {t.alice_public, t.bob_public}) {
        const auto r = dip_bruteforce(DipInstance<3>{pub.base, pubv, pub.params, std::uint64_t{1} << 12});
        ASSERT_TRUE(r.exponent);
        EXPECT_EQ(pow_iter(pub.base, *r.exponent, pub.params), pubv);
    }
    const auto j = nlohmann::json::parse(transcript_json(t));
    EXPECT_EQ(j["keys_match"], true);
    EXPECT_EQ(j["mode"], "multiplicative");
    EXPECT_EQ(j["public"]["p"], 101);
}

// ---------------------------------------------------------------------------
// Codec

TEST(KxCodec, PublicValueLayout) {
    const auto m = mod(101);
    const auto msg = Message{kWireVersion, to_public_value(Vector3(m, {7, 0, 0}))};
    const auto b = encode_message(msg);
    const auto expect = bytes_of({'M', 'L', 'K', 'X', 1, 2, 3,  //
                                  0, 0, 0, 0, 0, 0, 0, 7,       //
                                  0, 0, 0, 0, 0, 0, 0, 0,       //
                                  0, 0, 0, 0, 0, 0, 0, 0});
    EXPECT_EQ(b, expect);
    EXPECT_EQ(b.size(), 31u);
    EXPECT_EQ(decode_message(b, m), msg);
}

TEST(KxCodec, ParamsLayoutAndRoundTrip) {
    const AnyPublicParams pub = generic_pub();
    const Message msg{kWireVersion, to_announce(pub)};
    const auto b = encode_message(msg);
    ASSERT_EQ(b.size(), 6u + 8 + 1 + 1 + 5 * 8 + 3 * 8);
    EXPECT_EQ(b[5], kKindParams);
    EXPECT_EQ(b[13], 101);  // low byte of p
    EXPECT_EQ(b[14], 3);    // dim
    EXPECT_EQ(b[15], 5);    // parameter count
    EXPECT_EQ(b[23], 9);    // A
    const auto back = decode_message(b);
    EXPECT_EQ(back, msg);
    EXPECT_EQ(encode_message(back), b);
    EXPECT_EQ(to_announce(from_announce(std::get<ParamsAnnounce>(back.body))), std::get<ParamsAnnounce>(msg.body));

    const auto m = mod(61);
    const AnyPublicParams pub4 = PublicParams<4>{Params4(m, {1, 2, 3, 4, 5, 6, 7, 8, 9}), Vector4(m, {1, 2, 3, 4})};
    const auto b4 = encode_message(Message{kWireVersion, to_announce(pub4)});
    EXPECT_EQ(b4.size(), 6u + 10 + 9 * 8 + 4 * 8);
    EXPECT_EQ(encode_message(decode_message(b4)), b4);
}

TEST(KxCodec, DistinctDecodeErrors) {
    const auto m = mod(101);
    const auto good = encode_message(Message{kWireVersion, to_public_value(Vector3(m, {7, 0, 0}))});
    auto kind_of = [&](std::vector<std::uint8_t> b) {
        try {
            decode_message(b, m);
        } catch (const DecodeError& e) {
            return e.kind();
        }
        ADD_FAILURE() << "no error";
        return DecodeErrorKind::trailing_bytes;
    };
    auto bad_magic = good;
    bad_magic[0] = 'X';
    EXPECT_EQ(kind_of(bad_magic), DecodeErrorKind::bad_magic);
    auto v2 = good;
    v2[4] = 2;
    EXPECT_EQ(kind_of(v2), DecodeErrorKind::bad_version);
    auto kind = good;
    kind[5] = 9;
    EXPECT_EQ(kind_of(kind), DecodeErrorKind::bad_kind);
    EXPECT_EQ(kind_of({good.begin(), good.end() - 1}), DecodeErrorKind::truncated);
    EXPECT_EQ(kind_of({good.begin(), good.begin() + 3}), DecodeErrorKind::truncated);
    auto dim = good;
    dim[6] = 5;
    EXPECT_EQ(kind_of(dim), DecodeErrorKind::bad_dimension);
    auto big = good;
    big[14] = 101;
    EXPECT_EQ(kind_of(big), DecodeErrorKind::non_canonical);
    auto trailing = good;
    trailing.push_back(0);
    EXPECT_EQ(kind_of(trailing), DecodeErrorKind::trailing_bytes);

    auto params = encode_message(Message{kWireVersion, to_announce(AnyPublicParams{generic_pub()})});
    params[13] = 100;  // p = 100
    EXPECT_EQ(kind_of(params), DecodeErrorKind::bad_modulus);
    params[13] = 101;
    params[15] = 9;  // 9 parameters with dimension 3
    EXPECT_EQ(kind_of(params), DecodeErrorKind::bad_dimension);
}

TEST(KxCodec, RandomRoundTrips) {
    Rng rng(79);
    for (int t = 0; t < 300; ++t) {
        const auto m = mod(t % 2 ? 101 : 2147483647);
        const AnyPublicParams pub = PublicParams<3>{random_params<3>(rng, m), random_vector<3>(rng, m)};
        if (std::get<0>(pub).base.is_identity()) continue;
        const Message a{kWireVersion, to_announce(pub)};
        ASSERT_EQ(decode_message(encode_message(a)), a);
        const Message v{kWireVersion, to_public_value(random_vector<3>(rng, m))};
        ASSERT_EQ(decode_message(encode_message(v), m), v);
    }
}

TEST(KxCodec, StreamReadsOnlyDeclaredLength) {
    auto [x, y] = make_memory_pipe(std::chrono::milliseconds(500));
    const auto m = mod(101);
    const Message first{kWireVersion, to_public_value(Vector3(m, {1, 2, 3}))};
    const Message second{kWireVersion, to_public_value(Vector3(m, {4, 5, 6}))};
    auto b = encode_message(first);
    const auto b2 = encode_message(second);
    b.insert(b.end(), b2.begin(), b2.end());
    x->write_all(b);
    EXPECT_EQ(read_message(*y, m), first);
    EXPECT_EQ(read_message(*y, m), second);
    try {
        read_message(*y, m);
        FAIL() << "expected timeout";
    } catch (const TransportError& e) {
        EXPECT_TRUE(e.is_timeout());
    }
}

// ---------------------------------------------------------------------------
// Sessions

TEST(KxSession, MemoryPipe) {
    auto [ini, resp] = make_memory_pipe(std::chrono::milliseconds(2000));
    const AnyPublicParams pub = generic_pub();
    SessionResult responder_result{pub, 0, Vector3(mod(101)), Vector3(mod(101)), Vector3(mod(101))};
    std::thread t([&, &resp = resp] {
        Rng rng(2);
        responder_result = run_session(Role::responder, *resp, std::nullopt, 16, rng);
    });
    Rng rng(1);
    const auto r = run_session(Role::initiator, *ini, pub, 16, rng);
    t.join();
    EXPECT_EQ(to_string(r.shared_key), to_string(responder_result.shared_key));
    EXPECT_EQ(to_string(r.own_public), to_string(responder_result.peer_public));
    EXPECT_EQ(to_announce(responder_result.pub), to_announce(pub));
    const auto j = nlohmann::json::parse(session_json(r, Role::initiator, SharedKeyMode::multiplicative));
    EXPECT_EQ(j["role"], "initiator");
}

TEST(KxSession, AdditiveModeAgrees) {
    auto [ini, resp] = make_memory_pipe(std::chrono::milliseconds(2000));
    const AnyPublicParams pub = generic_pub();
    std::string responder_key;
    std::thread t([&, &resp = resp] {
        Rng rng(4);
        responder_key =
            to_string(run_session(Role::responder, *resp, pub, 16, rng, SharedKeyMode::insecure_additive).shared_key);
    });
    Rng rng(3);
    const auto r = run_session(Role::initiator, *ini, pub, 16, rng, SharedKeyMode::insecure_additive);
    t.join();
    EXPECT_EQ(to_string(r.shared_key), responder_key);
}

TEST(KxSession, LoopbackTcp) {
    auto listener = TcpListener::bind("127.0.0.1", 0);
    const AnyPublicParams pub = generic_pub();
    std::string server_key;
    std::thread server([&] {
        auto s = listener.accept(std::chrono::milliseconds(5000));
        Rng rng(8);
        server_key = to_string(run_session(Role::responder, s, pub, 32, rng).shared_key);
    });
    auto c = TcpStream::connect("127.0.0.1", listener.port(), std::chrono::milliseconds(5000));
    Rng rng(7);
    const auto r = run_session(Role::initiator, c, pub, 32, rng);
    server.join();
    EXPECT_EQ(to_string(r.shared_key), server_key);
}

namespace {

SessionErrorKind responder_abort(const std::vector<std::uint8_t>& bytes,
                                 const std::optional<AnyPublicParams>& expected = std::nullopt) {
    auto [x, y] = make_memory_pipe(std::chrono::milliseconds(300));
    x->write_all(bytes);
    Rng rng(1);
    try {
        run_session(Role::responder, *y, expected, 16, rng);
    } catch (const SessionError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "session did not abort";
    return SessionErrorKind::protocol;
}

}  // namespace

TEST(KxSession, Aborts) {
    const AnyPublicParams pub = generic_pub();
    auto announce = encode_message(Message{kWireVersion, to_announce(pub)});

    auto magic = announce;
    magic[1] = 'X';
    EXPECT_EQ(responder_abort(magic), SessionErrorKind::malformed);

    auto v2 = announce;
    v2[4] = 2;
    EXPECT_EQ(responder_abort(v2), SessionErrorKind::version);

    // Parameters arrive, then nothing: the read of the public value times out.
    EXPECT_EQ(responder_abort(announce), SessionErrorKind::timeout);

    const auto m = mod(101);
    const AnyPublicParams other = PublicParams<3>{Params3(m, {1, 2, 3, 4, 5}), Vector3(m, {0, 1, 7})};
    EXPECT_EQ(responder_abort(announce, other), SessionErrorKind::parameter_mismatch);

    // A public value where the announcement should be.
    EXPECT_EQ(responder_abort(encode_message(Message{kWireVersion, to_public_value(Vector3(m, {1, 2, 3}))})),
              SessionErrorKind::protocol);

    // Identity public value from the peer.
    auto with_identity = announce;
    const auto e = encode_message(Message{kWireVersion, to_public_value(identity<3>(m))});
    with_identity.insert(with_identity.end(), e.begin(), e.end());
    EXPECT_EQ(responder_abort(with_identity), SessionErrorKind::protocol);
}

TEST(KxSession, InitiatorSeesClosedPeer) {
    auto [ini, resp] = make_memory_pipe(std::chrono::milliseconds(500));
    resp.reset();
    Rng rng(1);
    try {
        run_session(Role::initiator, *ini, AnyPublicParams{generic_pub()}, 16, rng);
        FAIL() << "expected abort";
    } catch (const SessionError& e) {
        EXPECT_EQ(e.kind(), SessionErrorKind::transport);
    }
}
