#include <array>

#include "mlmagma/kx.hpp"

namespace mlm::kx {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'M', 'L', 'K', 'X'};
constexpr std::size_t kHeaderSize = 6;

std::size_t param_count_for(std::uint8_t dim) {
    return dim == 3 ? 5 : dim == 4 ? 9 : 0;
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | bytes_[pos_++];
        return v;
    }
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) {
            throw DecodeError(DecodeErrorKind::truncated, "need " + std::to_string(n) + " more bytes at offset " +
                                                              std::to_string(pos_));
        }
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

void check_header(std::span<const std::uint8_t> header) {
    for (std::size_t i = 0; i < kMagic.size(); ++i) {
        if (header[i] != kMagic[i]) throw DecodeError(DecodeErrorKind::bad_magic, "expected \"MLKX\"");
    }
    if (header[4] != kWireVersion) {
        throw DecodeError(DecodeErrorKind::bad_version, "unsupported version " + std::to_string(header[4]) +
                                                             " (expected " + std::to_string(kWireVersion) + ")");
    }
    if (header[5] != kKindParams && header[5] != kKindPublic) {
        throw DecodeError(DecodeErrorKind::bad_kind, "unknown message kind " + std::to_string(header[5]));
    }
}

void check_dim(std::uint8_t dim) {
    if (param_count_for(dim) == 0) {
        throw DecodeError(DecodeErrorKind::bad_dimension, "dimension " + std::to_string(dim) + " (expected 3 or 4)");
    }
}

void check_canonical(std::uint64_t v, std::uint64_t p, const char* field) {
    if (v >= p) {
        throw DecodeError(DecodeErrorKind::non_canonical, std::string(field) + " value " + std::to_string(v) +
                                                              " >= p = " + std::to_string(p));
    }
}

}  // namespace

const char* to_string(DecodeErrorKind kind) {
    switch (kind) {
        case DecodeErrorKind::bad_magic: return "bad magic";
        case DecodeErrorKind::bad_version: return "bad version";
        case DecodeErrorKind::bad_kind: return "bad kind";
        case DecodeErrorKind::truncated: return "truncated";
        case DecodeErrorKind::bad_dimension: return "bad dimension";
        case DecodeErrorKind::bad_modulus: return "bad modulus";
        case DecodeErrorKind::non_canonical: return "non-canonical residue";
        case DecodeErrorKind::trailing_bytes: return "trailing bytes";
    }
    return "?";
}

std::vector<std::uint8_t> encode_message(const Message& msg) {
    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    out.push_back(msg.version);
    if (const auto* params = std::get_if<ParamsAnnounce>(&msg.body)) {
        if (params->params.size() > 255 || params->base.size() != params->dim) {
            throw KxError("encode: inconsistent parameter announcement");
        }
        out.push_back(kKindParams);
        put_u64(out, params->p);
        out.push_back(params->dim);
        out.push_back(static_cast<std::uint8_t>(params->params.size()));
        for (auto v : params->params) put_u64(out, v);
        for (auto v : params->base) put_u64(out, v);
    } else {
        const auto& pub = std::get<PublicValue>(msg.body);
        if (pub.components.size() != pub.dim) throw KxError("encode: inconsistent public value");
        out.push_back(kKindPublic);
        out.push_back(pub.dim);
        for (auto v : pub.components) put_u64(out, v);
    }
    return out;
}

Message decode_message(std::span<const std::uint8_t> bytes, std::optional<PrimeModulus> modulus) {
    Reader r(bytes);
    r.need(kHeaderSize);
    check_header(bytes.first(kHeaderSize));
    for (std::size_t i = 0; i < kHeaderSize; ++i) r.u8();

    Message msg;
    msg.version = bytes[4];
    if (bytes[5] == kKindParams) {
        ParamsAnnounce a;
        a.p = r.u64();
        a.dim = r.u8();
        check_dim(a.dim);
        const std::uint8_t count = r.u8();
        if (count != param_count_for(a.dim)) {
            throw DecodeError(DecodeErrorKind::bad_dimension, "dimension " + std::to_string(a.dim) + " with " +
                                                                  std::to_string(count) + " parameters");
        }
        if (a.p >= PrimeModulus::kMaxExclusive || a.p < 3 || !is_prime(a.p)) {
            throw DecodeError(DecodeErrorKind::bad_modulus, "p = " + std::to_string(a.p));
        }
        for (std::uint8_t i = 0; i < count; ++i) {
            a.params.push_back(r.u64());
            check_canonical(a.params.back(), a.p, "parameter");
        }
        for (std::uint8_t i = 0; i < a.dim; ++i) {
            a.base.push_back(r.u64());
            check_canonical(a.base.back(), a.p, "base component");
        }
        msg.body = std::move(a);
    } else {
        PublicValue v;
        v.dim = r.u8();
        check_dim(v.dim);
        for (std::uint8_t i = 0; i < v.dim; ++i) {
            v.components.push_back(r.u64());
            if (modulus) check_canonical(v.components.back(), modulus->value(), "public component");
        }
        msg.body = std::move(v);
    }
    if (r.remaining() != 0) {
        throw DecodeError(DecodeErrorKind::trailing_bytes, std::to_string(r.remaining()) + " unread bytes");
    }
    return msg;
}

Message read_message(ByteStream& stream, std::optional<PrimeModulus> modulus) {
    std::vector<std::uint8_t> buf(kHeaderSize);
    stream.read_exact(buf);
    check_header(buf);

    auto read_more = [&](std::size_t n) {
        const std::size_t old = buf.size();
        buf.resize(old + n);
        stream.read_exact(std::span(buf).subspan(old));
    };
    if (buf[5] == kKindParams) {
        read_more(10);
        const std::uint8_t dim = buf[14];
        const std::uint8_t count = buf[15];
        check_dim(dim);
        if (count != param_count_for(dim)) {
            throw DecodeError(DecodeErrorKind::bad_dimension, "dimension " + std::to_string(dim) + " with " +
                                                                  std::to_string(count) + " parameters");
        }
        read_more(8 * (std::size_t{count} + dim));
    } else {
        read_more(1);
        const std::uint8_t dim = buf[6];
        check_dim(dim);
        read_more(8 * std::size_t{dim});
    }
    return decode_message(buf, modulus);
}

}  // namespace mlm::kx
