#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>

#include "mlmagma/field.hpp"

namespace mlm {

class TransportError : public Error {
public:
    TransportError(const std::string& what, bool timeout) : Error(what), timeout_(timeout) {}
    bool is_timeout() const { return timeout_; }

private:
    bool timeout_;
};

/// Ordered, reliable byte stream.
class ByteStream {
public:
    virtual ~ByteStream() = default;
    virtual void write_all(std::span<const std::uint8_t> data) = 0;
    /// Blocks until out is filled; throws TransportError on EOF or timeout.
    virtual void read_exact(std::span<std::uint8_t> out) = 0;
};

/// Connected TCP socket. Owns the descriptor.
class TcpStream final : public ByteStream {
public:
    static TcpStream connect(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout);

    TcpStream(TcpStream&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    TcpStream& operator=(TcpStream&& o) noexcept;
    TcpStream(const TcpStream&) = delete;
    TcpStream& operator=(const TcpStream&) = delete;
    ~TcpStream() override;

    void set_timeout(std::chrono::milliseconds timeout);
    void write_all(std::span<const std::uint8_t> data) override;
    void read_exact(std::span<std::uint8_t> out) override;

private:
    friend class TcpListener;
    explicit TcpStream(int fd) : fd_(fd) {}
    int fd_ = -1;
};

class TcpListener {
public:
    /// Port 0 picks a free port; see port().
    static TcpListener bind(const std::string& host, std::uint16_t port);

    TcpListener(TcpListener&& o) noexcept : fd_(std::exchange(o.fd_, -1)), port_(o.port_) {}
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;
    ~TcpListener();

    std::uint16_t port() const { return port_; }
    TcpStream accept(std::chrono::milliseconds timeout);

private:
    TcpListener(int fd, std::uint16_t port) : fd_(fd), port_(port) {}
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Two connected in-memory endpoints, for tests and in-process demos.
std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_memory_pipe(
    std::chrono::milliseconds timeout);

}  // namespace mlm
