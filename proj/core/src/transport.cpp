#include "mlmagma/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

namespace mlm {
namespace {

std::string errno_text(const char* what) {
    return std::string(what) + ": " + std::strerror(errno);
}

void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
}

}  // namespace

TcpStream TcpStream::connect(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
        throw TransportError("resolve " + host + ": " + ::gai_strerror(rc), false);
    }
    std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);
    std::string last_error = "no addresses";
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
        int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) {
            last_error = errno_text("socket");
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            TcpStream s(fd);
            s.set_timeout(timeout);
            return s;
        }
        last_error = errno_text("connect");
        ::close(fd);
    }
    throw TransportError("connect " + host + ":" + service + ": " + last_error, false);
}

TcpStream& TcpStream::operator=(TcpStream&& o) noexcept {
    if (this != &o) {
        close_fd(fd_);
        fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
}

TcpStream::~TcpStream() {
    close_fd(fd_);
}

void TcpStream::set_timeout(std::chrono::milliseconds timeout) {
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    ::setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

void TcpStream::write_all(std::span<const std::uint8_t> data) {
    while (!data.empty()) {
        const ssize_t n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            const bool timeout = errno == EAGAIN || errno == EWOULDBLOCK;
            throw TransportError(errno_text("send"), timeout);
        }
        data = data.subspan(static_cast<std::size_t>(n));
    }
}

void TcpStream::read_exact(std::span<std::uint8_t> out) {
    while (!out.empty()) {
        const ssize_t n = ::recv(fd_, out.data(), out.size(), 0);
        if (n == 0) throw TransportError("connection closed by peer", false);
        if (n < 0) {
            if (errno == EINTR) continue;
            const bool timeout = errno == EAGAIN || errno == EWOULDBLOCK;
            throw TransportError(timeout ? std::string("read timed out") : errno_text("recv"), timeout);
        }
        out = out.subspan(static_cast<std::size_t>(n));
    }
}

TcpListener TcpListener::bind(const std::string& host, std::uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError(errno_text("socket"), false);
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw TransportError("bind: not an IPv4 address: " + host, false);
    }
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd, 16) != 0) {
        const std::string msg = errno_text("bind/listen");
        ::close(fd);
        throw TransportError(msg, false);
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    return TcpListener(fd, ntohs(addr.sin_port));
}

TcpListener::~TcpListener() {
    close_fd(fd_);
}

TcpStream TcpListener::accept(std::chrono::milliseconds timeout) {
    pollfd pfd{fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (rc == 0) throw TransportError("accept timed out", true);
    if (rc < 0) throw TransportError(errno_text("poll"), false);
    const int client = ::accept(fd_, nullptr, nullptr);
    if (client < 0) throw TransportError(errno_text("accept"), false);
    TcpStream s(client);
    s.set_timeout(timeout);
    return s;
}

namespace {

struct Channel {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::uint8_t> bytes;
    bool closed = false;
};

class MemoryEnd final : public ByteStream {
public:
    MemoryEnd(std::shared_ptr<Channel> in, std::shared_ptr<Channel> out, std::chrono::milliseconds timeout)
        : in_(std::move(in)), out_(std::move(out)), timeout_(timeout) {}

    ~MemoryEnd() override {
        std::lock_guard lock(out_->mu);
        out_->closed = true;
        out_->cv.notify_all();
    }

    void write_all(std::span<const std::uint8_t> data) override {
        std::lock_guard lock(out_->mu);
        out_->bytes.insert(out_->bytes.end(), data.begin(), data.end());
        out_->cv.notify_all();
    }

    void read_exact(std::span<std::uint8_t> out) override {
        std::unique_lock lock(in_->mu);
        for (auto& b : out) {
            if (!in_->cv.wait_for(lock, timeout_, [&] { return !in_->bytes.empty() || in_->closed; })) {
                throw TransportError("read timed out", true);
            }
            if (in_->bytes.empty()) throw TransportError("connection closed by peer", false);
            b = in_->bytes.front();
            in_->bytes.pop_front();
        }
    }

private:
    std::shared_ptr<Channel> in_, out_;
    std::chrono::milliseconds timeout_;
};

}  // namespace

std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_memory_pipe(
    std::chrono::milliseconds timeout) {
    auto ab = std::make_shared<Channel>();
    auto ba = std::make_shared<Channel>();
    return {std::make_unique<MemoryEnd>(ba, ab, timeout), std::make_unique<MemoryEnd>(ab, ba, timeout)};
}

}  // namespace mlm
