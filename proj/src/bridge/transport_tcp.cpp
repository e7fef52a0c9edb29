#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

#include "fd_io.hpp"
#include "latentprobe/bridge.hpp"

namespace latentprobe {

namespace {

constexpr const char* kModule = "model-bridge";

class TcpTransport : public Transport {
public:
    explicit TcpTransport(std::string address) : address_(std::move(address)) {
        const auto colon = address_.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == address_.size()) {
            throw ConfigError(kModule, "tcp address must be host:port, got \"" + address_ + "\"");
        }
        host_ = address_.substr(0, colon);
        port_ = address_.substr(colon + 1);
        connect();
    }

    ~TcpTransport() override { close(); }

    TcpTransport(const TcpTransport&) = delete;
    TcpTransport& operator=(const TcpTransport&) = delete;

    void send_line(std::string_view line) override {
        std::string message(line);
        message += '\n';
        detail::write_all(fd_, message, true);
    }

    std::string receive_line(std::chrono::milliseconds timeout) override {
        return detail::read_line(fd_, buffer_, timeout);
    }

    void reconnect() override {
        close();
        connect();
    }

private:
    void connect() {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* found = nullptr;
        if (const int rc = ::getaddrinfo(host_.c_str(), port_.c_str(), &hints, &found); rc != 0) {
            throw TransportError(kModule, "cannot resolve " + address_ + ": " + ::gai_strerror(rc));
        }
        for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
            const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
            if (fd < 0) continue;
            if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
                fd_ = fd;
                break;
            }
            ::close(fd);
        }
        ::freeaddrinfo(found);
        if (fd_ < 0) {
            throw TransportError(kModule, "cannot connect to " + address_);
        }
        buffer_.clear();
    }

    void close() noexcept {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

    std::string address_;
    std::string host_;
    std::string port_;
    int fd_ = -1;
    std::string buffer_;
};

}  // namespace

std::unique_ptr<Transport> make_tcp_transport(const std::string& address) {
    return std::make_unique<TcpTransport>(address);
}

}  // namespace latentprobe
