#include "fd_io.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "latentprobe/error.hpp"

namespace latentprobe::detail {

namespace {

constexpr const char* kModule = "model-bridge";

}  // namespace

void write_all(int fd, std::string_view data, bool socket) {
    while (!data.empty()) {
        const ssize_t n = socket ? ::send(fd, data.data(), data.size(), MSG_NOSIGNAL)
                                 : ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError(kModule, std::string("write failed: ") + std::strerror(errno));
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

std::string read_line(int fd, std::string& buffer, std::chrono::milliseconds timeout) {
    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + timeout;
    for (;;) {
        if (const auto pos = buffer.find('\n'); pos != std::string::npos) {
            std::string line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
        if (remaining.count() <= 0) {
            throw TransportError(kModule, "timed out after " + std::to_string(timeout.count()) + " ms");
        }
        pollfd pfd{fd, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
        if (ready < 0) {
            if (errno == EINTR) continue;
            throw TransportError(kModule, std::string("poll failed: ") + std::strerror(errno));
        }
        if (ready == 0) continue;
        char chunk[65536];
        const ssize_t n = ::read(fd, chunk, sizeof(chunk));
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) continue;
            throw TransportError(kModule, std::string("read failed: ") + std::strerror(errno));
        }
        if (n == 0) {
            throw TransportError(kModule, "connection closed by server");
        }
        buffer.append(chunk, static_cast<std::size_t>(n));
    }
}

}  // namespace latentprobe::detail
