// Stand-in model server for bridge tests. Speaks the line protocol on
// stdin/stdout, or on a TCP port with --tcp.

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "mock_server_core.hpp"

namespace {

using latentprobe::testing::MockServer;

struct Extra {
    std::string drop_marker;  // drop the first request of the first process only
    bool hang = false;        // never answer generate_embed
};

bool should_drop(const Extra& extra) {
    if (extra.drop_marker.empty() || std::filesystem::exists(extra.drop_marker)) return false;
    std::ofstream(extra.drop_marker) << "dropped\n";
    return true;
}

std::vector<std::string> respond(MockServer& server, const Extra& extra, const std::string& line) {
    if (should_drop(extra)) return {};
    if (extra.hang && line.find("\"generate_embed\"") != std::string::npos) {
        std::this_thread::sleep_for(std::chrono::seconds(30));
        return {};
    }
    return server.handle(line);
}

int serve_stdio(MockServer& server, const Extra& extra) {
    std::string line;
    while (std::getline(std::cin, line)) {
        for (const auto& reply : respond(server, extra, line)) {
            std::cout << reply << '\n';
        }
        std::cout.flush();
    }
    return 0;
}

bool write_all(int fd, const std::string& data) {
    std::size_t done = 0;
    while (done < data.size()) {
        const auto n = ::send(fd, data.data() + done, data.size() - done, MSG_NOSIGNAL);
        if (n <= 0) return false;
        done += static_cast<std::size_t>(n);
    }
    return true;
}

void serve_connection(int fd, MockServer& server, const Extra& extra) {
    std::string buffer;
    char chunk[4096];
    for (;;) {
        const auto n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n <= 0) return;
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t pos;
        while ((pos = buffer.find('\n')) != std::string::npos) {
            const std::string line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            for (const auto& reply : respond(server, extra, line)) {
                if (!write_all(fd, reply + "\n")) return;
            }
        }
    }
}

int serve_tcp(MockServer& server, const Extra& extra, int port, const std::string& port_file,
              std::size_t max_connections) {
    const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) return 1;
    int yes = 1;
    ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listener, 4) != 0) {
        std::perror("mock_model_server");
        return 1;
    }
    socklen_t len = sizeof addr;
    ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
    if (!port_file.empty()) {
        const auto tmp = port_file + ".tmp";
        std::ofstream(tmp) << ntohs(addr.sin_port) << "\n";
        std::filesystem::rename(tmp, port_file);
    }
    for (std::size_t served = 0; max_connections == 0 || served < max_connections; ++served) {
        const int fd = ::accept(listener, nullptr, nullptr);
        if (fd < 0) break;
        serve_connection(fd, server, extra);
        ::close(fd);
    }
    ::close(listener);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mock model server"};
    latentprobe::testing::MockOptions options;
    Extra extra;
    int port = -1;
    std::string port_file;
    std::size_t max_connections = 0;
    bool no_fused = false;
    app.add_option("--D", options.params.latent_dim);
    app.add_option("--m", options.params.embedding_dim);
    app.add_option("--k", options.params.attribute_dim);
    app.add_option("--seed", options.params.seed);
    app.add_flag("--shuffle", options.shuffle);
    app.add_option("--fail-index", options.fail_index);
    app.add_flag("--wrong-id", options.wrong_id);
    app.add_flag("--omit-latent-dim", options.omit_latent_dim);
    app.add_flag("--no-fused", no_fused);
    app.add_option("--drop-marker", extra.drop_marker);
    app.add_flag("--hang", extra.hang);
    app.add_option("--tcp", port, "listen on this port (0 picks one)");
    app.add_option("--port-file", port_file);
    app.add_option("--max-connections", max_connections);
    CLI11_PARSE(app, argc, argv);
    options.fused = !no_fused;

    MockServer server(options);
    if (port >= 0) {
        return serve_tcp(server, extra, port, port_file, max_connections);
    }
    return serve_stdio(server, extra);
}
