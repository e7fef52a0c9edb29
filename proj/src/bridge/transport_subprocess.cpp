#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "fd_io.hpp"
#include "latentprobe/bridge.hpp"

namespace latentprobe {

namespace {

constexpr const char* kModule = "model-bridge";

class SubprocessTransport : public Transport {
public:
    explicit SubprocessTransport(std::vector<std::string> command) : command_(std::move(command)) {
        if (command_.empty()) {
            throw ConfigError(kModule, "stdio transport needs a server command");
        }
        spawn();
    }

    ~SubprocessTransport() override { shutdown(); }

    SubprocessTransport(const SubprocessTransport&) = delete;
    SubprocessTransport& operator=(const SubprocessTransport&) = delete;

    void send_line(std::string_view line) override {
        std::string message(line);
        message += '\n';
        detail::write_all(to_child_, message, false);
    }

    std::string receive_line(std::chrono::milliseconds timeout) override {
        return detail::read_line(from_child_, buffer_, timeout);
    }

    void reconnect() override {
        shutdown();
        spawn();
    }

private:
    void spawn() {
        int in_pipe[2];
        int out_pipe[2];
        if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
            throw TransportError(kModule, std::string("pipe failed: ") + std::strerror(errno));
        }
        if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
            ::close(in_pipe[0]);
            ::close(in_pipe[1]);
            throw TransportError(kModule, std::string("pipe failed: ") + std::strerror(errno));
        }
        std::vector<char*> argv;
        for (auto& arg : command_) argv.push_back(arg.data());
        argv.push_back(nullptr);

        const pid_t pid = ::fork();
        if (pid < 0) {
            throw TransportError(kModule, std::string("fork failed: ") + std::strerror(errno));
        }
        if (pid == 0) {
            ::dup2(in_pipe[0], STDIN_FILENO);
            ::dup2(out_pipe[1], STDOUT_FILENO);
            ::execvp(argv[0], argv.data());
            _exit(127);
        }
        ::close(in_pipe[0]);
        ::close(out_pipe[1]);
        pid_ = pid;
        to_child_ = in_pipe[1];
        from_child_ = out_pipe[0];
        buffer_.clear();
    }

    void shutdown() noexcept {
        if (to_child_ >= 0) ::close(to_child_);
        if (from_child_ >= 0) ::close(from_child_);
        to_child_ = from_child_ = -1;
        if (pid_ <= 0) return;
        // EOF on stdin asks the server to exit; give it a moment before killing
        for (int i = 0; i < 50; ++i) {
            if (::waitpid(pid_, nullptr, WNOHANG) == pid_) {
                pid_ = -1;
                return;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, nullptr, 0);
        pid_ = -1;
    }

    std::vector<std::string> command_;
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

}  // namespace

std::unique_ptr<Transport> make_subprocess_transport(std::vector<std::string> command) {
    // a dead server must surface as a write error, not kill the client
    ::signal(SIGPIPE, SIG_IGN);
    return std::make_unique<SubprocessTransport>(std::move(command));
}

}  // namespace latentprobe
