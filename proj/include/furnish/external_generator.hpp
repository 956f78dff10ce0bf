#pragma once

// Client for an out-of-process generator speaking line-delimited JSON over
// its standard input/output:
//
//   adapter -> {"hello":{"latent_dim":D,"width":W,"height":H}}
//   client  -> {"id":N,"z":[...]}
//   adapter -> {"id":N,"rgb_b64":"<W*H*3 bytes, row-major RGB8>"}
//   client  -> {"bye":true}            (adapter exits 0)
//
// POSIX only. The child's stdin and stdout are both bound to one end of a
// socketpair so writes can use MSG_NOSIGNAL instead of touching SIGPIPE.

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <poll.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include <furnish/base64.hpp>
#include <furnish/error.hpp>
#include <furnish/generator.hpp>

extern char** environ;

namespace furnish {

class ExternalGenerator final : public Generator {
public:
    using clock = std::chrono::steady_clock;

    explicit ExternalGenerator(std::string command, std::chrono::milliseconds timeout = std::chrono::seconds(30))
        : _command(std::move(command)), _timeout(timeout)
    {
        spawn();
        handshake();
    }

    ExternalGenerator(const ExternalGenerator&) = delete;
    ExternalGenerator& operator=(const ExternalGenerator&) = delete;

    ~ExternalGenerator() override
    {
        try {
            close();
        }
        catch (...) {
        }
    }

    GeneratorKind kind() const override { return GeneratorKind::External; }
    int latent_dim() const override { return _latent_dim; }
    int width() const override { return _width; }
    int height() const override { return _height; }

    OccupancyGrid generate(const LatentVector& z) override
    {
        std::lock_guard lock(_mutex);
        if (_broken)
            throw RuntimeFailure("external generator unusable after an earlier failure: " + _command);
        check_latent(z, _latent_dim);
        try {
            const long long id = ++_next_id;
            send_line(nlohmann::json{{"id", id}, {"z", z}}.dump());
            const std::string line = read_line();
            return decode_response(line, id);
        }
        catch (...) {
            _broken = true;
            throw;
        }
    }

    /// Sends bye and waits for the process; returns its exit status, or -1 if it was killed.
    int close()
    {
        std::lock_guard lock(_mutex);
        if (_pid <= 0) {
            if (_fd >= 0)
                ::close(_fd);
            _fd = -1;
            return _exit_status;
        }
        if (!_broken) {
            try {
                send_line(R"({"bye":true})");
            }
            catch (const RuntimeFailure&) {
            }
        }
        ::shutdown(_fd, SHUT_WR);
        // A broken process gets no grace period.
        const auto deadline = clock::now() + (_broken ? std::chrono::seconds(0) : std::chrono::seconds(5));
        while (true) {
            int status = 0;
            const pid_t r = ::waitpid(_pid, &status, WNOHANG);
            if (r == _pid) {
                _exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
                break;
            }
            if (r < 0 || clock::now() > deadline) {
                ::kill(-_pid, SIGKILL);
                ::waitpid(_pid, &status, 0);
                _exit_status = -1;
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        _pid = -1;
        ::close(_fd);
        _fd = -1;
        return _exit_status;
    }

    long long requests_sent() const { return _next_id; }

private:
    void spawn()
    {
        int fds[2];
        if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0)
            throw RuntimeFailure(std::string("socketpair failed: ") + std::strerror(errno));
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, fds[1], STDIN_FILENO);
        posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
        // Own process group, so a kill also reaches anything the shell started.
        posix_spawnattr_t attr;
        posix_spawnattr_init(&attr);
        posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
        posix_spawnattr_setpgroup(&attr, 0);
        const char* argv[] = {"/bin/sh", "-c", _command.c_str(), nullptr};
        const int rc = ::posix_spawn(&_pid, "/bin/sh", &actions, &attr, const_cast<char**>(argv), environ);
        posix_spawnattr_destroy(&attr);
        posix_spawn_file_actions_destroy(&actions);
        ::close(fds[1]);
        if (rc != 0) {
            ::close(fds[0]);
            _pid = -1;
            throw RuntimeFailure("cannot start external generator '" + _command + "': " + std::strerror(rc));
        }
        _fd = fds[0];
    }

    void handshake()
    {
        try {
            const auto msg = parse(read_line());
            const auto& hello = msg.at("hello");
            _latent_dim = hello.at("latent_dim").get<int>();
            _width = hello.at("width").get<int>();
            _height = hello.at("height").get<int>();
        }
        catch (const nlohmann::json::exception& e) {
            _broken = true;
            throw RuntimeFailure(std::string("external generator: malformed handshake: ") + e.what());
        }
        catch (...) {
            _broken = true;
            throw;
        }
        if (_latent_dim < 1 || _width < 1 || _height < 1) {
            _broken = true;
            throw RuntimeFailure("external generator: handshake dimensions must be positive");
        }
    }

    static nlohmann::json parse(const std::string& line)
    {
        try {
            return nlohmann::json::parse(line);
        }
        catch (const nlohmann::json::exception&) {
            throw RuntimeFailure("external generator: malformed response line: " + line.substr(0, 200));
        }
    }

    OccupancyGrid decode_response(const std::string& line, long long id) const
    {
        const auto msg = parse(line);
        if (!msg.is_object() || !msg.contains("id") || !msg["id"].is_number_integer() || !msg.contains("rgb_b64") || !msg["rgb_b64"].is_string())
            throw RuntimeFailure("external generator: malformed response (need integer id and rgb_b64 string)");
        const long long got = msg["id"].get<long long>();
        if (got != id)
            throw RuntimeFailure("external generator: response id " + std::to_string(got) + " does not match request id " + std::to_string(id));
        const auto bytes = base64::decode(msg["rgb_b64"].get<std::string>());
        if (!bytes)
            throw RuntimeFailure("external generator: malformed response: invalid base64 payload");
        const std::size_t expected = std::size_t(_width) * std::size_t(_height) * 3;
        if (bytes->size() != expected)
            throw RuntimeFailure("external generator: malformed response: payload has " + std::to_string(bytes->size()) + " bytes, expected "
                + std::to_string(expected));
        OccupancyGrid grid(_width, _height);
        for (std::size_t i = 0; i < grid.size(); ++i)
            grid.pixels[i] = {(*bytes)[3 * i], (*bytes)[3 * i + 1], (*bytes)[3 * i + 2]};
        return grid;
    }

    void send_line(const std::string& text)
    {
        const std::string line = text + "\n";
        std::size_t sent = 0;
        while (sent < line.size()) {
            const ssize_t n = ::send(_fd, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR)
                    continue;
                throw RuntimeFailure("external generator: write failed (" + std::string(std::strerror(errno)) + ")" + exit_note());
            }
            sent += std::size_t(n);
        }
    }

    std::string read_line()
    {
        const auto deadline = clock::now() + _timeout;
        while (true) {
            const auto nl = _buffer.find('\n');
            if (nl != std::string::npos) {
                std::string line = _buffer.substr(0, nl);
                _buffer.erase(0, nl + 1);
                return line;
            }
            const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
            if (remaining <= 0)
                throw RuntimeFailure("external generator: timed out after " + std::to_string(_timeout.count()) + " ms");
            pollfd pfd{_fd, POLLIN, 0};
            const int r = ::poll(&pfd, 1, int(std::min<long long>(remaining, 1 << 30)));
            if (r < 0 && errno == EINTR)
                continue;
            if (r < 0)
                throw RuntimeFailure(std::string("external generator: poll failed: ") + std::strerror(errno));
            if (r == 0)
                continue;
            char chunk[65536];
            const ssize_t n = ::recv(_fd, chunk, sizeof(chunk), 0);
            if (n < 0 && errno == EINTR)
                continue;
            if (n <= 0)
                throw RuntimeFailure("external generator: process closed its output" + exit_note());
            _buffer.append(chunk, std::size_t(n));
        }
    }

    std::string exit_note()
    {
        if (_pid <= 0)
            return "";
        int status = 0;
        const auto deadline = clock::now() + std::chrono::milliseconds(500);
        while (clock::now() < deadline) {
            if (::waitpid(_pid, &status, WNOHANG) == _pid) {
                _pid = -1;
                _exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
                return WIFEXITED(status) ? "; process exited with status " + std::to_string(WEXITSTATUS(status))
                                         : "; process terminated by signal " + std::to_string(WTERMSIG(status));
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        return "";
    }

    std::string _command;
    std::chrono::milliseconds _timeout;
    pid_t _pid = -1;
    int _fd = -1;
    int _exit_status = -1;
    std::string _buffer;
    long long _next_id = 0;
    bool _broken = false;
    int _latent_dim = 0;
    int _width = 0;
    int _height = 0;
    std::mutex _mutex;
};

} // namespace furnish
