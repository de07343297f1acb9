#include "eog/external_policy.hpp"

#include "eog/error.hpp"
#include "eog/schema.hpp"
#include "eog/snapshot_io.hpp"

#define CPPHTTPLIB_NO_EXCEPTIONS 0
#include <httplib.h>

#include <sys/wait.h>
#include <unistd.h>

#include <csignal>
#include <cstdio>
#include <cstring>

namespace eog {

using nlohmann::json;

namespace {

class StdioTransport final : public PolicyTransport {
public:
    explicit StdioTransport(std::string command) : command_(std::move(command)) {}

    ~StdioTransport() override { shutdown(); }

    std::string round_trip(const std::string& request_line) override {
        if (child_pid_ < 0) spawn();
        std::string line = request_line;
        line.push_back('\n');
        if (::fwrite(line.data(), 1, line.size(), to_child_) != line.size() ||
            ::fflush(to_child_) != 0) {
            shutdown();
            raise(ErrorKind::Transport, "write to policy process failed: " + command_);
        }
        std::string response;
        int c;
        while ((c = ::fgetc(from_child_)) != EOF && c != '\n') {
            response.push_back(static_cast<char>(c));
        }
        if (response.empty() && c == EOF) {
            shutdown();
            raise(ErrorKind::Transport, "policy process closed its stream: " + command_);
        }
        return response;
    }

    std::string describe() const override { return "stdio:" + command_; }

private:
    void spawn() {
        int to_pipe[2];
        int from_pipe[2];
        if (::pipe(to_pipe) != 0 || ::pipe(from_pipe) != 0) {
            raise(ErrorKind::Transport, "pipe() failed");
        }
        child_pid_ = ::fork();
        if (child_pid_ < 0) raise(ErrorKind::Transport, "fork() failed");
        if (child_pid_ == 0) {
            ::dup2(to_pipe[0], STDIN_FILENO);
            ::dup2(from_pipe[1], STDOUT_FILENO);
            ::close(to_pipe[0]);
            ::close(to_pipe[1]);
            ::close(from_pipe[0]);
            ::close(from_pipe[1]);
            ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::close(to_pipe[0]);
        ::close(from_pipe[1]);
        to_child_ = ::fdopen(to_pipe[1], "w");
        from_child_ = ::fdopen(from_pipe[0], "r");
        if (!to_child_ || !from_child_) {
            shutdown();
            raise(ErrorKind::Transport, "fdopen() failed");
        }
    }

    void shutdown() {
        if (to_child_) {
            ::fclose(to_child_);
            to_child_ = nullptr;
        }
        if (from_child_) {
            ::fclose(from_child_);
            from_child_ = nullptr;
        }
        if (child_pid_ > 0) {
            int status = 0;
            if (::waitpid(child_pid_, &status, WNOHANG) == 0) {
                ::kill(child_pid_, SIGTERM);
                ::waitpid(child_pid_, &status, 0);
            }
            child_pid_ = -1;
        }
    }

    std::string command_;
    pid_t child_pid_ = -1;
    std::FILE* to_child_ = nullptr;
    std::FILE* from_child_ = nullptr;
};

class HttpTransport final : public PolicyTransport {
public:
    explicit HttpTransport(std::string endpoint) : endpoint_(std::move(endpoint)) {}

    std::string round_trip(const std::string& request_line) override {
        httplib::Client client(endpoint_);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(30, 0);
        auto res = client.Post("/evaluate", request_line, "application/json");
        if (!res) {
            raise(ErrorKind::Transport,
                  "POST " + endpoint_ + "/evaluate failed: " + httplib::to_string(res.error()));
        }
        if (res->status != 200) {
            raise(ErrorKind::Transport, "POST " + endpoint_ + "/evaluate returned HTTP " +
                                            std::to_string(res->status));
        }
        return res->body;
    }

    std::string describe() const override { return endpoint_; }

private:
    std::string endpoint_;
};

} // namespace

std::unique_ptr<PolicyTransport> make_stdio_transport(const std::string& command) {
    return std::make_unique<StdioTransport>(command);
}

std::unique_ptr<PolicyTransport> make_http_transport(const std::string& endpoint) {
    return std::make_unique<HttpTransport>(endpoint);
}

std::unique_ptr<PolicyTransport> make_transport(const std::string& endpoint) {
    if (endpoint.rfind("http://", 0) == 0 || endpoint.rfind("https://", 0) == 0) {
        return make_http_transport(endpoint);
    }
    return make_stdio_transport(endpoint);
}

PolicyOutput ExternalPolicy::evaluate(const ContextPacket& packet) {
    const json request = {{"version", 1}, {"packet", to_json(packet)}};

    auto attempt = [&](const json& body) -> PolicyOutput {
        const std::string raw = transport_->round_trip(body.dump());
        json parsed;
        try {
            parsed = json::parse(raw);
        } catch (const json::exception& e) {
            raise(ErrorKind::SchemaViolation, std::string("response is not JSON: ") + e.what());
        }
        const auto violations = validate_against_schema(parsed, policy_output_schema());
        if (!violations.empty()) {
            raise(ErrorKind::SchemaViolation, "response violates the PolicyOutput schema: " +
                                                  violations.front());
        }
        PolicyOutput out = policy_output_from_json(parsed);
        validate_policy_output(out, packet.entity);
        return out;
    };

    std::string first_error;
    try {
        return attempt(request);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Transport) throw; // transport failures are not retried
        first_error = e.what();
    }

    // Single corrective retry embedding the validator error.
    ++retries_used_;
    json retry = request;
    retry["retry"] = {{"attempt", 2}, {"error", first_error}};
    try {
        return attempt(retry);
    } catch (const Error& e) {
        raise(ErrorKind::PolicyFailure,
              "external policy failed after one retry: " + std::string(e.what()));
    }
}

} // namespace eog
