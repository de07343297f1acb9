#pragma once

#include "eog/policy.hpp"

#include <memory>
#include <string>

namespace eog {

// Transport for the policy wire protocol v1: one JSON request, one JSON
// response per round trip.
class PolicyTransport {
public:
    virtual ~PolicyTransport() = default;
    // Throws Error(Transport) when the peer is unreachable or closes.
    virtual std::string round_trip(const std::string& request_line) = 0;
    virtual std::string describe() const = 0;
};

// Spawns `command` via the shell and exchanges line-delimited JSON over its
// standard streams. The child is kept alive across calls.
std::unique_ptr<PolicyTransport> make_stdio_transport(const std::string& command);

// POSTs to <endpoint>/evaluate with a JSON body.
std::unique_ptr<PolicyTransport> make_http_transport(const std::string& endpoint);

// Picks the transport from the endpoint shape: http(s):// URLs go over HTTP,
// anything else is treated as a command line for the stdio transport.
std::unique_ptr<PolicyTransport> make_transport(const std::string& endpoint);

// Adapter for external (LLM-backed) policies. Serializes the packet as
// {"version":1,"packet":{...}}, validates the response against the
// PolicyOutput schema, and sends one corrective retry embedding the
// validator error before giving up with Error(PolicyFailure).
class ExternalPolicy final : public AbductivePolicy {
public:
    explicit ExternalPolicy(std::unique_ptr<PolicyTransport> transport)
        : transport_(std::move(transport)) {}

    PolicyOutput evaluate(const ContextPacket& packet) override;
    std::string name() const override { return "external(" + transport_->describe() + ")"; }

    int retries_used() const { return retries_used_; }

private:
    std::unique_ptr<PolicyTransport> transport_;
    int retries_used_ = 0; // total corrective retries across calls
};

} // namespace eog
