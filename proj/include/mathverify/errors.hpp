#pragma once

#include <stdexcept>
#include <string>

namespace mathverify {

// Error categories map onto stable CLI exit codes:
//   ConfigError -> 2, TransportError -> 3, DataJoinError -> 4.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TransportError : std::runtime_error {
    explicit TransportError(const std::string& msg, bool transient = false)
        : std::runtime_error(msg), transient(transient) {}
    bool transient = false;
};

struct RetriesExhausted : TransportError {
    explicit RetriesExhausted(const std::string& last_error)
        : TransportError("retries exhausted; last error: " + last_error) {}
};

struct ReplayMiss : TransportError {
    explicit ReplayMiss(const std::string& digest)
        : TransportError("replay cache miss for digest " + digest), digest(digest) {}
    std::string digest;
};

struct MalformedEndpointReply : TransportError {
    explicit MalformedEndpointReply(const std::string& msg)
        : TransportError("malformed endpoint reply: " + msg) {}
};

struct DataJoinError : std::runtime_error {
    explicit DataJoinError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mathverify
