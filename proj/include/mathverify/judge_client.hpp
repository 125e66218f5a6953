#pragma once

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace mathverify {

struct Message {
    std::string role;  // "system" or "user"
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<Message> messages;
    double temperature = 0.0;
    int max_tokens = 1024;
    // Caller-supplied salt (e.g. the repetition index). Without it, a cache
    // would collapse repeated verification calls into a single vote.
    std::string cache_salt;
};

struct ChatResponse {
    std::string text;
    bool from_cache = false;
    int latency_ms = 0;
};

enum class BackendMode { Live, Replay, LiveRecording };

struct BackendConfig {
    std::string endpoint_url;
    std::string api_key_env = "MATHVERIFY_API_KEY";
    int max_retries = 3;
    int backoff_base_ms = 500;
    int max_concurrency = 8;
    std::filesystem::path cache_dir;
    BackendMode mode = BackendMode::Replay;
};

// Raw transport: posts a chat-completions JSON body, returns the endpoint's
// JSON reply. Throws TransportError (transient flag drives retries).
class Transport {
public:
    virtual ~Transport() = default;
    virtual std::string post(const std::string& body) = 0;
};

// HTTP transport speaking the de-facto chat-completions shape, bearer token
// from the environment variable named in the config.
std::unique_ptr<Transport> make_http_transport(const BackendConfig& cfg);

// Canonical cache key: sha256 over a fixed-field-order serialization of
// (model, messages, temperature, max_tokens, cache_salt).
std::string request_digest(const ChatRequest& req);

// Thread-safe client with content-addressed disk caching, bounded
// concurrency and exponential-backoff retries. In Replay mode a cache miss
// is an error and the transport is never touched.
class JudgeClient {
public:
    JudgeClient(BackendConfig cfg, std::shared_ptr<Transport> transport = nullptr);

    ChatResponse chat(const ChatRequest& req);

    const BackendConfig& config() const { return cfg_; }

    // Test hooks.
    int peak_in_flight() const { return peak_in_flight_.load(); }
    long transport_calls() const { return transport_calls_.load(); }

private:
    std::filesystem::path cache_path(const std::string& digest) const;
    bool cache_lookup(const std::string& digest, std::string* text) const;
    void cache_store(const ChatRequest& req, const std::string& digest,
                     const std::string& text) const;

    BackendConfig cfg_;
    std::shared_ptr<Transport> transport_;

    mutable std::mutex mu_;
    std::condition_variable slot_free_;
    int in_flight_ = 0;
    std::atomic<int> peak_in_flight_{0};
    std::atomic<long> transport_calls_{0};
};

}  // namespace mathverify
