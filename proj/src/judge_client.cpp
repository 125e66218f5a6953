#include "mathverify/judge_client.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "mathverify/digest.hpp"
#include "mathverify/errors.hpp"
#include "mathverify/ingest.hpp"

using nlohmann::json;

namespace mathverify {

namespace {

json request_body(const ChatRequest& req) {
    json messages = json::array();
    for (const auto& m : req.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
    return {{"model", req.model},
            {"messages", messages},
            {"temperature", req.temperature},
            {"max_tokens", req.max_tokens}};
}

class HttpTransport : public Transport {
public:
    explicit HttpTransport(const BackendConfig& cfg) : cfg_(cfg) {
        // Split scheme://host[:port] from the path.
        auto pos = cfg.endpoint_url.find("://");
        if (pos == std::string::npos)
            throw ConfigError("endpoint URL must include a scheme: " + cfg.endpoint_url);
        auto path_pos = cfg.endpoint_url.find('/', pos + 3);
        if (path_pos == std::string::npos) {
            base_ = cfg.endpoint_url;
            path_ = "/";
        } else {
            base_ = cfg.endpoint_url.substr(0, path_pos);
            path_ = cfg.endpoint_url.substr(path_pos);
        }
        const char* key = cfg.api_key_env.empty() ? nullptr : std::getenv(cfg.api_key_env.c_str());
        if (key) bearer_ = key;
    }

    std::string post(const std::string& body) override {
        httplib::Client client(base_);
        client.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (!bearer_.empty()) headers.emplace("Authorization", "Bearer " + bearer_);
        auto res = client.Post(path_, headers, body, "application/json");
        if (!res)
            throw TransportError("connection to " + base_ + " failed: " + httplib::to_string(res.error()),
                                 /*transient=*/true);
        if (res->status == 429 || res->status >= 500)
            throw TransportError("HTTP " + std::to_string(res->status) + " from " + base_,
                                 /*transient=*/true);
        if (res->status != 200)
            throw TransportError("HTTP " + std::to_string(res->status) + " from " + base_);
        return res->body;
    }

private:
    BackendConfig cfg_;
    std::string base_, path_, bearer_;
};

std::string extract_assistant_text(const std::string& raw) {
    json reply;
    try {
        reply = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw MalformedEndpointReply(std::string("not JSON: ") + e.what());
    }
    if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty())
        throw MalformedEndpointReply("missing choices array");
    const auto& msg = reply["choices"][0];
    if (!msg.contains("message") || !msg["message"].contains("content") ||
        !msg["message"]["content"].is_string())
        throw MalformedEndpointReply("missing choices[0].message.content");
    return msg["message"]["content"].get<std::string>();
}

int jitter_ms(int base) {
    thread_local std::mt19937 rng(std::random_device{}());
    if (base <= 0) return 0;
    return std::uniform_int_distribution<int>(0, base)(rng);
}

}  // namespace

std::unique_ptr<Transport> make_http_transport(const BackendConfig& cfg) {
    return std::make_unique<HttpTransport>(cfg);
}

std::string request_digest(const ChatRequest& req) {
    json messages = json::array();
    for (const auto& m : req.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
    // nlohmann orders object keys alphabetically, so dump() is canonical.
    json canonical = {{"cache_salt", req.cache_salt},
                      {"max_tokens", req.max_tokens},
                      {"messages", messages},
                      {"model", req.model},
                      {"temperature", req.temperature}};
    return sha256_hex(canonical.dump());
}

JudgeClient::JudgeClient(BackendConfig cfg, std::shared_ptr<Transport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {
    if (const char* dir = std::getenv("MATHVERIFY_CACHE_DIR")) cfg_.cache_dir = dir;
    if (cfg_.max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
    if (cfg_.mode == BackendMode::Replay) {
        if (cfg_.cache_dir.empty() || !std::filesystem::exists(cfg_.cache_dir))
            throw ConfigError("replay mode requires an existing cache directory");
    } else if (!transport_) {
        transport_ = make_http_transport(cfg_);
    }
}

std::filesystem::path JudgeClient::cache_path(const std::string& digest) const {
    return cfg_.cache_dir / digest.substr(0, 2) / (digest + ".json");
}

bool JudgeClient::cache_lookup(const std::string& digest, std::string* text) const {
    if (cfg_.cache_dir.empty()) return false;
    std::ifstream in(cache_path(digest));
    if (!in) return false;
    json entry;
    try {
        in >> entry;
        *text = entry.at("response").at("text").get<std::string>();
    } catch (...) {
        return false;
    }
    return true;
}

void JudgeClient::cache_store(const ChatRequest& req, const std::string& digest,
                              const std::string& text) const {
    if (cfg_.cache_dir.empty()) return;
    auto path = cache_path(digest);
    std::filesystem::create_directories(path.parent_path());
    json entry = {{"request", request_body(req)},
                  {"cache_salt", req.cache_salt},
                  {"response", {{"text", text}}},
                  {"timestamp", iso8601_now()}};
    write_text_atomic(path, entry.dump(2) + "\n");
}

ChatResponse JudgeClient::chat(const ChatRequest& req) {
    std::string digest = request_digest(req);

    std::string cached;
    if (cache_lookup(digest, &cached)) return {cached, true, 0};
    if (cfg_.mode == BackendMode::Replay) throw ReplayMiss(digest);

    // Bounded concurrency across all callers.
    {
        std::unique_lock lock(mu_);
        slot_free_.wait(lock, [&] { return in_flight_ < cfg_.max_concurrency; });
        ++in_flight_;
        int peak = peak_in_flight_.load();
        while (in_flight_ > peak && !peak_in_flight_.compare_exchange_weak(peak, in_flight_)) {
        }
    }
    struct SlotGuard {
        JudgeClient* c;
        ~SlotGuard() {
            {
                std::lock_guard lock(c->mu_);
                --c->in_flight_;
            }
            c->slot_free_.notify_one();
        }
    } guard{this};

    auto start = std::chrono::steady_clock::now();
    std::string body = request_body(req).dump();
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0) {
            int delay = cfg_.backoff_base_ms * (1 << (attempt - 1)) + jitter_ms(cfg_.backoff_base_ms / 2);
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
        try {
            transport_calls_.fetch_add(1);
            std::string raw = transport_->post(body);
            std::string text = extract_assistant_text(raw);
            if (cfg_.mode == BackendMode::LiveRecording) cache_store(req, digest, text);
            auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
            return {text, false, static_cast<int>(ms)};
        } catch (const MalformedEndpointReply&) {
            throw;
        } catch (const TransportError& e) {
            if (!e.transient) throw;
            last_error = e.what();
        }
    }
    throw RetriesExhausted(last_error);
}

}  // namespace mathverify
