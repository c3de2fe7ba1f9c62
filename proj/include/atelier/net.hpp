#pragma once

#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace atelier::net {

struct Url {
    std::string scheme;  // "http" or "https"
    std::string host;  // IPv6 literals without brackets
    int port = 0;
    std::string target;  // path plus query, at least "/"

    // scheme://host:port, the unit of politeness.
    std::string origin() const;
};

// Accepts absolute http(s) URLs with a DNS name, IPv4 literal or bracketed
// IPv6 literal.
std::optional<Url> parse_url(std::string_view text);

// Resolves a possibly relative reference against an absolute base URL.
std::string resolve_url(std::string_view base, std::string_view reference);

std::string percent_encode(std::string_view s);

struct HttpResponse {
    int status = 0;
    std::string body;
};

using Params = std::vector<std::pair<std::string, std::string>>;

// One GET; nullopt when no HTTP response could be obtained (DNS, connect,
// TLS or read failure).
std::optional<HttpResponse> http_get(const Url& url, const Params& query = {},
                                     std::chrono::milliseconds timeout = std::chrono::seconds(10));

// Serializes requests per key and spaces them: a request may start no
// earlier than interval after the previous one for the same key finished.
// Thread-safe.
class RateGate {
public:
    using Clock = std::chrono::steady_clock;

    explicit RateGate(std::chrono::milliseconds interval) : interval_(interval) {}

    // Held for the duration of one request.
    class Pass {
    public:
        Pass(Pass&& other) noexcept
            : gate_(std::exchange(other.gate_, nullptr)), key_(std::move(other.key_)), interval_(other.interval_) {}
        Pass(const Pass&) = delete;
        Pass& operator=(const Pass&) = delete;
        Pass& operator=(Pass&&) = delete;
        ~Pass();

    private:
        friend class RateGate;
        Pass(RateGate* gate, std::string key, std::chrono::milliseconds interval)
            : gate_(gate), key_(std::move(key)), interval_(interval) {}
        RateGate* gate_;
        std::string key_;
        std::chrono::milliseconds interval_;
    };

    // Blocks until the key is free and its interval has elapsed.
    Pass acquire(const std::string& key) { return acquire(key, interval_); }
    Pass acquire(const std::string& key, std::chrono::milliseconds interval);

    std::chrono::milliseconds interval() const noexcept { return interval_; }

private:
    struct Slot {
        bool busy = false;
        Clock::time_point next;
    };

    void release(const std::string& key, std::chrono::milliseconds interval);

    std::chrono::milliseconds interval_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::map<std::string, Slot> slots_;
};

}  // namespace atelier::net
