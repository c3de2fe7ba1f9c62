#include "atelier/net.hpp"

#include <regex>
#include <thread>

#include <httplib.h>

namespace atelier::net {

namespace {

// IPv6 literals are stored bare and bracketed on output.
std::string authority_host(const std::string& host) {
    return host.find(':') == std::string::npos ? host : "[" + host + "]";
}

}  // namespace

std::string Url::origin() const { return scheme + "://" + authority_host(host) + ":" + std::to_string(port); }

std::optional<Url> parse_url(std::string_view text) {
    static const std::regex pattern(
        R"(^(https?)://((?:[A-Za-z0-9](?:[A-Za-z0-9-]*[A-Za-z0-9])?)(?:\.(?:[A-Za-z0-9](?:[A-Za-z0-9-]*[A-Za-z0-9])?))*|\[[0-9A-Fa-f:.]+\])(?::([0-9]{1,5}))?([/?][^\s#]*)?(?:#\S*)?$)",
        std::regex::icase);
    std::cmatch m;
    if (!std::regex_match(text.data(), text.data() + text.size(), m, pattern)) return std::nullopt;
    Url url;
    url.scheme = m[1].str();
    for (char& c : url.scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    url.host = m[2].str();
    if (url.host.front() == '[') url.host = url.host.substr(1, url.host.size() - 2);
    url.port = url.scheme == "https" ? 443 : 80;
    if (m[3].matched) {
        url.port = std::stoi(m[3].str());
        if (url.port < 1 || url.port > 65535) return std::nullopt;
    }
    url.target = m[4].matched ? m[4].str() : "/";
    if (url.target.front() == '?') url.target.insert(0, "/");
    return url;
}

namespace {

std::string remove_dot_segments(const std::string& path) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    const bool trailing = path.ends_with("/") || path.ends_with("/.") || path.ends_with("/..");
    while (pos <= path.size()) {
        const auto next = path.find('/', pos);
        const std::string seg = path.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        if (seg == "..") {
            if (!out.empty()) out.pop_back();
        } else if (!seg.empty() && seg != ".") {
            out.push_back(seg);
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    std::string result;
    for (const auto& seg : out) result += "/" + seg;
    if (trailing || result.empty()) result += "/";
    return result;
}

}  // namespace

std::string resolve_url(std::string_view base, std::string_view reference) {
    const std::string ref(reference);
    if (ref.empty()) return std::string(base);
    static const std::regex has_scheme(R"(^[A-Za-z][A-Za-z0-9+.-]*:)");
    if (std::regex_search(ref, has_scheme)) return ref;
    auto parsed = parse_url(base);
    if (!parsed) return ref;
    const std::string scheme_host = parsed->scheme + "://" + authority_host(parsed->host) +
                                    ((parsed->scheme == "https" && parsed->port == 443) ||
                                             (parsed->scheme == "http" && parsed->port == 80)
                                         ? ""
                                         : ":" + std::to_string(parsed->port));
    if (ref.starts_with("//")) return parsed->scheme + ":" + ref;
    std::string base_path = parsed->target.substr(0, parsed->target.find('?'));
    if (ref.starts_with("/")) return scheme_host + remove_dot_segments(ref.substr(0, ref.find('?'))) +
                                     (ref.find('?') == std::string::npos ? "" : ref.substr(ref.find('?')));
    if (ref.starts_with("?")) return scheme_host + base_path + ref;
    const std::string dir = base_path.substr(0, base_path.rfind('/') + 1);
    const auto q = ref.find('?');
    const std::string ref_path = ref.substr(0, q);
    return scheme_host + remove_dot_segments(dir + ref_path) + (q == std::string::npos ? "" : ref.substr(q));
}

std::string percent_encode(std::string_view s) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xF];
        }
    }
    return out;
}

std::optional<HttpResponse> http_get(const Url& url, const Params& query, std::chrono::milliseconds timeout) {
    httplib::Client client(url.origin());
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_follow_location(true);

    std::string target = url.target;
    if (!query.empty()) {
        target += target.find('?') == std::string::npos ? '?' : '&';
        for (std::size_t i = 0; i < query.size(); ++i) {
            if (i > 0) target += '&';
            target += percent_encode(query[i].first) + "=" + percent_encode(query[i].second);
        }
    }
    auto result = client.Get(target, httplib::Headers{{"User-Agent", "atelier/1.0"}});
    if (!result) return std::nullopt;
    return HttpResponse{result->status, result->body};
}

RateGate::Pass::~Pass() {
    if (gate_) gate_->release(key_, interval_);
}

RateGate::Pass RateGate::acquire(const std::string& key, std::chrono::milliseconds interval) {
    Clock::time_point slot;
    {
        std::unique_lock lock(mutex_);
        auto& s = slots_[key];
        cv_.wait(lock, [&] { return !s.busy; });
        s.busy = true;
        slot = s.next;
    }
    std::this_thread::sleep_until(slot);
    return Pass(this, key, interval);
}

void RateGate::release(const std::string& key, std::chrono::milliseconds interval) {
    {
        std::lock_guard lock(mutex_);
        auto& s = slots_[key];
        s.busy = false;
        s.next = Clock::now() + interval;
    }
    cv_.notify_all();
}

}  // namespace atelier::net
