#include "stub_server.hpp"

#include <thread>

#include <httplib.h>

namespace atelier::testing {

struct StubServer::Impl {
    httplib::Server http;
    std::thread worker;
    mutable std::mutex mutex;
    std::map<std::string, Handler> handlers;
    std::vector<StubRequest> log;
};

StubServer::StubServer() : impl_(std::make_unique<Impl>()) {
    impl_->http.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
        StubRequest r{req.path, {req.params.begin(), req.params.end()}, std::chrono::steady_clock::now()};
        Handler handler;
        {
            std::lock_guard lock(impl_->mutex);
            impl_->log.push_back(r);
            auto it = impl_->handlers.find(req.path);
            if (it != impl_->handlers.end()) handler = it->second;
        }
        const StubReply reply = handler ? handler(r) : StubReply{404, "not found"};
        res.status = reply.status;
        res.set_content(reply.body, reply.content_type);
    });
    port_ = impl_->http.bind_to_any_port("127.0.0.1");
    impl_->worker = std::thread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
}

StubServer::~StubServer() {
    impl_->http.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

void StubServer::on(const std::string& path, Handler handler) {
    std::lock_guard lock(impl_->mutex);
    impl_->handlers[path] = std::move(handler);
}

void StubServer::on(const std::string& path, StubReply reply) {
    on(path, [reply](const StubRequest&) { return reply; });
}

std::string StubServer::url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
}

std::vector<StubRequest> StubServer::requests() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->log;
}

std::size_t StubServer::request_count(const std::string& path) const {
    std::lock_guard lock(impl_->mutex);
    std::size_t n = 0;
    for (const auto& r : impl_->log) n += r.path == path;
    return n;
}

}  // namespace atelier::testing
