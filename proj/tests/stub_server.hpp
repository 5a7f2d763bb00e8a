#pragma once

// Local HTTP stand-in for a remote operator service.

#include <functional>
#include <mutex>
#include <string>
#include <thread>

#include "httplib.h"

namespace stub {

using Handler = std::function<void(const std::string& route, const httplib::Request&, httplib::Response&)>;

class Server {
public:
    Server() {
        auto route = [this](const std::string& name) {
            return [this, name](const httplib::Request& req, httplib::Response& res) {
                Handler h;
                {
                    std::lock_guard lock(mutex_);
                    h = handler_;
                }
                if (h) h(name, req, res);
            };
        };
        server_.Post("/op/reflect", route("reflect"));
        server_.Post("/op/evolve", route("evolve"));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~Server() { stop(); }

    void stop() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    void on(Handler h) {
        std::lock_guard lock(mutex_);
        handler_ = std::move(h);
    }

    int port() const { return port_; }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/op"; }

private:
    httplib::Server server_;
    std::thread thread_;
    std::mutex mutex_;
    Handler handler_;
    int port_ = 0;
};

}  // namespace stub
