#include <charconv>

#include <httplib.h>

#include "regiolex/review.hpp"

namespace regiolex {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json; charset=utf-8";

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  send_json(res, status, {{"code", code}, {"message", message}});
}

std::size_t query_size(const httplib::Request& req, const char* key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  const auto value = req.get_param_value(key);
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ServiceError(400, "invalid_parameter", std::string("query parameter '") + key +
                                                     "' must be a non-negative integer");
  }
  return out;
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const ServiceError& e) {
      send_error(res, e.status(), e.code(), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

}  // namespace

struct ReviewServer::Impl {
  ReviewService& service;
  httplib::Server server;
};

ReviewServer::ReviewServer(ReviewService& service, std::optional<std::filesystem::path> static_dir)
    : impl_(new Impl{service, {}}) {
  auto& svr = impl_->server;
  auto& svc = impl_->service;

  svr.Get(R"(/api/rankings/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            const auto offset = query_size(req, "offset", 0);
            const auto limit = query_size(req, "limit", ReviewService::kDefaultLimit);
            send_json(res, 200, svc.rankings_page(req.matches[1].str(), offset, limit));
          }));
  svr.Get(R"(/api/words/(.+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, svc.word_detail(req.matches[1].str()));
          }));
  svr.Post("/api/annotations", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             const auto body = json::parse(req.body, nullptr, false);
             if (body.is_discarded()) throw ServiceError(400, "invalid_json", "request body is not valid JSON");
             send_json(res, 201, svc.post_annotation(body));
           }));
  svr.Get(R"(/api/export/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, svc.export_annotations(req.matches[1].str()));
          }));
  svr.Get("/api/metrics", guarded([&svc](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, {{"metrics", svc.metrics()}});
          }));

  if (static_dir) {
    if (!svr.set_mount_point("/", static_dir->string())) {
      throw std::runtime_error("static directory " + static_dir->string() + " does not exist");
    }
  }
  svr.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) {
      send_error(res, 404, "not_found", "no route for " + req.method + " " + req.path);
    } else {
      send_error(res, res.status, "http_error", httplib::status_message(res.status));
    }
  });
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool ReviewServer::listen() { return impl_->server.listen_after_bind(); }

void ReviewServer::stop() {
  if (impl_) impl_->server.stop();
}

void ReviewServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace regiolex
