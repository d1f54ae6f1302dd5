#include "labelforge/review_server.hpp"

#include <httplib.h>

#include <filesystem>

#include "labelforge/dataset_io.hpp"
#include "labelforge/error.hpp"
#include "labelforge/log.hpp"

namespace labelforge {

namespace {

void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, {{"error", message}});
}

std::optional<std::size_t> parse_count(const std::string& text) {
  if (text.empty() || text.size() > 9) return std::nullopt;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  return static_cast<std::size_t>(std::stoul(text));
}

}  // namespace

ReviewServer::ReviewServer(ReviewServerOptions options)
    : options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()),
      queue_(load_review_queue(options_.queue_path)) {
  if (!options_.clock) options_.clock = &system_clock_;
  routes();
}

ReviewServer::~ReviewServer() { stop(); }

ReviewQueue ReviewServer::snapshot() const {
  std::lock_guard lock(mutex_);
  return queue_;
}

int ReviewServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind review server on " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw IoError("cannot bind review server on " + host + ":" + std::to_string(port));
  }
  return port;
}

void ReviewServer::serve() { server_->listen_after_bind(); }

void ReviewServer::stop() {
  if (server_) server_->stop();
}

bool ReviewServer::running() const { return server_->is_running(); }

void ReviewServer::routes() {
  auto& s = *server_;

  s.Get("/api/queue", [this](const httplib::Request& req, httplib::Response& res) {
    std::optional<Decision> status;
    if (req.has_param("status")) {
      status = decision_from_string(req.get_param_value("status"));
      if (!status) return fail(res, 400, "status must be pending, keep or remove");
    }
    const auto disorder = req.get_param_value("disorder");
    std::size_t offset = 0;
    std::size_t limit = 50;
    if (req.has_param("offset")) {
      auto v = parse_count(req.get_param_value("offset"));
      if (!v) return fail(res, 400, "offset must be a non-negative integer");
      offset = *v;
    }
    if (req.has_param("limit")) {
      auto v = parse_count(req.get_param_value("limit"));
      if (!v || *v == 0 || *v > 1000) return fail(res, 400, "limit must be between 1 and 1000");
      limit = *v;
    }
    std::lock_guard lock(mutex_);
    nlohmann::json items = nlohmann::json::array();
    std::size_t total = 0;
    for (const auto& item : queue_.items()) {
      if (status && item.decision != *status) continue;
      if (!disorder.empty() && item.origin_disorder != disorder) continue;
      if (total >= offset && items.size() < limit) items.push_back(to_json(item));
      ++total;
    }
    reply(res, 200, {{"items", items}, {"total", total}, {"offset", offset}, {"limit", limit}});
  });

  s.Get(R"(/api/posts/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    const auto* item = queue_.find(req.matches[1].str());
    if (!item) return fail(res, 404, "unknown post id '" + req.matches[1].str() + "'");
    reply(res, 200, to_json(*item));
  });

  auto change = [this](httplib::Response& res, const std::string& post_id, auto&& mutate) {
    std::lock_guard lock(mutex_);
    if (!queue_.find(post_id)) return fail(res, 404, "unknown post id '" + post_id + "'");
    auto next = queue_;
    DecideResult result;
    try {
      result = mutate(next);
    } catch (const UserError& e) {
      return fail(res, 409, e.what());
    }
    if (result == DecideResult::applied) {
      try {
        save_review_queue(next, options_.queue_path);
      } catch (const Error& e) {
        return fail(res, 500, e.what());
      }
      queue_ = std::move(next);
    }
    reply(res, 200, {{"item", to_json(*queue_.find(post_id))}, {"changed", result == DecideResult::applied}});
  };

  s.Post("/api/decisions", [this, change](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error&) {
      return fail(res, 400, "body must be JSON");
    }
    if (!body.is_object() || !body.contains("post_id") || !body["post_id"].is_string() ||
        !body.contains("decision") || !body["decision"].is_string()) {
      return fail(res, 400, "body needs string fields post_id and decision");
    }
    const auto decision = decision_from_string(body["decision"].get<std::string>());
    if (!decision || *decision == Decision::pending) return fail(res, 400, "decision must be keep or remove");
    std::optional<std::string> note;
    if (body.contains("note") && !body["note"].is_null()) {
      if (!body["note"].is_string()) return fail(res, 400, "note must be a string");
      note = body["note"].get<std::string>();
    }
    const auto post_id = body["post_id"].get<std::string>();
    const auto stamp = options_.clock->timestamp();
    change(res, post_id, [&](ReviewQueue& q) { return q.decide(post_id, *decision, stamp, note); });
  });

  s.Post(R"(/api/decisions/([^/]+)/undo)", [change](const httplib::Request& req, httplib::Response& res) {
    const auto post_id = req.matches[1].str();
    change(res, post_id, [&](ReviewQueue& q) { return q.undo(post_id); });
  });

  s.Get("/api/progress", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [d, p] : queue_.progress()) {
      out[d] = {{"total", p.total}, {"pending", p.pending}, {"keep", p.kept}, {"remove", p.removed}};
    }
    reply(res, 200, out);
  });

  s.Get("/api/matrix", [this](const httplib::Request&, httplib::Response& res) {
    if (options_.matrix_path.empty() || !std::filesystem::exists(options_.matrix_path)) {
      return fail(res, 404, "no analysis export; run labelforge analyze first");
    }
    try {
      res.status = 200;
      res.set_content(read_file(options_.matrix_path), "application/json");
    } catch (const Error& e) {
      fail(res, 500, e.what());
    }
  });

  if (!options_.static_dir.empty()) s.set_mount_point("/", options_.static_dir);

  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) fail(res, res.status, httplib::status_message(res.status));
  });
}

}  // namespace labelforge
