#include "semground/review_server.hpp"

#include <atomic>
#include <ostream>
#include <random>
#include <thread>

#include <httplib.h>

#include "semground/image_codec.hpp"

namespace semground {

std::string_view to_string(ReviewStatus s) {
  switch (s) {
    case ReviewStatus::Pending: return "pending";
    case ReviewStatus::Approved: return "approved";
    case ReviewStatus::Rejected: return "rejected";
  }
  return "pending";
}

json session_to_json(const ReviewSession& s) {
  json j{{"run_id", s.run_id},
         {"input_id", s.input.id},
         {"kind", to_string(s.input.kind)},
         {"shape", s.input.shape},
         {"spec", s.spec},
         {"regions", s.proposed.regions},
         {"source", to_string(s.proposed.source)},
         {"status", to_string(s.status)},
         {"edited_regions", nullptr}};
  if (s.input.kind == SampleKind::TabularVector) j["values"] = s.input.values;
  if (s.edited) j["edited_regions"] = s.edited->regions;
  return j;
}

struct ReviewServer::Impl {
  mutable std::mutex mu;
  std::condition_variable cv;
  ReviewSession session;
  std::optional<ApprovalDecision> recorded;  // set by the handler
  std::optional<ApprovalDecision> decision;  // published once the reply is on the wire
  httplib::Server server;
  std::thread thread;

  void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  bool run_id_matches(const std::string& given) const { return given.empty() || given == session.run_id; }

  void handle_decision(const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      return reply(res, 400, {{"error", std::string("invalid JSON: ") + e.what()}});
    }
    if (!body.is_object()) return reply(res, 400, {{"error", "expected a JSON object"}});

    std::unique_lock lock(mu);
    std::string run_id = req.has_param("run_id") ? req.get_param_value("run_id") : "";
    if (body.contains("run_id") && body["run_id"].is_string()) run_id = body["run_id"].get<std::string>();
    if (!run_id_matches(run_id)) return reply(res, 404, {{"error", "unknown run_id '" + run_id + "'"}});
    if (session.status != ReviewStatus::Pending) {
      return reply(res, 409, {{"error", "decision already recorded"}, {"status", to_string(session.status)}});
    }

    const std::string status = body.value("status", std::string{});
    ApprovalDecision d;
    d.method = "review";
    if (status == "rejected") {
      d.status = ApprovalStatus::Rejected;
    } else if (status == "approved") {
      d.status = ApprovalStatus::Approved;
      if (body.contains("regions") && !body["regions"].is_null()) {
        try {
          Grounding g{body["regions"].get<std::vector<Region>>(), GroundingSource::UserEdited};
          validate(g, session.input);
          d.edited = std::move(g);
        } catch (const json::exception& e) {
          return reply(res, 400, {{"error", std::string("invalid regions: ") + e.what()}});
        } catch (const Error& e) {
          return reply(res, 400, {{"error", e.what()}});
        }
      }
    } else {
      return reply(res, 400, {{"error", "status must be 'approved' or 'rejected'"}});
    }

    session.status = d.status == ApprovalStatus::Approved ? ReviewStatus::Approved : ReviewStatus::Rejected;
    session.edited = d.edited;
    recorded = std::move(d);
    reply(res, 200, session_to_json(session));
  }

  void publish() {
    {
      std::lock_guard lock(mu);
      if (!recorded || decision) return;
      decision = recorded;
    }
    cv.notify_all();
  }
};

ReviewServer::ReviewServer(ReviewSession session, std::optional<std::filesystem::path> assets_dir)
    : impl_(std::make_unique<Impl>()) {
  impl_->session = std::move(session);
  auto* im = impl_.get();

  im->server.Get("/session", [im](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(im->mu);
    const auto run_id = req.has_param("run_id") ? req.get_param_value("run_id") : "";
    if (!im->run_id_matches(run_id)) return im->reply(res, 404, {{"error", "unknown run_id '" + run_id + "'"}});
    im->reply(res, 200, session_to_json(im->session));
  });

  im->server.Get("/image", [im](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(im->mu);
    const auto run_id = req.has_param("run_id") ? req.get_param_value("run_id") : "";
    if (!im->run_id_matches(run_id)) return im->reply(res, 404, {{"error", "unknown run_id '" + run_id + "'"}});
    if (im->session.input.kind != SampleKind::ImageGrayscale) {
      return im->reply(res, 404, {{"error", "input is not an image"}});
    }
    res.set_content(encode_png_grayscale(im->session.input), "image/png");
  });

  im->server.Post("/decision",
                  [im](const httplib::Request& req, httplib::Response& res) { im->handle_decision(req, res); });

  // the logger runs after the response is written, so a caller that stops the
  // server on wake-up never cuts the reviewer's reply short
  im->server.set_logger([im](const httplib::Request& req, const httplib::Response& res) {
    if (req.path == "/decision" && res.status == 200) im->publish();
  });

  if (assets_dir) im->server.set_mount_point("/", assets_dir->string());
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::start(const std::string& host, int port) {
  auto& srv = impl_->server;
  if (port == 0) {
    port_ = srv.bind_to_any_port(host);
  } else {
    port_ = srv.bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) throw Error(ErrorCode::Io, "cannot bind review server on " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([&srv] { srv.listen_after_bind(); });
  srv.wait_until_ready();
  return port_;
}

void ReviewServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::optional<ApprovalDecision> ReviewServer::wait_for_decision(std::chrono::milliseconds timeout) {
  std::unique_lock lock(impl_->mu);
  if (!impl_->cv.wait_for(lock, timeout, [&] { return impl_->decision.has_value(); })) return std::nullopt;
  return impl_->decision;
}

ReviewSession ReviewServer::snapshot() const {
  std::lock_guard lock(impl_->mu);
  return impl_->session;
}

std::string new_run_id() {
  std::random_device rd;
  std::uniform_int_distribution<unsigned> nibble(0, 15);
  std::string id;
  for (int i = 0; i < 16; ++i) id += "0123456789abcdef"[nibble(rd)];
  return id;
}

ApprovalGate review_gate(std::ostream& log, std::chrono::milliseconds timeout, int port,
                         std::optional<std::filesystem::path> assets_dir) {
  return [&log, timeout, port, assets_dir](const InputSample& x, const SemanticSpec& spec, const Grounding& g) {
    ReviewServer server(ReviewSession{new_run_id(), x, spec, g, ReviewStatus::Pending, std::nullopt}, assets_dir);
    const int bound = server.start("127.0.0.1", port);
    log << "review panel: http://127.0.0.1:" << bound << "/ (run " << server.snapshot().run_id << ")\n"
        << std::flush;
    auto d = server.wait_for_decision(timeout);
    server.stop();
    if (!d) return ApprovalDecision{ApprovalStatus::Rejected, std::nullopt, "review-timeout"};
    return *d;
  };
}

}  // namespace semground
