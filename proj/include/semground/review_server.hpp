#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "semground/json_io.hpp"
#include "semground/pipeline.hpp"

namespace semground {

enum class ReviewStatus { Pending, Approved, Rejected };

std::string_view to_string(ReviewStatus s);

struct ReviewSession {
  std::string run_id;
  InputSample input;
  SemanticSpec spec;
  Grounding proposed;
  ReviewStatus status = ReviewStatus::Pending;
  std::optional<Grounding> edited;
};

json session_to_json(const ReviewSession& s);

/// Local HTTP panel for the approval gate.
///   GET  /session   session JSON
///   GET  /image     input preview as PNG (images only)
///   POST /decision  {run_id?, status: "approved"|"rejected", regions?}
/// The first decision wins; later ones get 409. A run_id that does not match
/// gets 404.
class ReviewServer {
 public:
  explicit ReviewServer(ReviewSession session, std::optional<std::filesystem::path> assets_dir = std::nullopt);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  /// Binds and starts serving on a background thread. Port 0 picks a free one.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  int port() const noexcept { return port_; }

  /// Blocks until a decision arrives or the timeout expires (nullopt).
  std::optional<ApprovalDecision> wait_for_decision(std::chrono::milliseconds timeout);

  ReviewSession snapshot() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

std::string new_run_id();

/// Approval gate backed by a ReviewServer. A timeout counts as rejection.
ApprovalGate review_gate(std::ostream& log, std::chrono::milliseconds timeout, int port = 0,
                         std::optional<std::filesystem::path> assets_dir = std::nullopt);

}  // namespace semground
