#include "semground/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "semground/error.hpp"

namespace semground {

void validate(const VerifierConfig& cfg) {
  if (cfg.max_nodes == 0 || !(cfg.split_tolerance > 0.0) || !(cfg.margin_tolerance > 0.0) ||
      cfg.pgd_steps <= 0 || cfg.pgd_restarts <= 0 || cfg.parallel_workers <= 0) {
    throw Error(ErrorCode::InvalidArgument, "verifier configuration values must be positive");
  }
}

BoundsBox ibp_forward(const Network& net, const BoundsBox& box) {
  if (box.lower.size() != net.input_dim() || box.upper.size() != net.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "ibp_forward: box width " + std::to_string(box.size()) +
                                                  " != input_dim " + std::to_string(net.input_dim()));
  }
  std::vector<double> center(box.size()), radius(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (box.lower[i] > box.upper[i]) throw Error(ErrorCode::InvalidArgument, "ibp_forward: lower > upper");
    center[i] = 0.5 * (box.lower[i] + box.upper[i]);
    radius[i] = 0.5 * (box.upper[i] - box.lower[i]);
  }
  BoundsBox out;
  for (const auto& l : net.layers()) {
    const double n = static_cast<double>(l.in + 3);
    const double u = std::numeric_limits<double>::epsilon() / 2;
    const double gamma = n * u / (1.0 - n * u);
    out.lower.assign(l.out, 0.0);
    out.upper.assign(l.out, 0.0);
    for (std::size_t r = 0; r < l.out; ++r) {
      const double* row = l.weights.data() + r * l.in;
      double c = l.bias[r];
      double rad = 0.0;
      double mag = std::abs(l.bias[r]);
      for (std::size_t k = 0; k < l.in; ++k) {
        c += row[k] * center[k];
        rad += std::abs(row[k]) * radius[k];
        mag += std::abs(row[k]) * (std::abs(center[k]) + radius[k]);
      }
      // round-off of this sum and of any concrete forward pass through the box
      const double slack = 2.0 * gamma * mag + std::numeric_limits<double>::denorm_min();
      double lo = c - rad - slack;
      double hi = c + rad + slack;
      if (l.activation == Activation::Relu) {
        lo = std::max(0.0, lo);
        hi = std::max(0.0, hi);
      }
      out.lower[r] = lo;
      out.upper[r] = hi;
    }
    center.resize(l.out);
    radius.resize(l.out);
    for (std::size_t r = 0; r < l.out; ++r) {
      center[r] = 0.5 * (out.lower[r] + out.upper[r]);
      radius[r] = 0.5 * (out.upper[r] - out.lower[r]);
    }
  }
  return out;
}

double violation_margin_bound(const BoundsBox& out, std::size_t target_class) {
  if (target_class >= out.size() || out.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "violation_margin_bound: target class out of range");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (j == target_class) continue;
    best = std::max(best, out.upper[j] - out.lower[target_class]);
  }
  return best;
}

double margin(std::span<const double> logits, std::size_t target_class) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (j != target_class) best = std::max(best, logits[j] - logits[target_class]);
  }
  return best;
}

MarginGradient margin_with_gradient(const Network& net, std::span<const double> x,
                                    std::size_t target_class) {
  if (x.size() != net.input_dim()) throw Error(ErrorCode::DimensionMismatch, "margin: input size");
  if (target_class >= net.output_dim()) throw Error(ErrorCode::InvalidArgument, "margin: target class");
  const auto& layers = net.layers();
  // pre-activations per layer, kept for the backward pass
  std::vector<std::vector<double>> pre(layers.size());
  std::vector<double> cur(x.begin(), x.end());
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    pre[k].assign(l.out, 0.0);
    std::vector<double> next(l.out);
    for (std::size_t r = 0; r < l.out; ++r) {
      const double* row = l.weights.data() + r * l.in;
      double acc = l.bias[r];
      for (std::size_t c = 0; c < l.in; ++c) acc += row[c] * cur[c];
      pre[k][r] = acc;
      next[r] = (l.activation == Activation::Relu && acc <= 0.0) ? 0.0 : acc;
    }
    cur.swap(next);
  }
  std::size_t best_j = target_class == 0 ? 1 : 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cur.size(); ++j) {
    if (j == target_class) continue;
    const double m = cur[j] - cur[target_class];
    if (m > best) {
      best = m;
      best_j = j;
    }
  }
  std::vector<double> g(cur.size(), 0.0);
  g[best_j] = 1.0;
  g[target_class] = -1.0;
  for (std::size_t k = layers.size(); k-- > 0;) {
    const auto& l = layers[k];
    if (l.activation == Activation::Relu) {
      for (std::size_t r = 0; r < l.out; ++r) {
        if (pre[k][r] <= 0.0) g[r] = 0.0;
      }
    }
    std::vector<double> prev(l.in, 0.0);
    for (std::size_t r = 0; r < l.out; ++r) {
      if (g[r] == 0.0) continue;
      const double* row = l.weights.data() + r * l.in;
      for (std::size_t c = 0; c < l.in; ++c) prev[c] += row[c] * g[r];
    }
    g.swap(prev);
  }
  return {best, std::move(g)};
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t box_seed(const BoundsBox& box, std::uint64_t base) {
  std::uint64_t h = splitmix64(base);
  for (std::size_t i = 0; i < box.size(); ++i) {
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(box.lower[i]));
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(box.upper[i]));
  }
  return h;
}

bool is_violation(const Network& net, std::span<const double> p, std::size_t target_class) {
  return argmax(net.forward(p)) != target_class;
}

}  // namespace

std::optional<std::vector<double>> find_counterexample_in_box(const Network& net,
                                                              const BoundsBox& box,
                                                              std::span<const double> reference,
                                                              std::size_t target_class,
                                                              const VerifierConfig& cfg,
                                                              std::uint64_t seed) {
  const std::size_t n = box.size();
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i) {
    if (box.upper[i] > box.lower[i]) free.push_back(i);
  }

  auto accept = [&](const std::vector<double>& p) -> bool {
    return margin(net.forward(p), target_class) > 0.0 && is_violation(net, p, target_class);
  };

  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = 0.5 * (box.lower[i] + box.upper[i]);
  if (free.empty()) {
    if (accept(p)) return p;
    return std::nullopt;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double base_step = 2.5 / cfg.pgd_steps;

  for (int restart = 0; restart < cfg.pgd_restarts; ++restart) {
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = box.lower[i];
      const double hi = box.upper[i];
      if (restart == 0) {
        p[i] = 0.5 * (lo + hi);
      } else if (restart == 1 && reference.size() == n) {
        p[i] = std::clamp(reference[i], lo, hi);
      } else {
        p[i] = lo == hi ? lo : lo + (hi - lo) * unit(rng);
      }
    }
    for (int step = 0; step <= cfg.pgd_steps; ++step) {
      auto mg = margin_with_gradient(net, p, target_class);
      if (mg.value > 0.0 && is_violation(net, p, target_class)) return p;
      if (step == cfg.pgd_steps) break;
      const double alpha = base_step * (1.0 - 0.9 * static_cast<double>(step) / cfg.pgd_steps);
      bool moved = false;
      for (std::size_t i : free) {
        const double g = mg.gradient[i];
        if (g == 0.0) continue;
        const double width = box.upper[i] - box.lower[i];
        const double next = std::clamp(p[i] + (g > 0.0 ? alpha : -alpha) * width, box.lower[i], box.upper[i]);
        moved = moved || next != p[i];
        p[i] = next;
      }
      if (!moved) break;
    }
  }
  return std::nullopt;
}

std::optional<std::vector<double>> find_counterexample(const Network& net, const GroundedSpec& spec,
                                                       const VerifierConfig& cfg) {
  if (spec.dim() != net.input_dim()) throw Error(ErrorCode::DimensionMismatch, "spec/net input dims differ");
  BoundsBox box{spec.input_lower, spec.input_upper};
  return find_counterexample_in_box(net, box, spec.reference.values, spec.target_class, cfg,
                                    box_seed(box, cfg.seed));
}

bool recheck_counterexample(const Network& net, const GroundedSpec& spec,
                            std::span<const double> point) {
  if (point.size() != spec.dim()) return false;
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (!(point[i] >= spec.input_lower[i] && point[i] <= spec.input_upper[i])) return false;
  }
  return is_violation(net, point, spec.target_class);
}

namespace {

enum class NodeOutcome { Certified, Counterexample, Split, Stuck };

struct NodeResult {
  NodeOutcome outcome = NodeOutcome::Certified;
  std::vector<double> counterexample;
  BoundsBox left, right;
};

NodeResult process_node(const Network& net, const BoundsBox& box, std::span<const double> reference,
                        std::size_t target_class, const VerifierConfig& cfg) {
  NodeResult res;
  std::size_t split_dim = box.size();
  double widest = 0.0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const double w = box.upper[i] - box.lower[i];
    if (w > widest) {
      widest = w;
      split_dim = i;
    }
  }
  if (split_dim == box.size()) {
    // point box: exact evaluation decides it
    if (is_violation(net, box.lower, target_class)) {
      res.outcome = NodeOutcome::Counterexample;
      res.counterexample = box.lower;
    }
    return res;
  }
  const auto out = ibp_forward(net, box);
  if (violation_margin_bound(out, target_class) < -cfg.margin_tolerance) return res;

  if (auto cex = find_counterexample_in_box(net, box, reference, target_class, cfg,
                                            box_seed(box, cfg.seed))) {
    res.outcome = NodeOutcome::Counterexample;
    res.counterexample = std::move(*cex);
    return res;
  }
  if (widest <= cfg.split_tolerance) {
    res.outcome = NodeOutcome::Stuck;
    return res;
  }
  const double mid = 0.5 * (box.lower[split_dim] + box.upper[split_dim]);
  res.outcome = NodeOutcome::Split;
  res.left = box;
  res.right = box;
  res.left.upper[split_dim] = mid;
  res.right.lower[split_dim] = mid;
  return res;
}

/// Shared LIFO work list with a first-counterexample latch.
class SearchState {
 public:
  explicit SearchState(BoundsBox root) { stack_.push_back(std::move(root)); }

  /// Blocks until work is available; returns false once the search is over.
  bool pop(BoundsBox& out) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return stop_ || !stack_.empty() || active_ == 0; });
    if (stop_ || stack_.empty()) {
      stop_ = true;
      cv_.notify_all();
      return false;
    }
    out = std::move(stack_.back());
    stack_.pop_back();
    ++active_;
    return true;
  }

  void finish(std::vector<BoundsBox> children) {
    std::lock_guard lock(mu_);
    --active_;
    // right half pushed first so the lower half is explored first
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack_.push_back(std::move(*it));
    cv_.notify_all();
  }

  void report_counterexample(std::vector<double> p) {
    std::lock_guard lock(mu_);
    if (!found_) {
      found_ = true;
      counterexample_ = std::move(p);
    }
    stop_ = true;
    cv_.notify_all();
  }

  void abort() {
    std::lock_guard lock(mu_);
    stop_ = true;
    cv_.notify_all();
  }

  void mark_stuck() { stuck_.store(true); }
  std::uint64_t next_node() { return ++nodes_; }

  bool found() const { return found_; }
  bool stuck() const { return stuck_.load(); }
  std::uint64_t nodes() const { return nodes_.load(); }
  std::vector<double> counterexample() const { return counterexample_; }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<BoundsBox> stack_;
  int active_ = 0;
  bool stop_ = false;
  bool found_ = false;
  std::vector<double> counterexample_;
  std::atomic<bool> stuck_{false};
  std::atomic<std::uint64_t> nodes_{0};
};

}  // namespace

Verdict verify(const Network& net, const GroundedSpec& spec, const VerifierConfig& cfg) {
  validate(cfg);
  validate(spec);
  if (spec.dim() != net.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "spec has " + std::to_string(spec.dim()) +
                                                  " coordinates, network expects " +
                                                  std::to_string(net.input_dim()));
  }
  if (net.output_dim() < 2 || spec.target_class >= net.output_dim()) {
    throw Error(ErrorCode::InvalidArgument, "target class " + std::to_string(spec.target_class) +
                                                " incompatible with network output dim " +
                                                std::to_string(net.output_dim()));
  }
  const auto t0 = std::chrono::steady_clock::now();
  SearchState state(BoundsBox{spec.input_lower, spec.input_upper});
  std::atomic<bool> exhausted{false};

  auto worker = [&] {
    BoundsBox box;
    while (state.pop(box)) {
      if (state.next_node() > cfg.max_nodes) {
        exhausted.store(true);
        state.abort();
        state.finish({});
        return;
      }
      auto res = process_node(net, box, spec.reference.values, spec.target_class, cfg);
      switch (res.outcome) {
        case NodeOutcome::Counterexample:
          state.report_counterexample(std::move(res.counterexample));
          state.finish({});
          return;
        case NodeOutcome::Split:
          state.finish({std::move(res.left), std::move(res.right)});
          break;
        case NodeOutcome::Stuck:
          state.mark_stuck();
          state.finish({});
          break;
        case NodeOutcome::Certified:
          state.finish({});
          break;
      }
    }
  };

  if (cfg.parallel_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < cfg.parallel_workers; ++i) pool.emplace_back(worker);
  }

  Verdict v;
  v.nodes_explored = std::min<std::uint64_t>(state.nodes(), cfg.max_nodes);
  if (state.found()) {
    v.status = VerdictStatus::Unsafe;
    v.counterexample = state.counterexample();
    if (!recheck_counterexample(net, spec, *v.counterexample)) {
      throw Error(ErrorCode::InvalidArgument, "internal: counterexample failed exact recheck");
    }
  } else if (exhausted.load()) {
    v.status = VerdictStatus::Unknown;
    v.reason = "max_nodes exceeded";
  } else if (state.stuck()) {
    v.status = VerdictStatus::Unknown;
    v.reason = "uncertified boxes thinner than split_tolerance";
  } else {
    v.status = VerdictStatus::Safe;
  }
  v.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return v;
}

}  // namespace semground
