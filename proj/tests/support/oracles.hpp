#pragma once

// Independent reference implementations used as test oracles. Nothing here
// calls into the library's numeric code: networks are read straight from the
// JSON file and evaluated with plain loops.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "semground/network.hpp"

namespace oracle {

inline std::filesystem::path data(const std::string& rel) {
  return std::filesystem::path(SEMGROUND_TEST_DATA) / rel;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

inline nlohmann::json load(const std::filesystem::path& p) { return nlohmann::json::parse(slurp(p)); }

struct Layer {
  std::vector<std::vector<double>> w;
  std::vector<double> b;
  bool relu = false;
};

struct Net {
  std::vector<Layer> layers;
  std::size_t outputs() const { return layers.back().b.size(); }
};

inline Net net_from_json(const nlohmann::json& j) {
  Net n;
  for (const auto& l : j.at("layers")) {
    n.layers.push_back({l.at("weights").get<std::vector<std::vector<double>>>(),
                        l.at("bias").get<std::vector<double>>(), l.at("activation") == "relu"});
  }
  return n;
}

inline Net load_net(const std::string& rel) { return net_from_json(load(data(rel))); }

/// Copies a library network into the oracle representation (weights only).
inline Net from_library(const semground::Network& net) {
  Net n;
  for (const auto& l : net.layers()) {
    Layer o;
    o.w.assign(l.out, std::vector<double>(l.in));
    for (std::size_t r = 0; r < l.out; ++r)
      for (std::size_t c = 0; c < l.in; ++c) o.w[r][c] = l.weights[r * l.in + c];
    o.b = l.bias;
    o.relu = l.activation == semground::Activation::Relu;
    n.layers.push_back(std::move(o));
  }
  return n;
}

inline std::vector<double> apply_layer(const Layer& l, const std::vector<double>& x) {
  std::vector<double> y(l.b);
  for (std::size_t r = 0; r < y.size(); ++r) {
    for (std::size_t c = 0; c < x.size(); ++c) y[r] += l.w[r][c] * x[c];
    if (l.relu && y[r] < 0.0) y[r] = 0.0;
  }
  return y;
}

inline std::vector<double> forward(const Net& n, std::vector<double> x) {
  for (const auto& l : n.layers) x = apply_layer(l, x);
  return x;
}

inline double margin(const std::vector<double>& y, std::size_t target) {
  double m = -INFINITY;
  for (std::size_t j = 0; j < y.size(); ++j)
    if (j != target) m = std::max(m, y[j] - y[target]);
  return m;
}

inline std::size_t argmax(const std::vector<double>& y) {
  return static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
}

/// Grid points from lo to hi inclusive with spacing at most `res`.
inline std::vector<double> axis(double lo, double hi, double res) {
  if (hi <= lo) return {lo};
  const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / res - 1e-9));
  std::vector<double> v(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps);
  v.back() = hi;
  return v;
}

struct GridResult {
  bool violated = false;  // some grid point has margin > 0
  std::vector<double> witness;
  std::size_t points = 0;
};

/// Exhaustive grid over the coordinates where lower < upper (at most two);
/// every other coordinate is pinned. The first layer is updated incrementally
/// so wide inputs stay cheap.
inline GridResult grid_search(const Net& n, const std::vector<double>& lower, const std::vector<double>& upper,
                              std::size_t target, double res = 1e-3) {
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (lower[i] < upper[i]) free.push_back(i);
  if (free.size() > 2) throw std::invalid_argument("grid oracle handles at most two free coordinates");

  std::vector<double> base = lower;
  for (auto i : free) base[i] = 0.0;
  const Layer& first = n.layers.front();
  std::vector<double> pre(first.b);
  for (std::size_t r = 0; r < pre.size(); ++r)
    for (std::size_t c = 0; c < base.size(); ++c) pre[r] += first.w[r][c] * base[c];

  const auto ax0 = free.size() > 0 ? axis(lower[free[0]], upper[free[0]], res) : std::vector<double>{0.0};
  const auto ax1 = free.size() > 1 ? axis(lower[free[1]], upper[free[1]], res) : std::vector<double>{0.0};
  GridResult out;
  std::vector<double> h(pre.size());
  for (double a : ax0) {
    for (double b : ax1) {
      for (std::size_t r = 0; r < pre.size(); ++r) {
        double v = pre[r];
        if (free.size() > 0) v += first.w[r][free[0]] * a;
        if (free.size() > 1) v += first.w[r][free[1]] * b;
        h[r] = first.relu && v < 0.0 ? 0.0 : v;
      }
      std::vector<double> y = h;
      for (std::size_t k = 1; k < n.layers.size(); ++k) y = apply_layer(n.layers[k], y);
      ++out.points;
      if (!out.violated && margin(y, target) > 0.0) {
        out.violated = true;
        out.witness = lower;
        if (free.size() > 0) out.witness[free[0]] = a;
        if (free.size() > 1) out.witness[free[1]] = b;
      }
    }
  }
  return out;
}

/// Random dense ReLU network with a linear output layer.
inline semground::Network random_network(std::mt19937_64& rng, std::size_t in, std::size_t out,
                                         std::size_t hidden_layers, std::size_t max_width) {
  std::uniform_int_distribution<std::size_t> width(2, max_width);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<semground::DenseLayer> layers;
  std::size_t prev = in;
  for (std::size_t k = 0; k <= hidden_layers; ++k) {
    const bool last = k == hidden_layers;
    semground::DenseLayer l;
    l.in = prev;
    l.out = last ? out : width(rng);
    l.activation = last ? semground::Activation::None : semground::Activation::Relu;
    l.weights.resize(l.in * l.out);
    l.bias.resize(l.out);
    for (auto& w : l.weights) w = g(rng);
    for (auto& b : l.bias) b = 0.5 * g(rng);
    prev = l.out;
    layers.push_back(std::move(l));
  }
  return semground::Network(std::move(layers));
}

// ---- VNN-LIB evaluator -------------------------------------------------

struct Sexp {
  std::string atom;
  std::vector<Sexp> list;
  bool is_list = false;
};

inline std::vector<Sexp> read_sexps(const std::string& text) {
  std::vector<std::string> toks;
  for (std::size_t i = 0; i < text.size();) {
    const char ch = text[i];
    if (ch == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
    } else if (ch == '(' || ch == ')') {
      toks.emplace_back(1, ch);
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' &&
             text[j] != ')')
        ++j;
      toks.push_back(text.substr(i, j - i));
      i = j;
    }
  }
  std::size_t pos = 0;
  auto parse = [&](auto&& self) -> Sexp {
    if (pos >= toks.size()) throw std::runtime_error("unexpected end of query");
    Sexp s;
    if (toks[pos] == "(") {
      s.is_list = true;
      ++pos;
      while (pos < toks.size() && toks[pos] != ")") s.list.push_back(self(self));
      if (pos >= toks.size()) throw std::runtime_error("unbalanced parentheses");
      ++pos;
    } else if (toks[pos] == ")") {
      throw std::runtime_error("stray ')'");
    } else {
      s.atom = toks[pos++];
    }
    return s;
  };
  std::vector<Sexp> out;
  while (pos < toks.size()) out.push_back(parse(parse));
  return out;
}

/// Declared variables plus asserted formulas, evaluated against X and Y values.
class VnnQuery {
 public:
  explicit VnnQuery(const std::string& text) {
    for (auto& s : read_sexps(text)) {
      if (!s.is_list || s.list.empty()) throw std::runtime_error("top-level atom");
      const auto& head = s.list[0].atom;
      if (head == "declare-const") {
        if (s.list.size() != 3 || s.list[2].atom != "Real") throw std::runtime_error("bad declaration");
        declared.push_back(s.list[1].atom);
      } else if (head == "assert") {
        if (s.list.size() != 2) throw std::runtime_error("bad assert");
        asserts.push_back(s.list[1]);
      } else {
        throw std::runtime_error("unknown command " + head);
      }
    }
  }

  std::vector<std::string> declared;
  std::vector<Sexp> asserts;

  bool holds(const Sexp& f, const std::map<std::string, double>& env) const {
    if (!f.is_list) throw std::runtime_error("formula expected");
    const auto& op = f.list.at(0).atom;
    if (op == "and" || op == "or") {
      bool acc = op == "and";
      for (std::size_t k = 1; k < f.list.size(); ++k) {
        const bool v = holds(f.list[k], env);
        acc = op == "and" ? (acc && v) : (acc || v);
      }
      return acc;
    }
    if (f.list.size() != 3) throw std::runtime_error("binary comparison expected");
    const double a = term(f.list[1], env), b = term(f.list[2], env);
    if (op == ">=") return a >= b;
    if (op == "<=") return a <= b;
    if (op == ">") return a > b;
    if (op == "<") return a < b;
    throw std::runtime_error("unknown operator " + op);
  }

  /// Asserts mentioning only X variables.
  bool input_holds(const std::map<std::string, double>& env) const {
    for (const auto& a : asserts)
      if (only_inputs(a) && !holds(a, env)) return false;
    return true;
  }

  /// Asserts mentioning some Y variable.
  bool output_holds(const std::map<std::string, double>& env) const {
    for (const auto& a : asserts)
      if (!only_inputs(a) && !holds(a, env)) return false;
    return true;
  }

 private:
  static bool only_inputs(const Sexp& f) {
    if (!f.is_list) return f.atom.rfind("Y_", 0) != 0;
    return std::all_of(f.list.begin(), f.list.end(), only_inputs);
  }

  static double term(const Sexp& t, const std::map<std::string, double>& env) {
    if (t.is_list) throw std::runtime_error("nested term");
    if (auto it = env.find(t.atom); it != env.end()) return it->second;
    std::size_t used = 0;
    const double v = std::stod(t.atom, &used);
    if (used != t.atom.size()) throw std::runtime_error("bad literal " + t.atom);
    return v;
  }
};

inline std::map<std::string, double> assignment(const std::vector<double>& x, const std::vector<double>& y) {
  std::map<std::string, double> env;
  for (std::size_t i = 0; i < x.size(); ++i) env["X_" + std::to_string(i)] = x[i];
  for (std::size_t j = 0; j < y.size(); ++j) env["Y_" + std::to_string(j)] = y[j];
  return env;
}

}  // namespace oracle
