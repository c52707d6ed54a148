#include "hyperex/exact.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <tuple>

#include "hyperex/errors.hpp"

namespace hyperex {

namespace {

using Triplet = Eigen::Triplet<double>;

// One-walker rates: rw(u, v) = sum over edges of P(sigma(u) = v), u != v.
Eigen::MatrixXd walker_rates(const Model& m) {
  const std::size_t n = m.num_vertices();
  Eigen::MatrixXd rw = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t e = 0; e < m.num_edges(); ++e)
    for (const auto& [sigma, p] : edge_support(m, e))
      for (Vertex u : m.graph.edge(e))
        if (sigma(u) != u) rw(u, sigma(u)) += p;
  return rw;
}

SparseRates assemble(std::size_t size, std::vector<Triplet>& off, double& max_exit) {
  std::vector<double> exit(size, 0.0);
  for (const auto& t : off) exit[t.row()] += t.value();
  max_exit = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    off.emplace_back(i, i, -exit[i]);
    max_exit = std::max(max_exit, exit[i]);
  }
  SparseRates q(size, size);
  q.setFromTriplets(off.begin(), off.end());
  q.makeCompressed();
  return q;
}

void check_dense(std::size_t states) {
  if (states > kDenseStateCap)
    throw StateCapExceeded("dense transition matrices are limited to " +
                               std::to_string(kDenseStateCap) + " states, this chain has " +
                               std::to_string(states),
                           states, kDenseStateCap);
}

std::string chain_name(StateKind kind, std::size_t k) {
  return kind == StateKind::rw ? std::string("rw") : to_string(kind) + "(" + std::to_string(k) + ")";
}

}  // namespace

Generator build_generator(StateKind kind, const Model& m, std::size_t k, std::size_t cap) {
  const std::size_t n = m.num_vertices();
  if (kind == StateKind::rw) k = 1;
  Generator g;
  g.kind = kind;
  g.k = k;
  auto space = std::make_shared<StateSpace>(kind, n, k, cap);
  const std::size_t size = space->size();
  std::vector<Triplet> off;

  if (kind == StateKind::rw || kind == StateKind::rwk) {
    const Eigen::MatrixXd rw = walker_rates(m);
    std::vector<Vertex> buf(k);
    for (std::size_t s = 0; s < size; ++s) {
      const auto st = space->state(s);
      for (std::size_t i = 0; i < k; ++i) {
        for (Vertex v = 0; v < n; ++v) {
          const double r = rw(st[i], v);
          if (r <= 0.0) continue;
          buf.assign(st.begin(), st.end());
          buf[i] = v;
          off.emplace_back(s, space->index(buf), r);
        }
      }
    }
  } else {
    std::vector<std::vector<std::pair<Permutation, double>>> support(m.num_edges());
    for (std::size_t e = 0; e < m.num_edges(); ++e) support[e] = edge_support(m, e);
    std::vector<Vertex> buf(k);
    for (std::size_t s = 0; s < size; ++s) {
      const auto st = space->state(s);
      for (std::size_t e = 0; e < m.num_edges(); ++e) {
        const bool touches = std::any_of(st.begin(), st.end(),
                                         [&](Vertex v) { return m.graph.contains(e, v); });
        if (!touches) continue;
        for (const auto& [sigma, p] : support[e]) {
          for (std::size_t i = 0; i < k; ++i) buf[i] = sigma(st[i]);
          if (kind == StateKind::ex) std::sort(buf.begin(), buf.end());
          if (std::equal(buf.begin(), buf.end(), st.begin())) continue;
          off.emplace_back(s, space->index(buf), p);
        }
      }
    }
  }
  g.q = assemble(size, off, g.max_exit_rate);
  g.space = std::move(space);
  return g;
}

double asymmetry(const Generator& g) {
  const Eigen::SparseMatrix<double> t = g.q.transpose();
  const Eigen::SparseMatrix<double> d = g.q - t;
  double worst = 0.0;
  for (int c = 0; c < d.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(d, c); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

double max_row_sum(const Generator& g) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.q.cols());
  const Eigen::VectorXd rows = g.q * ones;
  return rows.size() ? rows.cwiseAbs().maxCoeff() : 0.0;
}

bool connected(const Generator& g) {
  const std::size_t size = g.size();
  if (size <= 1) return true;
  // Rates are symmetric, so column adjacency is enough.
  std::vector<bool> seen(size, false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const auto s = static_cast<int>(queue.front());
    queue.pop_front();
    for (SparseRates::InnerIterator it(g.q, s); it; ++it) {
      const auto r = static_cast<std::size_t>(it.row());
      if (it.value() > 0.0 && !seen[r]) {
        seen[r] = true;
        ++reached;
        queue.push_back(r);
      }
    }
  }
  return reached == size;
}

// ---------------------------------------------------------------------------
// Uniformization

Propagator::Propagator(const SparseRates& q, double max_exit_rate)
    : lambda_(max_exit_rate > 0.0 ? max_exit_rate : 1.0) {
  SparseRates id(q.rows(), q.cols());
  id.setIdentity();
  p_ = id + q / lambda_;
  p_.makeCompressed();
}

void Propagator::advance(Eigen::MatrixXd& y, double dt) const {
  if (dt < 0.0) throw InvalidInput("cannot propagate backwards in time");
  if (dt == 0.0) return;
  const auto chunks = static_cast<std::size_t>(std::ceil(lambda_ * dt / 20.0));
  const double a = lambda_ * dt / static_cast<double>(chunks);
  Eigen::MatrixXd term, acc;
  for (std::size_t c = 0; c < chunks; ++c) {
    double w = std::exp(-a);
    acc = w * y;
    term = y;
    for (std::size_t j = 1; j < 10000; ++j) {
      term = term * p_;
      w *= a / static_cast<double>(j);
      acc += w * term;
      // Past the mode the remaining tail is below w / (1 - a/(j+1)).
      const double ratio = a / static_cast<double>(j + 1);
      if (ratio < 1.0 && w / (1.0 - ratio) < 1e-17) break;
    }
    y.swap(acc);
  }
}

Eigen::MatrixXd transition_probs(const Generator& g, double t) {
  if (t < 0.0) throw InvalidInput("transition_probs needs t >= 0");
  check_dense(g.size());
  Eigen::MatrixXd y = Eigen::MatrixXd::Identity(g.size(), g.size());
  Propagator(g.q, g.max_exit_rate).advance(y, t);
  return y;
}

double tv(std::span<const double> mu, std::span<const double> nu) {
  if (mu.size() != nu.size()) throw InvalidInput("tv: distributions have different lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += std::abs(mu[i] - nu[i]);
  return 0.5 * s;
}

double worst_tv_to_uniform(const Eigen::MatrixXd& p) {
  const double u = 1.0 / static_cast<double>(p.cols());
  return 0.5 * (p.array() - u).abs().rowwise().sum().maxCoeff();
}

double product_worst_tv(const Eigen::MatrixXd& p, std::size_t k) {
  const auto n = static_cast<std::size_t>(p.rows());
  if (k == 0 || n == 0) throw InvalidInput("product_worst_tv needs k >= 1 and a nonempty kernel");
  const double u = std::pow(static_cast<double>(n), -static_cast<double>(k));
  std::vector<std::size_t> start(k, 0);
  double worst = 0.0;

  // Sum over y in V^k of |prod_i p(x_i, y_i) - u|, depth-first with prefix products.
  std::vector<double> prefix(k + 1, 1.0);
  std::vector<std::size_t> y(k, 0);
  auto distance = [&] {
    double s = 0.0;
    std::size_t depth = 0;
    y.assign(k, 0);
    prefix[0] = 1.0;
    while (true) {
      prefix[depth + 1] = prefix[depth] * p(start[depth], y[depth]);
      if (depth + 1 == k) {
        s += std::abs(prefix[k] - u);
        while (depth < k && ++y[depth] == n) {
          y[depth] = 0;
          if (depth == 0) return 0.5 * s;
          --depth;
        }
      } else {
        ++depth;
      }
    }
  };

  while (true) {
    worst = std::max(worst, distance());
    // Next nondecreasing start tuple.
    std::size_t i = k;
    while (i > 0 && start[i - 1] + 1 == n) --i;
    if (i == 0) break;
    ++start[i - 1];
    for (std::size_t j = i; j < k; ++j) start[j] = start[i - 1];
  }
  return worst;
}

MixingResult mixing_time(StateKind kind, const Model& m, std::size_t k, double eps, std::size_t cap) {
  if (!(eps > 0.0)) throw InvalidInput("mixing_time needs eps > 0");
  if (kind == StateKind::rw) k = 1;
  MixingResult r;
  r.kind = kind;
  r.k = k;
  r.eps = eps;

  const bool product = kind == StateKind::rwk;
  r.method = product ? "product" : "uniformization";
  Generator g;
  if (product) {
    const std::size_t states = count_states(StateKind::rwk, m.num_vertices(), k);
    if (states > cap)
      throw StateCapExceeded(chain_name(kind, k) + " has more than " + std::to_string(cap) + " states",
                             states, cap);
    r.states = states;
    g = build_generator(StateKind::rw, m, 1, cap);
  } else {
    g = build_generator(kind, m, k, cap);
    r.states = g.size();
    check_dense(r.states);
  }
  if (!connected(g))
    throw ReducibleChain(chain_name(kind, k) +
                         " is reducible: the model's interchange process is not irreducible for every "
                         "particle count");
  if (eps >= 1.0 - 1.0 / static_cast<double>(r.states)) return r;

  const Propagator prop(g.q, g.max_exit_rate);
  auto worst = [&](const Eigen::MatrixXd& y) {
    return product ? product_worst_tv(y, k) : worst_tv_to_uniform(y);
  };

  double lo = 0.0;
  double hi = 1.0 / (g.max_exit_rate > 0.0 ? g.max_exit_rate : 1.0);
  Eigen::MatrixXd y_lo = Eigen::MatrixXd::Identity(g.size(), g.size());
  Eigen::MatrixXd y_hi = y_lo;
  prop.advance(y_hi, hi);
  while (worst(y_hi) > eps) {
    if (hi > 1e12) throw std::runtime_error("mixing_time: no bracket found below t = 1e12");
    lo = hi;
    y_lo = y_hi;
    hi *= 2.0;
    prop.advance(y_hi, hi - lo);
  }
  r.bracket_hi = hi;
  r.tolerance = 1e-6 * hi;
  while (hi - lo > r.tolerance) {
    const double mid = 0.5 * (lo + hi);
    Eigen::MatrixXd y_mid = y_lo;
    prop.advance(y_mid, mid - lo);
    if (worst(y_mid) <= eps) {
      hi = mid;
    } else {
      lo = mid;
      y_lo.swap(y_mid);
    }
  }
  r.time = hi;
  return r;
}

TvCurve tv_curve(StateKind kind, const Model& m, std::size_t k, std::vector<double> times,
                 std::size_t cap) {
  if (kind == StateKind::rw) k = 1;
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0))
    throw InvalidInput("tv_curve needs ascending nonnegative times");
  TvCurve c;
  c.kind = kind;
  c.k = k;
  c.times = std::move(times);
  const bool product = kind == StateKind::rwk;
  if (product && count_states(StateKind::rwk, m.num_vertices(), k) > cap)
    throw StateCapExceeded(chain_name(kind, k) + " exceeds the state cap",
                           count_states(StateKind::rwk, m.num_vertices(), k), cap);
  const Generator g = build_generator(product ? StateKind::rw : kind, m, k, cap);
  check_dense(g.size());
  const Propagator prop(g.q, g.max_exit_rate);
  Eigen::MatrixXd y = Eigen::MatrixXd::Identity(g.size(), g.size());
  double now = 0.0;
  for (double t : c.times) {
    prop.advance(y, t - now);
    now = t;
    c.worst_tv.push_back(product ? product_worst_tv(y, k) : worst_tv_to_uniform(y));
  }
  return c;
}

std::vector<double> meeting_survival(const Model& m, std::array<Vertex, 2> y,
                                     std::span<const double> times) {
  const std::size_t n = m.num_vertices();
  for (Vertex v : y)
    if (v >= n) throw InvalidInput("meeting_survival: unknown vertex");
  // Per-edge one-walker kernels.
  std::vector<Eigen::MatrixXd> moves(m.num_edges(), Eigen::MatrixXd::Zero(n, n));
  for (std::size_t e = 0; e < m.num_edges(); ++e)
    for (const auto& [sigma, p] : edge_support(m, e))
      for (Vertex u : m.graph.edge(e))
        if (sigma(u) != u) moves[e](u, sigma(u)) += p;

  const std::size_t size = n * n;
  std::vector<Triplet> off;
  std::vector<double> exit(size, 0.0);
  for (Vertex a = 0; a < n; ++a) {
    for (Vertex b = 0; b < n; ++b) {
      const std::size_t s = a * n + b;
      for (std::size_t e = 0; e < m.num_edges(); ++e) {
        const bool has_a = m.graph.contains(e, a);
        const bool has_b = m.graph.contains(e, b);
        if (has_a && has_b) {
          exit[s] += 2.0;  // either walker's clock rings this edge
          continue;
        }
        for (Vertex v = 0; v < n; ++v) {
          if (has_a && moves[e](a, v) > 0.0) {
            off.emplace_back(s, v * n + b, moves[e](a, v));
            exit[s] += moves[e](a, v);
          }
          if (has_b && moves[e](b, v) > 0.0) {
            off.emplace_back(s, a * n + v, moves[e](b, v));
            exit[s] += moves[e](b, v);
          }
        }
      }
    }
  }
  double lambda = 0.0;
  for (std::size_t s = 0; s < size; ++s) {
    off.emplace_back(s, s, -exit[s]);
    lambda = std::max(lambda, exit[s]);
  }
  SparseRates q(size, size);
  q.setFromTriplets(off.begin(), off.end());
  const Propagator prop(q, lambda);

  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return times[i] < times[j]; });
  Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, size);
  row(0, y[0] * n + y[1]) = 1.0;
  std::vector<double> out(times.size(), 0.0);
  double now = 0.0;
  for (std::size_t i : order) {
    if (times[i] < 0.0) throw InvalidInput("meeting_survival needs t >= 0");
    prop.advance(row, times[i] - now);
    now = times[i];
    out[i] = row.sum();
  }
  return out;
}

Eigen::VectorXd ip_endpoint_law(const Model& m, std::span<const Vertex> x, double t,
                                std::size_t cap) {
  const Generator g = build_generator(StateKind::ip, m, x.size(), cap);
  Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, g.size());
  row(0, g.space->index(x)) = 1.0;
  Propagator(g.q, g.max_exit_rate).advance(row, t);
  return row.transpose();
}

// ---------------------------------------------------------------------------
// Relations

bool RelationsReport::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.skipped || r.ok; });
}

std::size_t RelationsReport::checked() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.skipped; }));
}

RelationsReport check_relations(const Model& m, const RelationsConfig& cfg) {
  const std::size_t n = m.num_vertices();
  std::vector<std::size_t> ks = cfg.ks;
  if (ks.empty())
    for (std::size_t k = 1; k + 1 <= n; ++k) ks.push_back(k);

  std::map<std::tuple<StateKind, std::size_t, double>, std::optional<MixingResult>> cache;
  std::map<std::tuple<StateKind, std::size_t, double>, std::string> why;
  auto T = [&](StateKind kind, std::size_t k, double eps) -> const std::optional<MixingResult>& {
    if (kind == StateKind::rw) k = 1;
    const auto key = std::make_tuple(kind, k, eps);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::optional<MixingResult> r;
    try {
      r = mixing_time(kind, m, k, eps, cfg.cap);
    } catch (const StateCapExceeded& e) {
      why[key] = e.what();
    }
    return cache.emplace(key, std::move(r)).first->second;
  };

  RelationsReport rep;
  auto inequality = [&](std::string rel, std::string detail, const std::optional<MixingResult>& a,
                        double factor, const std::optional<MixingResult>& b) {
    RelationRow row;
    row.relation = std::move(rel);
    row.detail = std::move(detail);
    if (!a || !b) {
      row.skipped = true;
      row.note = "state cap";
    } else {
      row.lhs = a->time;
      row.rhs = factor * b->time;
      row.slack = row.rhs - row.lhs;
      row.tolerance = a->tolerance + factor * b->tolerance + 1e-12;
      row.ok = row.slack >= -row.tolerance;
    }
    rep.rows.push_back(std::move(row));
  };
  auto eps_str = [](double e) {
    std::string s = std::to_string(e);
    s.erase(s.find_last_not_of('0') + 1);
    if (s.back() == '.') s.pop_back();
    return s;
  };

  for (double eps : cfg.eps) {
    for (std::size_t k : ks) {
      const std::string tag = "k=" + std::to_string(k) + " eps=" + eps_str(eps);
      inequality("contraction", "T_RW <= T_EX, " + tag, T(StateKind::rw, 1, eps), 1.0,
                 T(StateKind::ex, k, eps));
      inequality("contraction", "T_EX <= T_IP, " + tag, T(StateKind::ex, k, eps), 1.0,
                 T(StateKind::ip, k, eps));
    }
  }

  // T(eps2) <= ceil(log eps2 / log 2 eps1) T(eps1) for each chain.
  std::vector<std::pair<StateKind, std::size_t>> chains{{StateKind::rw, 1}};
  for (std::size_t k : ks) {
    if (k > 1) chains.emplace_back(StateKind::ex, k);
    chains.emplace_back(StateKind::ip, k);
  }
  for (const auto& [kind, k] : chains) {
    for (double e1 : cfg.eps) {
      for (double e2 : cfg.eps) {
        if (!(e1 > 0.0 && e1 < 0.5 && e2 > 0.0 && e2 < 0.5)) continue;
        const double factor = std::ceil(std::log(e2) / std::log(2.0 * e1));
        inequality("submultiplicative",
                   chain_name(kind, k) + " eps1=" + eps_str(e1) + " eps2=" + eps_str(e2),
                   T(kind, k, e2), factor, T(kind, k, e1));
      }
    }
  }

  // Independent walkers: T_RW(2^m)(2^-n) <= (n + m) T_RW(1/4).
  for (std::size_t mm = 0; mm <= 2; ++mm) {
    for (int nn = 1; nn <= 3; ++nn) {
      const std::size_t walkers = std::size_t{1} << mm;
      const auto kind = walkers == 1 ? StateKind::rw : StateKind::rwk;
      inequality("rw-powers",
                 "walkers=" + std::to_string(walkers) + " eps=2^-" + std::to_string(nn),
                 T(kind, walkers, std::ldexp(1.0, -nn)), static_cast<double>(nn + mm),
                 T(StateKind::rw, 1, 0.25));
    }
  }

  // Product bound for two independent walkers.
  {
    const Generator g = build_generator(StateKind::rw, m, 1, cfg.cap);
    std::vector<double> probe{0.5};
    if (const auto& t = T(StateKind::rw, 1, 0.25)) probe.push_back(t->time);
    for (double t : probe) {
      const Eigen::MatrixXd p = transition_probs(g, t);
      const double u = 1.0 / static_cast<double>(n);
      RelationRow row;
      row.relation = "product-tv";
      row.detail = "two walkers, t=" + eps_str(t) + ", worst start pair";
      row.slack = std::numeric_limits<double>::infinity();
      row.tolerance = 1e-12;
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          double joint = 0.0;
          for (std::size_t c = 0; c < n; ++c)
            for (std::size_t d = 0; d < n; ++d) joint += std::abs(p(a, c) * p(b, d) - u * u);
          joint *= 0.5;
          const double ta = 0.5 * (p.row(a).array() - u).abs().sum();
          const double tb = 0.5 * (p.row(b).array() - u).abs().sum();
          if (ta + tb - joint < row.slack) {
            row.lhs = joint;
            row.rhs = ta + tb;
            row.slack = ta + tb - joint;
          }
        }
      }
      row.ok = row.slack >= -row.tolerance;
      rep.rows.push_back(std::move(row));
    }
  }

  // EX(k) and EX(|V|-k) are the same chain up to complementation.
  for (double eps : cfg.eps) {
    for (std::size_t k : ks) {
      if (2 * k >= n) continue;
      const auto& a = T(StateKind::ex, k, eps);
      const auto& b = T(StateKind::ex, n - k, eps);
      RelationRow row;
      row.relation = "ex-complement";
      row.detail = "k=" + std::to_string(k) + " vs " + std::to_string(n - k) + " eps=" + eps_str(eps);
      if (!a || !b) {
        row.skipped = true;
        row.note = "state cap";
      } else {
        row.lhs = a->time;
        row.rhs = b->time;
        row.slack = -std::abs(a->time - b->time);
        row.tolerance = a->tolerance + b->tolerance + 1e-12;
        row.ok = -row.slack <= row.tolerance;
      }
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Fixed experiments

namespace {

Model single_edge(std::size_t n, std::vector<std::pair<std::string, double>> weights) {
  std::vector<long long> labels(n);
  std::iota(labels.begin(), labels.end(), 1);
  Hypergraph g(labels, {labels});
  std::vector<std::pair<CycleType, double>> w;
  for (auto& [type, p] : weights) w.emplace_back(CycleType::parse(type), p);
  return Model(std::move(g), {EdgeMeasure(n, std::move(w))});
}

void check_delta(double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidInput("delta must lie in [0, 1]");
}

}  // namespace

Model square_model(double delta) {
  check_delta(delta);
  return single_edge(4, {{"2+2", 1.0 - delta}, {"4", delta}});
}

Model triangle_model(double delta) {
  check_delta(delta);
  return single_edge(3, {{"3", 1.0 - delta}, {"2", delta}});
}

Model four_cycle_model() { return single_edge(4, {{"4", 1.0}}); }

std::vector<NegCorrRow> neg_corr_experiment(std::span<const double> times) {
  const Model m = four_cycle_model();
  const Generator rw = build_generator(StateKind::rw, m, 1);
  const Generator ex = build_generator(StateKind::ex, m, 2);
  const std::array<Vertex, 2> start{0, 1};
  const std::array<Vertex, 2> target{2, 3};
  const std::size_t from = ex.space->index(start);
  const std::size_t to = ex.space->index(target);

  std::vector<NegCorrRow> rows;
  for (double t : times) {
    NegCorrRow r;
    r.t = t;
    const Eigen::MatrixXd p = transition_probs(rw, t);
    const double pu = p(0, 2) + p(0, 3);
    const double pv = p(1, 2) + p(1, 3);
    r.walker_in_b = pu;
    r.product = pu * pv;
    r.product_bound = std::pow(1.0 - std::exp(-t), 2);
    r.exclusion = transition_probs(ex, t)(from, to);
    r.exclusion_bound = t * std::exp(-t) / 3.0;
    r.bounds_ok = r.product <= r.product_bound + 1e-15 && r.exclusion >= r.exclusion_bound - 1e-15;
    r.strict = r.product < r.exclusion;
    rows.push_back(r);
  }
  return rows;
}

std::vector<DeltaRow> delta_ratio_experiments(std::span<const double> deltas) {
  std::vector<DeltaRow> rows;
  for (double d : deltas) {
    DeltaRow r;
    r.delta = d;
    try {
      const Model sq = square_model(d);
      r.ex2_over_ex1 = mixing_time(StateKind::ex, sq, 2, 0.25).time /
                       mixing_time(StateKind::ex, sq, 1, 0.25).time;
    } catch (const ReducibleChain& e) {
      r.square_error = e.what();
    }
    try {
      const Model tri = triangle_model(d);
      r.ip2_over_ex2 = mixing_time(StateKind::ip, tri, 2, 0.25).time /
                       mixing_time(StateKind::ex, tri, 2, 0.25).time;
    } catch (const ReducibleChain& e) {
      r.triangle_error = e.what();
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

bool delta_ratios_monotone(const std::vector<DeltaRow>& rows) {
  std::vector<const DeltaRow*> sorted;
  for (const auto& r : rows) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a->delta > b->delta; });
  auto increasing = [&](auto field) {
    std::optional<double> prev;
    for (const DeltaRow* r : sorted) {
      const auto& v = r->*field;
      if (!v) continue;
      if (prev && !(*v > *prev)) return false;
      prev = v;
    }
    return true;
  };
  return increasing(&DeltaRow::ex2_over_ex1) && increasing(&DeltaRow::ip2_over_ex2);
}

}  // namespace hyperex
