#include "hyperex/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hyperex/errors.hpp"
#include "hyperex/exact.hpp"

namespace hyperex {

// ---------------------------------------------------------------------------
// Event streams

EventSource::EventSource(const Model& m, std::uint64_t seed, std::uint64_t stream_id, bool lazy)
    : EventSource(m, make_stream(seed, stream_id), lazy) {}

EventSource::EventSource(const Model& m, Rng rng, bool lazy)
    : model_(&m), rng_(std::move(rng)), lazy_(lazy) {
  if (m.num_edges() == 0) throw InvalidInput("model has no edges");
  rate_ = static_cast<double>(m.num_edges()) * (lazy ? 2.0 : 1.0);
  current_.sigma = Permutation(m.num_vertices());
  current_.time = 0.0;
  current_.edge = 0;
}

const Event& EventSource::next() {
  // Restore the identity on the previous edge before sampling the next one.
  auto& img = current_.sigma.raw();
  for (Vertex v : model_->graph.edge(current_.edge)) img[v] = v;

  current_.time += exponential(rng_, rate_);
  current_.edge = static_cast<std::size_t>(uniform_index(rng_, model_->num_edges()));
  const auto& measure = model_->measures[current_.edge];
  const auto& type = measure.weights()[measure.sample_type(rng_)].first;
  sample_class_into(type, model_->graph.edge(current_.edge), rng_, current_.sigma, scratch_);
  current_.theta = lazy_ ? fair_coin(rng_) : true;
  return current_;
}

EventStream gen_events(const Model& m, double horizon, bool lazy, std::uint64_t seed,
                       std::uint64_t stream_id) {
  if (!(horizon >= 0.0)) throw InvalidInput("horizon must be >= 0");
  EventStream s;
  s.descriptor = {seed, stream_id, horizon, lazy};
  s.num_vertices = m.num_vertices();
  EventSource src(m, seed, stream_id, lazy);
  while (true) {
    const Event& ev = src.next();
    if (ev.time > horizon) break;
    s.events.push_back(ev);
  }
  return s;
}

EventStream gen_events(const Model& m, double horizon, bool lazy, Rng& rng) {
  return gen_events(m, horizon, lazy, rng(), 0);
}

EventStream replay(const Model& m, const StreamDescriptor& d) {
  return gen_events(m, d.horizon, d.lazy, d.seed, d.stream_id);
}

IntervalMap interval_map(const EventStream& stream, double s, double t) {
  if (!(0.0 <= s && s <= t && t <= stream.horizon()))
    throw InvalidInput("interval_map needs 0 <= s <= t <= horizon");
  IntervalMap out{s, t, Permutation(stream.num_vertices)};
  auto& img = out.perm.raw();
  // Events are sorted by time; find the first one after s.
  auto it = std::upper_bound(stream.events.begin(), stream.events.end(), s,
                             [](double x, const Event& e) { return x < e.time; });
  for (; it != stream.events.end() && it->time <= t; ++it) {
    if (!it->theta) continue;
    for (auto& y : img) y = it->sigma(y);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trajectories

const std::vector<Vertex>& Trajectory::at(double t) const {
  if (points.empty()) throw InvalidInput("empty trajectory");
  auto it = std::upper_bound(points.begin(), points.end(), t,
                             [](double x, const TrajectoryPoint& p) { return x < p.time; });
  if (it == points.begin()) return points.front().state;
  return std::prev(it)->state;
}

namespace {

void check_init(StateKind kind, std::span<const Vertex> init, std::size_t n) {
  if (init.empty()) throw InvalidInput("initial state is empty");
  for (Vertex v : init)
    if (v >= n) throw InvalidInput("initial state names an unknown vertex");
  if (kind == StateKind::rw && init.size() != 1) throw InvalidInput("rw starts from one vertex");
  if (kind == StateKind::ex || kind == StateKind::ip) {
    std::vector<Vertex> s(init.begin(), init.end());
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw InvalidInput(to_string(kind) + " initial state must have distinct vertices");
  }
}

}  // namespace

Trajectory evolve(StateKind kind, std::span<const Vertex> init, const EventStream& stream) {
  if (kind == StateKind::rwk) throw InvalidInput("use evolve_rwk for independent walkers");
  check_init(kind, init, stream.num_vertices);
  Trajectory tr;
  tr.kind = kind;
  std::vector<Vertex> state(init.begin(), init.end());
  if (kind == StateKind::ex) std::sort(state.begin(), state.end());
  tr.points.reserve(stream.events.size() + 1);
  tr.points.push_back({0.0, state});
  for (const Event& ev : stream.events) {
    if (ev.theta) {
      for (auto& v : state) v = ev.sigma(v);
      if (kind == StateKind::ex) std::sort(state.begin(), state.end());
    }
    tr.points.push_back({ev.time, state});
  }
  return tr;
}

Trajectory evolve_rwk(const Model& m, std::span<const Vertex> init, double horizon,
                      std::uint64_t seed, std::uint64_t base_stream) {
  check_init(StateKind::rwk, init, m.num_vertices());
  const std::size_t k = init.size();
  std::vector<EventSource> src;
  std::vector<Event> pending;
  for (std::size_t i = 0; i < k; ++i) {
    src.emplace_back(m, seed, base_stream + i, false);
    pending.push_back(src.back().next());
  }
  Trajectory tr;
  tr.kind = StateKind::rwk;
  std::vector<Vertex> state(init.begin(), init.end());
  tr.points.push_back({0.0, state});
  while (true) {
    std::size_t who = 0;
    for (std::size_t i = 1; i < k; ++i)
      if (pending[i].time < pending[who].time) who = i;
    if (pending[who].time > horizon) break;
    state[who] = pending[who].sigma(state[who]);
    tr.points.push_back({pending[who].time, state});
    pending[who] = src[who].next();
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Meeting times

std::optional<double> meeting_time(const Model& m, std::array<Vertex, 2> y,
                                   EventSource& first, EventSource& second, double horizon) {
  for (Vertex v : y)
    if (v >= m.num_vertices()) throw InvalidInput("meeting_time: unknown vertex");
  std::array<EventSource*, 2> src{&first, &second};
  std::array<Event, 2> pending{first.next(), second.next()};
  while (true) {
    const std::size_t who = pending[1].time < pending[0].time ? 1 : 0;
    const Event& ev = pending[who];
    if (ev.time > horizon) return std::nullopt;
    // Positions are left limits at ev.time.
    if (m.graph.contains(ev.edge, y[0]) && m.graph.contains(ev.edge, y[1])) return ev.time;
    if (ev.theta) y[who] = ev.sigma(y[who]);
    pending[who] = src[who]->next();
  }
}

std::optional<double> meeting_time(const Model& m, std::array<Vertex, 2> y, Rng& rng,
                                   double horizon) {
  const std::uint64_t seed = rng();
  EventSource a(m, seed, 0, false);
  EventSource b(m, seed, 1, false);
  return meeting_time(m, y, a, b, horizon);
}

std::optional<double> bar_meeting_time(const Model& m, std::array<Vertex, 4> x,
                                       std::span<EventSource, 4> sources, double horizon) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (x[i] >= m.num_vertices()) throw InvalidInput("bar_meeting_time: unknown vertex");
    for (std::size_t j = 0; j < i; ++j)
      if (x[i] == x[j]) throw InvalidInput("bar_meeting_time needs four distinct vertices");
  }
  std::array<Event, 4> pending;
  for (std::size_t i = 0; i < 4; ++i) pending[i] = sources[i].next();
  while (true) {
    std::size_t who = 0;
    for (std::size_t i = 1; i < 4; ++i)
      if (pending[i].time < pending[who].time) who = i;
    const Event& ev = pending[who];
    if (ev.time > horizon) return std::nullopt;
    if (m.graph.contains(ev.edge, x[who]))
      for (std::size_t j = 0; j < 4; ++j)
        if (j != who && m.graph.contains(ev.edge, x[j])) return ev.time;
    if (ev.theta) x[who] = ev.sigma(x[who]);
    pending[who] = sources[who].next();
  }
}

std::optional<double> bar_meeting_time(const Model& m, std::array<Vertex, 4> x, Rng& rng,
                                       double horizon) {
  const std::uint64_t seed = rng();
  std::array<EventSource, 4> src{EventSource(m, seed, 0, false), EventSource(m, seed, 1, false),
                                 EventSource(m, seed, 2, false), EventSource(m, seed, 3, false)};
  return bar_meeting_time(m, x, std::span<EventSource, 4>(src), horizon);
}

// ---------------------------------------------------------------------------
// Easy classification

EasyConfig EasyConfig::desk_preset() {
  EasyConfig c;
  c.c_time = 100.0;
  c.c_prob = 0.01;
  c.replicas = 2000;
  return c;
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

EasyVerdict classify_easy(const Model& m, const EasyConfig& cfg) {
  EasyVerdict out;
  out.config = cfg;
  if (cfg.t_ex2) {
    out.t_ex2 = *cfg.t_ex2;
  } else {
    try {
      out.t_ex2 = mixing_time(StateKind::ex, m, 2, 0.25).time;
    } catch (const std::exception& e) {
      throw InvalidInput(std::string("T_EX(2)(1/4) is not supplied and cannot be computed: ") +
                         e.what());
    }
  }
  out.threshold = cfg.c_time * out.t_ex2;
  const std::size_t n = m.num_vertices();
  std::uint64_t stream = 0;
  bool have_worst = false;
  for (Vertex a = 0; a < n; ++a) {
    for (Vertex b = 0; b < n; ++b) {
      PairEstimate est;
      est.y = {a, b};
      est.replicas = cfg.replicas;
      for (std::size_t r = 0; r < cfg.replicas; ++r) {
        EventSource s1(m, cfg.seed, stream++, false);
        EventSource s2(m, cfg.seed, stream++, false);
        // Meeting strictly after the threshold counts as exceeding it.
        const auto t = meeting_time(m, {a, b}, s1, s2, out.threshold);
        if (!t) ++est.exceed;
      }
      est.estimate = cfg.replicas ? static_cast<double>(est.exceed) / static_cast<double>(cfg.replicas) : 0.0;
      std::tie(est.wilson_lo, est.wilson_hi) = wilson_interval(est.exceed, est.replicas, cfg.z);
      if (!have_worst || est.wilson_hi > out.worst.wilson_hi) {
        out.worst = est;
        have_worst = true;
      }
      out.pairs.push_back(est);
    }
  }
  out.easy = out.worst.wilson_hi <= cfg.c_prob;
  return out;
}

}  // namespace hyperex
