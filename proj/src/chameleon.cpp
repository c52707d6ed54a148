#include "hyperex/chameleon.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include "hyperex/errors.hpp"
#include "hyperex/exact.hpp"
#include "hyperex/statespace.hpp"

namespace hyperex {

// ---------------------------------------------------------------------------
// State

ChameleonState ChameleonState::initial(std::size_t n, std::span<const Vertex> x) {
  if (x.empty()) throw InvalidInput("chameleon start needs at least one vertex");
  std::vector<Vertex> z(x.begin(), x.end() - 1);
  const Vertex r = x.back();
  std::vector<Vertex> white;
  std::vector<bool> used(n, false);
  for (Vertex v : x) {
    if (v >= n) throw InvalidInput("chameleon start names an unknown vertex");
    if (used[v]) throw InvalidInput("chameleon start vertices must be distinct");
    used[v] = true;
  }
  for (Vertex v = 0; v < n; ++v)
    if (!used[v]) white.push_back(v);
  const Vertex red[1] = {r};
  return from_sets(n, std::move(z), red, {}, white);
}

ChameleonState ChameleonState::from_sets(std::size_t n, std::vector<Vertex> z,
                                         std::span<const Vertex> red, std::span<const Vertex> pink,
                                         std::span<const Vertex> white) {
  ChameleonState s;
  std::vector<bool> seen(n, false);
  s.colour_.assign(n, Colour::black);
  auto claim = [&](Vertex v, Colour c) {
    if (v >= n) throw InvalidInput("vertex " + std::to_string(v) + " out of range");
    if (seen[v]) throw InvalidInput("vertex " + std::to_string(v) + " appears twice in the state");
    seen[v] = true;
    s.colour_[v] = c;
  };
  for (Vertex v : z) claim(v, Colour::black);
  for (Vertex v : red) claim(v, Colour::red);
  for (Vertex v : pink) claim(v, Colour::pink);
  for (Vertex v : white) claim(v, Colour::white);
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw InvalidInput("z, R, P and W must cover every vertex");
  s.z_ = std::move(z);
  s.red_ = red.size();
  s.pink_ = pink.size();
  s.white_ = white.size();
  return s;
}

std::vector<Vertex> ChameleonState::collect(Colour c) const {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < colour_.size(); ++v)
    if (colour_[v] == c) out.push_back(v);
  return out;
}

bool ChameleonState::partition_ok() const {
  std::size_t r = 0, p = 0, w = 0, b = 0;
  for (Colour c : colour_) {
    if (c == Colour::red) ++r;
    else if (c == Colour::pink) ++p;
    else if (c == Colour::white) ++w;
    else ++b;
  }
  if (r != red_ || p != pink_ || w != white_ || b != z_.size()) return false;
  std::vector<bool> seen(colour_.size(), false);
  for (Vertex v : z_) {
    if (v >= colour_.size() || seen[v] || colour_[v] != Colour::black) return false;
    seen[v] = true;
  }
  return true;
}

void ChameleonState::apply(const Permutation& sigma, std::span<const Vertex> moved) {
  scratch_.resize(colour_.size());
  for (Vertex v : moved) scratch_[sigma(v)] = colour_[v];
  for (Vertex v : moved) colour_[v] = scratch_[v];
  for (auto& v : z_) v = sigma(v);
}

void ChameleonState::recolour(Vertex v, Colour c) {
  auto count = [&](Colour col) -> std::size_t* {
    switch (col) {
      case Colour::red: return &red_;
      case Colour::pink: return &pink_;
      case Colour::white: return &white_;
      default: return nullptr;
    }
  };
  if (colour_[v] == Colour::black || c == Colour::black)
    throw InvalidInput("black particles cannot change colour");
  --*count(colour_[v]);
  ++*count(c);
  colour_[v] = c;
}

// ---------------------------------------------------------------------------
// L pairs

std::vector<Vertex> LSelection::all_vertices() const {
  std::vector<Vertex> out;
  for (const auto& p : pairs) out.insert(out.end(), {p.red, p.white});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Vertex> LSelection::selected_vertices() const {
  std::vector<Vertex> out;
  for (std::size_t i = 0; i < selected; ++i) out.insert(out.end(), {pairs[i].red, pairs[i].white});
  std::sort(out.begin(), out.end());
  return out;
}

ASelection LSelection::selected_a(const CyclicDecomposition& d) const {
  ASelection out;
  out.cycles.resize(d.K());
  for (std::size_t i = 0; i < selected; ++i) {
    const auto& p = pairs[i];
    if (p.block == 0) out.a0.push_back(p.index);
    else out.cycles[p.block - 1].push_back(p.index);
  }
  return out;
}

namespace {

// The pair within a window: the first pair if it holds exactly one vertex
// of the minority colour, else the second.
LPair pick(std::span<const Colour> colour, std::array<Vertex, 2> first, std::array<Vertex, 2> second,
           Colour minority, std::size_t block, std::size_t index) {
  const int hits = (colour[first[0]] == minority) + (colour[first[1]] == minority);
  const auto chosen = hits == 1 ? first : second;
  LPair p{block, index, chosen[0], chosen[1]};
  if (colour[p.red] != Colour::red) std::swap(p.red, p.white);
  return p;
}

Colour minority_of(std::span<const Colour> colour, std::span<const Vertex> window) {
  std::size_t r = 0;
  for (Vertex v : window) r += colour[v] == Colour::red;
  return r == 1 ? Colour::red : Colour::white;
}

}  // namespace

LSelection build_L(const ChameleonState& s, const Permutation& sigma, bool uncapped) {
  const auto colour = s.colours();
  const CyclicDecomposition d = decompose(sigma);
  LSelection out;
  out.a = build_A(colour, sigma);

  for (std::size_t j : out.a.a0) {
    const Vertex a1 = d.rho0[2 * j - 2].lo, a2 = d.rho0[2 * j - 2].hi;
    const Vertex a3 = d.rho0[2 * j - 1].lo, a4 = d.rho0[2 * j - 1].hi;
    if (!(a3 < a2)) continue;
    const Vertex win[4] = {a1, a2, a3, a4};
    out.pairs.push_back(pick(colour, {a1, a3}, {a2, a4}, minority_of(colour, win), 0, j));
  }
  for (std::size_t i = 0; i < d.K(); ++i) {
    const auto& e = d.cycles[i].elems;
    const std::size_t len = e.size();
    for (std::size_t j : out.a.cycles[i]) {
      if (len == 3) {
        const Colour minority = minority_of(colour, e);
        std::size_t at = 0;
        while (colour[e[at]] != minority) ++at;
        LPair p{i + 1, 0, e[at], e[(at + 1) % 3]};
        if (colour[p.red] != Colour::red) std::swap(p.red, p.white);
        out.pairs.push_back(p);
        continue;
      }
      const std::size_t q = quarter(len);
      std::vector<Vertex> win;
      for (std::size_t x : cycle_window(len, j)) win.push_back(e[x]);
      out.pairs.push_back(pick(colour, {e[2 * j - 2], e[2 * q + 2 * j - 2]},
                               {e[2 * j - 1], e[2 * q + 2 * j - 1]}, minority_of(colour, win),
                               i + 1, j));
    }
  }

  const std::size_t lo = std::min(s.num_red(), s.num_white());
  out.cap = lo > s.num_pink() ? (lo - s.num_pink()) / 3 : 0;
  out.selected = uncapped ? out.pairs.size() : std::min(out.cap, out.pairs.size());
  return out;
}

// ---------------------------------------------------------------------------
// Steps

Phase phase_at(double t, double phase_length) {
  if (!(phase_length > 0.0)) throw InvalidInput("phase length must be positive");
  if (!(t > 0.0)) throw InvalidInput("phase_at needs t > 0");
  const double q = std::ceil(t / phase_length);
  return std::fmod(q, 2.0) == 1.0 ? Phase::constant_colour : Phase::colour_changing;
}

StepResult cham_step(ChameleonState& s, const Event& ev, std::span<const Vertex> edge, Phase phase,
                     bool modified) {
  StepResult res;
  if (phase == Phase::colour_changing && !ev.sigma.is_identity()) {
    const bool gate =
        modified || s.num_pink() < std::min(s.num_red(), s.num_white());
    if (gate && edge.size() > 2 && ev.theta) {
      const LSelection l = build_L(s, ev.sigma, modified);
      for (std::size_t i = 0; i < l.selected; ++i)
        if (s.colour(l.pairs[i].red) != Colour::red || s.colour(l.pairs[i].white) != Colour::white)
          res.pairs_mixed = false;
      for (std::size_t i = 0; i < l.selected; ++i) {
        s.recolour(l.pairs[i].red, Colour::pink);
        s.recolour(l.pairs[i].white, Colour::pink);
        res.pinkened.push_back(l.pairs[i]);
      }
      if (l.selected) res.kind = StepKind::pinken_hyperedge;
      s.apply(ev.sigma, edge);
      return res;
    }
    if (gate && edge.size() == 2) {
      const Colour c0 = s.colour(edge[0]);
      const Colour c1 = s.colour(edge[1]);
      if ((c0 == Colour::red && c1 == Colour::white) || (c0 == Colour::white && c1 == Colour::red)) {
        const Vertex r = c0 == Colour::red ? edge[0] : edge[1];
        const Vertex w = c0 == Colour::red ? edge[1] : edge[0];
        s.recolour(r, Colour::pink);
        s.recolour(w, Colour::pink);
        res.kind = StepKind::pinken_pair;
        res.pinkened.push_back({0, 0, r, w});
        return res;  // no movement
      }
    }
  }
  if (ev.theta) s.apply(ev.sigma, edge);
  return res;
}

StepResult cham_step(ChameleonState& s, const Event& ev, const Model& m, double phase_length,
                     bool modified) {
  return cham_step(s, ev, m.graph.edge(ev.edge), phase_at(ev.time, phase_length), modified);
}

bool depink_needed(const ChameleonState& s) {
  return s.num_pink() >= std::min(s.num_red(), s.num_white());
}

void depink(ChameleonState& s, bool coin) {
  if (!depink_needed(s)) return;
  const Colour to = coin ? Colour::red : Colour::white;
  for (Vertex v : s.pinks()) s.recolour(v, to);
}

// ---------------------------------------------------------------------------
// Runs

InvariantCounts& InvariantCounts::operator+=(const InvariantCounts& o) {
  steps += o.steps;
  partition += o.partition;
  monotone += o.monotone;
  cap += o.cap;
  pair_colours += o.pair_colours;
  ink += o.ink;
  return *this;
}

namespace {

// Shared driver; `next_event` returns nullptr when the stream is exhausted.
template <class NextEvent>
RunRecord drive(const Model& m, std::span<const Vertex> x, const RunOptions& opt, Rng& coins,
                NextEvent&& next_event, std::vector<std::vector<Vertex>>* z_path) {
  if (!(opt.phase_length > 0.0)) throw InvalidInput("phase length must be positive");
  if (!(opt.horizon >= 0.0)) throw InvalidInput("horizon must be >= 0");
  if (!std::is_sorted(opt.probes.begin(), opt.probes.end()))
    throw InvalidInput("probe times must be ascending");

  RunRecord rec;
  ChameleonState s = ChameleonState::initial(m.num_vertices(), x);
  rec.ink_trace.emplace_back(0.0, s.ink_half_units());
  const double T = opt.phase_length;
  std::size_t next_probe = 0;
  std::size_t pair_index = 1;  // next depinking check at 2 * pair_index * T

  auto record_probes_until = [&](double t, bool inclusive) {
    while (next_probe < opt.probes.size() &&
           (inclusive ? opt.probes[next_probe] <= t : opt.probes[next_probe] < t)) {
      rec.probe_states.push_back(s);
      ++next_probe;
    }
  };
  auto do_depink = [&](double t) {
    if (depink_needed(s)) {
      const bool coin = fair_coin(coins);
      depink(s, coin);
      rec.depink_times.push_back(t);
      rec.depink_coins.push_back(coin);
      rec.ink_trace.emplace_back(t, s.ink_half_units());
    }
  };
  // Depinking checks and probes strictly before time t (and within the horizon).
  auto catch_up = [&](double t) {
    while (true) {
      const double d = 2.0 * static_cast<double>(pair_index) * T;
      if (d >= t || d > opt.horizon) break;
      record_probes_until(d, false);
      do_depink(d);
      ++pair_index;
      if (s.absorbed()) return true;
    }
    record_probes_until(std::min(t, opt.horizon), t > opt.horizon);
    return false;
  };

  bool done = s.absorbed();
  if (done) rec.absorption_time = 0.0;
  while (!done) {
    const Event* ev = next_event();
    const double t = ev ? ev->time : std::numeric_limits<double>::infinity();
    if (catch_up(t)) {
      done = true;
      rec.absorption_time = 2.0 * static_cast<double>(pair_index - 1) * T;
      break;
    }
    if (!ev || t > opt.horizon) break;

    const std::size_t r0 = s.num_red(), w0 = s.num_white();
    const std::int64_t ink0 = s.ink_half_units();
    const auto& edge = m.graph.edge(ev->edge);
    const StepResult res = cham_step(s, *ev, edge, phase_at(t, T), opt.modified);
    ++rec.events;
    if (z_path) z_path->push_back(s.z());

    if (opt.record_pinkenings)
      for (const auto& p : res.pinkened)
        rec.pinkenings.push_back({t, p, res.kind == StepKind::pinken_pair});
    if (opt.check_invariants) {
      auto& inv = rec.invariants;
      ++inv.steps;
      if (!s.partition_ok()) ++inv.partition;
      if (s.num_red() > r0 || s.num_white() > w0) ++inv.monotone;
      if (s.ink_half_units() != ink0) ++inv.ink;
      if (!opt.modified && res.kind == StepKind::pinken_hyperedge &&
          s.num_pink() > std::min(s.num_red(), s.num_white()))
        ++inv.cap;
      if (!res.pairs_mixed) ++inv.pair_colours;
    }
    if (s.absorbed()) {
      done = true;
      rec.absorption_time = t;
    }
  }
  // The state is frozen after absorption or the horizon.
  while (next_probe < opt.probes.size() && opt.probes[next_probe] <= opt.horizon) {
    rec.probe_states.push_back(s);
    ++next_probe;
  }
  rec.absorbed = s.absorbed();
  rec.fill = s.filled();
  rec.final_state = s;
  rec.z_path_final = s.z();
  return rec;
}

}  // namespace

RunRecord run_chameleon(const Model& m, std::span<const Vertex> x, const RunOptions& opt,
                        std::uint64_t seed, std::uint64_t move_stream, std::uint64_t coin_stream) {
  EventSource src(m, seed, move_stream, true);
  Rng coins = make_stream(seed, coin_stream);
  RunRecord rec = drive(m, x, opt, coins, [&]() -> const Event* { return &src.next(); }, nullptr);
  rec.seed = seed;
  rec.move_stream = move_stream;
  rec.coin_stream = coin_stream;
  return rec;
}

RunRecord run_chameleon_on(const Model& m, std::span<const Vertex> x, const RunOptions& opt,
                           const EventStream& stream, std::uint64_t coin_seed,
                           std::vector<std::vector<Vertex>>* z_path) {
  if (!stream.lazy()) throw InvalidInput("the chameleon process needs a lazy event stream");
  Rng coins(coin_seed);
  std::size_t i = 0;
  RunOptions o = opt;
  o.horizon = std::min(opt.horizon, stream.horizon());
  RunRecord rec = drive(
      m, x, o, coins,
      [&]() -> const Event* { return i < stream.events.size() ? &stream.events[i++] : nullptr; },
      z_path);
  rec.seed = stream.descriptor.seed;
  rec.move_stream = stream.descriptor.stream_id;
  return rec;
}

double default_phase_length(const Model& m) {
  if (m.num_vertices() < 4) throw InvalidInput("EX(4) needs at least four vertices");
  const double t = mixing_time(StateKind::ex, m, 4, 0.25).time;
  if (!(t > 0.0))
    throw InvalidInput("T_EX(4)(1/4) is 0 for this model; supply a phase length");
  return 20.0 * t;
}

// ---------------------------------------------------------------------------
// Batches

double BatchResult::fill_fraction() const {
  return replicas ? static_cast<double>(fill) / static_cast<double>(replicas) : 0.0;
}

namespace {

std::pair<double, double> mean_se(std::int64_t sum, std::int64_t sum_sq, std::size_t n, double scale) {
  if (n == 0) return {0.0, 0.0};
  const double nn = static_cast<double>(n);
  const double mean = static_cast<double>(sum) / nn;
  const double var = n > 1 ? std::max(0.0, (static_cast<double>(sum_sq) - nn * mean * mean) / (nn - 1.0)) : 0.0;
  return {mean * scale, std::sqrt(var / nn) * scale};
}

}  // namespace

std::pair<double, double> BatchResult::ink_mean_se(std::size_t probe) const {
  return mean_se(ink_sum.at(probe), ink_sum_sq.at(probe), replicas, 0.5);
}

std::pair<double, double> BatchResult::law_mean_se(std::size_t probe, std::size_t state) const {
  return mean_se(law_sum.at(probe).at(state), law_sum_sq.at(probe).at(state), replicas, 0.5);
}

BatchResult run_batch(const Model& m, std::span<const Vertex> x, const BatchOptions& opt) {
  const std::size_t probes = opt.run.probes.size();
  const std::size_t n = m.num_vertices();
  std::optional<StateSpace> space;
  if (opt.endpoint_law) space.emplace(StateKind::ip, n, x.size(), kDefaultStateCap);

  auto blank = [&] {
    BatchResult b;
    b.ink_sum.assign(probes, 0);
    b.ink_sum_sq.assign(probes, 0);
    if (space) {
      b.law_sum.assign(probes, std::vector<std::int64_t>(space->size(), 0));
      b.law_sum_sq.assign(probes, std::vector<std::int64_t>(space->size(), 0));
    }
    return b;
  };

  auto run_range = [&](std::size_t from, std::size_t to, BatchResult& acc) {
    std::vector<Vertex> key(x.size());
    for (std::size_t r = from; r < to; ++r) {
      const RunRecord rec = run_chameleon(m, x, opt.run, opt.seed, 2 * r, 2 * r + 1);
      ++acc.replicas;
      if (!rec.absorbed) ++acc.unabsorbed;
      else if (rec.fill) ++acc.fill;
      else ++acc.empty;
      for (std::size_t j = 0; j < rec.depink_times.size(); ++j) {
        const auto phase_pair = static_cast<std::size_t>(
            std::llround(rec.depink_times[j] / (2.0 * opt.run.phase_length)));
        if (acc.depink_histogram.size() <= j) acc.depink_histogram.resize(j + 1);
        auto& row = acc.depink_histogram[j];
        if (row.size() < phase_pair) row.resize(phase_pair, 0);
        ++row[phase_pair - 1];
      }
      acc.max_depinkings = std::max(acc.max_depinkings, rec.depink_times.size());
      for (std::size_t p = 0; p < rec.probe_states.size(); ++p) {
        const ChameleonState& s = rec.probe_states[p];
        const std::int64_t ink = s.ink_half_units();
        acc.ink_sum[p] += ink;
        acc.ink_sum_sq[p] += ink * ink;
        if (space) {
          std::copy(s.z().begin(), s.z().end(), key.begin());
          for (Vertex b = 0; b < n; ++b) {
            const int h = s.ink_half_units(b);
            if (h == 0) continue;
            key.back() = b;
            const std::size_t idx = space->index(key);
            acc.law_sum[p][idx] += h;
            acc.law_sum_sq[p][idx] += h * h;
          }
        }
      }
      acc.invariants += rec.invariants;
    }
  };

  const unsigned threads = std::max(1u, opt.threads);
  std::vector<BatchResult> parts(threads, blank());
  std::vector<std::thread> pool;
  const std::size_t per = (opt.replicas + threads - 1) / threads;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t from = std::min(opt.replicas, t * per);
    const std::size_t to = std::min(opt.replicas, from + per);
    auto work = [&, t, from, to] {
      try {
        run_range(from, to, parts[t]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    };
    if (threads == 1) work();
    else pool.emplace_back(work);
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  BatchResult out = blank();
  for (const auto& b : parts) {
    out.replicas += b.replicas;
    out.fill += b.fill;
    out.empty += b.empty;
    out.unabsorbed += b.unabsorbed;
    out.max_depinkings = std::max(out.max_depinkings, b.max_depinkings);
    if (out.depink_histogram.size() < b.depink_histogram.size())
      out.depink_histogram.resize(b.depink_histogram.size());
    for (std::size_t j = 0; j < b.depink_histogram.size(); ++j) {
      auto& row = out.depink_histogram[j];
      if (row.size() < b.depink_histogram[j].size()) row.resize(b.depink_histogram[j].size(), 0);
      for (std::size_t i = 0; i < b.depink_histogram[j].size(); ++i) row[i] += b.depink_histogram[j][i];
    }
    for (std::size_t p = 0; p < probes; ++p) {
      out.ink_sum[p] += b.ink_sum[p];
      out.ink_sum_sq[p] += b.ink_sum_sq[p];
      if (space)
        for (std::size_t i = 0; i < space->size(); ++i) {
          out.law_sum[p][i] += b.law_sum[p][i];
          out.law_sum_sq[p][i] += b.law_sum_sq[p][i];
        }
    }
    out.invariants += b.invariants;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Connection map

GMapReport g_map(const ChameleonState& before, const Permutation& sigma, std::size_t edge_size,
                 bool modified) {
  if (edge_size <= 2) throw InvalidInput("g_map needs an edge of more than two vertices");
  const std::size_t n = before.n();
  const bool gate = modified || before.num_pink() < std::min(before.num_red(), before.num_white());
  LSelection l = build_L(before, sigma, modified);
  if (!gate) l.selected = 0;

  GMapReport rep;
  rep.rewritten = beta_tilde(l.selected_a(decompose(sigma)), sigma);
  rep.g = compose(rep.rewritten.inverse(), sigma);
  rep.pinkened = l.selected_vertices();

  std::vector<bool> pinkened(n, false);
  for (Vertex v : rep.pinkened) pinkened[v] = true;
  for (Vertex u = 0; u < n; ++u) {
    const Vertex gu = rep.g(u);
    if (rep.rewritten(gu) != sigma(u)) rep.conjugates = false;
    const Colour cu = before.colour(u), cg = before.colour(gu);
    if (pinkened[u]) {
      if ((cu == Colour::red) != (cg == Colour::white) || (cu == Colour::white) != (cg == Colour::red))
        rep.swaps_pinkened = false;
    } else if (cg != cu) {
      rep.keeps_colours = false;
    }
  }
  return rep;
}

}  // namespace hyperex
