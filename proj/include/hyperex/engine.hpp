#pragma once

// Graphical construction: Poisson event streams shared by every process,
// interval maps, trajectories of RW / RW(k) / EX / IP, meeting times of
// independent walkers and the easy-hypergraph classifier.
//
// Streams are replayable: (seed, stream_id) determines every innovation.
// Walker i of an independent-clock process uses stream_id = base + i.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hyperex/hypermodel.hpp"
#include "hyperex/rng.hpp"
#include "hyperex/statespace.hpp"

namespace hyperex {

/// One incident of the clock: at `time`, edge `edge` rings and `sigma`
/// (supported on that edge) is drawn. In lazy mode sigma is only applied
/// when theta is set; in standard mode theta is always true.
struct Event {
  double time = 0.0;
  std::size_t edge = 0;
  Permutation sigma;
  bool theta = true;
};

struct StreamDescriptor {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  double horizon = 0.0;
  bool lazy = false;
};

/// Draws events on demand: exponential gaps at rate |E| (2|E| when lazy),
/// a uniform edge, a permutation from that edge's measure, and in lazy mode
/// a fair coin. The returned reference stays valid until the next call.
class EventSource {
 public:
  EventSource(const Model& m, std::uint64_t seed, std::uint64_t stream_id, bool lazy);
  EventSource(const Model& m, Rng rng, bool lazy);

  const Event& next();
  double rate() const noexcept { return rate_; }
  bool lazy() const noexcept { return lazy_; }

 private:
  const Model* model_;
  Rng rng_;
  bool lazy_;
  double rate_;
  Event current_;
  std::vector<Vertex> scratch_;
};

struct EventStream {
  StreamDescriptor descriptor;
  std::size_t num_vertices = 0;
  std::vector<Event> events;  // strictly increasing times, all <= horizon

  double horizon() const noexcept { return descriptor.horizon; }
  bool lazy() const noexcept { return descriptor.lazy; }
};

/// Materialises every event up to `horizon` (horizon 0 gives no events).
EventStream gen_events(const Model& m, double horizon, bool lazy, std::uint64_t seed,
                       std::uint64_t stream_id = 0);
/// Same, seeded from a draw of `rng`; the descriptor records that draw.
EventStream gen_events(const Model& m, double horizon, bool lazy, Rng& rng);
EventStream replay(const Model& m, const StreamDescriptor& d);

/// I_(s,t]: the composition of the permutations applied in (s, t], the last
/// one outermost. In lazy mode events with theta = 0 contribute the identity.
struct IntervalMap {
  double s = 0.0;
  double t = 0.0;
  Permutation perm;
};

/// Throws InvalidInput unless 0 <= s <= t <= horizon.
IntervalMap interval_map(const EventStream& stream, double s, double t);

struct TrajectoryPoint {
  double time = 0.0;
  std::vector<Vertex> state;
};

/// States at time 0 and after every event. rw states have one entry, ex
/// states are sorted sets, ip and rwk states are tuples.
struct Trajectory {
  StateKind kind = StateKind::rw;
  std::vector<TrajectoryPoint> points;

  /// State in force at time t (piecewise constant, right-continuous).
  const std::vector<Vertex>& at(double t) const;
};

/// Lifts the stream's interval maps to rw / ex / ip states. Throws
/// InvalidInput for kind rwk (use evolve_rwk), for repeated vertices in ex or
/// ip initial states, or for labels outside the vertex set.
Trajectory evolve(StateKind kind, std::span<const Vertex> init, const EventStream& stream);

/// k independent walkers, walker i driven by stream (seed, base_stream + i).
Trajectory evolve_rwk(const Model& m, std::span<const Vertex> init, double horizon,
                      std::uint64_t seed, std::uint64_t base_stream = 0);

/// Meeting time of two independent walkers: the first incident, in either
/// walker's own stream, of an edge containing both walkers' positions just
/// before that incident. Empty when it does not happen by `horizon`.
std::optional<double> meeting_time(const Model& m, std::array<Vertex, 2> y,
                                   EventSource& first, EventSource& second, double horizon);
std::optional<double> meeting_time(const Model& m, std::array<Vertex, 2> y, Rng& rng,
                                   double horizon);

/// First time any two of four independent walkers are in an edge that rings
/// for one of those two. Throws InvalidInput unless the vertices are distinct.
std::optional<double> bar_meeting_time(const Model& m, std::array<Vertex, 4> x,
                                       std::span<EventSource, 4> sources, double horizon);
std::optional<double> bar_meeting_time(const Model& m, std::array<Vertex, 4> x, Rng& rng,
                                       double horizon);

// ---------------------------------------------------------------------------
// Easy-hypergraph classification

struct EasyConfig {
  double c_time = 1e10;   // multiplier of T_EX(2)(1/4)
  double c_prob = 1e-3;   // tail-probability threshold
  std::size_t replicas = 1000;
  std::uint64_t seed = 0;
  double z = 2.5758293035489004;  // two-sided 99% normal quantile for Wilson bounds
  std::optional<double> t_ex2;    // T_EX(2)(1/4); computed exactly when absent

  /// Desk-scale constants (not the asymptotic ones): c_time = 100, c_prob = 0.01.
  static EasyConfig desk_preset();
};

struct PairEstimate {
  std::array<Vertex, 2> y{};
  std::size_t exceed = 0;  // replicas with M > threshold
  std::size_t replicas = 0;
  double estimate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
};

struct EasyVerdict {
  bool easy = false;
  double t_ex2 = 0.0;
  double threshold = 0.0;  // c_time * t_ex2
  PairEstimate worst;      // pair with the largest upper confidence bound
  std::vector<PairEstimate> pairs;
  EasyConfig config;
};

/// Wilson score interval for k successes in n trials at normal quantile z.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z);

/// Estimates sup over ordered start pairs of P(M > c_time * T_EX(2)(1/4)).
/// The verdict is easy iff the largest Wilson upper bound is <= c_prob.
/// Throws InvalidInput when T_EX(2)(1/4) is neither supplied nor computable.
EasyVerdict classify_easy(const Model& m, const EasyConfig& cfg);

}  // namespace hyperex
