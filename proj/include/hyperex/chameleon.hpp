#pragma once

// The chameleon process: k-1 labelled black particles plus red, pink and
// white ones, driven by a lazy event stream through alternating
// constant-colour and colour-changing phases of length T, with depinking
// checks at every even multiple of T. Ink is counted in half-units
// (red = 2, pink = 1) so that it stays an integer.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperex/engine.hpp"
#include "hyperex/hypermodel.hpp"
#include "hyperex/permgroup.hpp"

namespace hyperex {

class ChameleonState {
 public:
  ChameleonState() = default;

  /// z = first k-1 entries of x, R = {last entry}, P empty, W = the rest.
  /// Throws InvalidInput on repeats, labels >= n or an empty x.
  static ChameleonState initial(std::size_t n, std::span<const Vertex> x);

  /// Arbitrary state; throws InvalidInput unless O(z), R, P, W partition
  /// {0..n-1}.
  static ChameleonState from_sets(std::size_t n, std::vector<Vertex> z, std::span<const Vertex> red,
                                  std::span<const Vertex> pink, std::span<const Vertex> white);

  std::size_t n() const noexcept { return colour_.size(); }
  const std::vector<Vertex>& z() const noexcept { return z_; }
  Colour colour(Vertex v) const { return colour_[v]; }
  std::span<const Colour> colours() const noexcept { return colour_; }

  std::size_t num_red() const noexcept { return red_; }
  std::size_t num_pink() const noexcept { return pink_; }
  std::size_t num_white() const noexcept { return white_; }
  std::vector<Vertex> reds() const { return collect(Colour::red); }
  std::vector<Vertex> pinks() const { return collect(Colour::pink); }
  std::vector<Vertex> whites() const { return collect(Colour::white); }

  /// 2|R| + |P|.
  std::int64_t ink_half_units() const noexcept {
    return 2 * static_cast<std::int64_t>(red_) + static_cast<std::int64_t>(pink_);
  }
  /// 2 for red, 1 for pink, 0 otherwise.
  int ink_half_units(Vertex v) const noexcept {
    return colour_[v] == Colour::red ? 2 : colour_[v] == Colour::pink ? 1 : 0;
  }

  bool absorbed() const noexcept { return pink_ == 0 && (red_ == 0 || white_ == 0); }
  bool filled() const noexcept { return pink_ == 0 && white_ == 0; }

  /// Recounts from scratch and checks that z is consistent with the colours.
  bool partition_ok() const;

  /// Moves every particle: the particle at v goes to sigma(v). Only the
  /// points of `moved` may be displaced.
  void apply(const Permutation& sigma, std::span<const Vertex> moved);
  void recolour(Vertex v, Colour c);

  friend bool operator==(const ChameleonState& a, const ChameleonState& b) {
    return a.z_ == b.z_ && a.colour_ == b.colour_;
  }

 private:
  std::vector<Vertex> collect(Colour c) const;

  std::vector<Vertex> z_;
  std::vector<Colour> colour_;
  std::vector<Colour> scratch_;
  std::size_t red_ = 0;
  std::size_t pink_ = 0;
  std::size_t white_ = 0;
};

/// One candidate pair: block 0 is the transposition block, block i >= 1 is
/// the i-th cycle of length >= 3 in decomposition order.
struct LPair {
  std::size_t block = 0;
  std::size_t index = 0;
  Vertex red = 0;
  Vertex white = 0;
  friend bool operator==(const LPair&, const LPair&) = default;
};

struct LSelection {
  ASelection a;               // full selector for sigma and the current colours
  std::vector<LPair> pairs;   // every L pair, ordered by (block, index)
  std::size_t cap = 0;        // floor((min(|R|,|W|) - |P|) / 3), 0 if negative
  std::size_t selected = 0;   // the first `selected` pairs form L*

  std::vector<Vertex> all_vertices() const;       // L, ascending
  std::vector<Vertex> selected_vertices() const;  // union of L*, ascending
  /// The selector restricted to the blocks and indices of L*.
  ASelection selected_a(const CyclicDecomposition& d) const;
};

/// L pairs for sigma under the state's colours. With `uncapped` every pair
/// is selected.
LSelection build_L(const ChameleonState& s, const Permutation& sigma, bool uncapped = false);

enum class Phase { constant_colour, colour_changing };

/// Phase containing time t > 0: (2(i-1)T, (2i-1)T] is constant-colour and
/// ((2i-1)T, 2iT] colour-changing. Throws InvalidInput for t <= 0 or T <= 0.
Phase phase_at(double t, double phase_length);

enum class StepKind { interchange, pinken_hyperedge, pinken_pair };

struct StepResult {
  StepKind kind = StepKind::interchange;
  std::vector<LPair> pinkened;
  bool pairs_mixed = true;  // every pinkened pair was one red and one white beforehand
};

/// One incident of the event stream. `edge` is the ringing edge's vertex set.
StepResult cham_step(ChameleonState& s, const Event& ev, std::span<const Vertex> edge, Phase phase,
                     bool modified);
/// Same, with the phase derived from the event time; throws InvalidInput if
/// the event time is not positive.
StepResult cham_step(ChameleonState& s, const Event& ev, const Model& m, double phase_length,
                     bool modified);

/// The depinking rule. Returns true when |P| >= min(|R|, |W|), in which case
/// the coin was used: true sends every pink to R, false to W.
bool depink_needed(const ChameleonState& s);
void depink(ChameleonState& s, bool coin);

// ---------------------------------------------------------------------------
// Runs

struct RunOptions {
  double phase_length = 1.0;
  double horizon = 0.0;
  bool modified = false;
  std::vector<double> probes;   // ascending times at which the state is recorded
  bool check_invariants = false;
  bool record_pinkenings = false;
};

struct PinkeningRecord {
  double time = 0.0;
  LPair pair;
  bool pair_edge = false;  // the two-vertex edge branch
};

struct InvariantCounts {
  std::size_t steps = 0;
  std::size_t partition = 0;      // violations of the partition invariant
  std::size_t monotone = 0;       // |R| or |W| grew outside a depinking
  std::size_t cap = 0;            // |P| > min(|R|,|W|) after a hyperedge pinkening
  std::size_t pair_colours = 0;   // a pinkened pair was not one red + one white
  std::size_t ink = 0;            // total ink changed outside a depinking

  std::size_t total() const noexcept { return partition + monotone + cap + pair_colours + ink; }
  InvariantCounts& operator+=(const InvariantCounts& o);
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::uint64_t move_stream = 0;
  std::uint64_t coin_stream = 0;
  std::vector<std::pair<double, std::int64_t>> ink_trace;  // (time, half-units)
  std::vector<double> depink_times;
  std::vector<bool> depink_coins;
  bool absorbed = false;
  bool fill = false;
  double absorption_time = 0.0;
  std::size_t events = 0;
  ChameleonState final_state;
  std::vector<ChameleonState> probe_states;  // one per option probe
  std::vector<PinkeningRecord> pinkenings;
  std::vector<Vertex> z_path_final;          // z after the last processed event
  InvariantCounts invariants;
};

/// Drives the lazy stream (seed, move_stream) through the phase schedule,
/// with depinking coins from the independent stream (seed, coin_stream).
/// Stops at absorption or at the horizon.
RunRecord run_chameleon(const Model& m, std::span<const Vertex> x, const RunOptions& opt,
                        std::uint64_t seed, std::uint64_t move_stream, std::uint64_t coin_stream);

/// Same, over a materialised lazy stream; only that stream's events are
/// used, so the black path can be compared with evolve(ip, ...) on it.
/// Returns the black tuple after every event in `z_path`.
RunRecord run_chameleon_on(const Model& m, std::span<const Vertex> x, const RunOptions& opt,
                           const EventStream& stream, std::uint64_t coin_seed,
                           std::vector<std::vector<Vertex>>* z_path = nullptr);

/// 20 * T_EX(4)(1/4), computed exactly. Throws when EX(4) is unavailable or
/// the result is 0.
double default_phase_length(const Model& m);

struct BatchOptions {
  RunOptions run;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool endpoint_law = false;  // accumulate E[ink_t(b) 1{z_t = c}] at each probe
};

/// Integer sums, so aggregation does not depend on the thread count.
struct BatchResult {
  std::size_t replicas = 0;
  std::size_t fill = 0;
  std::size_t empty = 0;
  std::size_t unabsorbed = 0;
  std::size_t max_depinkings = 0;
  std::vector<std::vector<std::size_t>> depink_histogram;  // [j-1][phase pair i-1]
  std::vector<std::int64_t> ink_sum;      // per probe, half-units
  std::vector<std::int64_t> ink_sum_sq;   // per probe, half-units squared
  // Per probe and IP(k) state (c..., b): sums of ink_t(b) 1{z_t = c} in half-units.
  std::vector<std::vector<std::int64_t>> law_sum;
  std::vector<std::vector<std::int64_t>> law_sum_sq;
  InvariantCounts invariants;

  double fill_fraction() const;
  /// Mean and standard error of total ink at probe i, in ink units.
  std::pair<double, double> ink_mean_se(std::size_t probe) const;
  /// Mean and standard error of the endpoint-law estimate of IP state s.
  std::pair<double, double> law_mean_se(std::size_t probe, std::size_t state) const;
};

/// Replica r uses streams 2r (movement) and 2r + 1 (coins).
BatchResult run_batch(const Model& m, std::span<const Vertex> x, const BatchOptions& opt);

// ---------------------------------------------------------------------------
// Connection map

struct GMapReport {
  Permutation g;
  Permutation rewritten;        // the rewritten sigma for the selected blocks
  std::vector<Vertex> pinkened;
  bool swaps_pinkened = true;   // u red iff g(u) white, u white iff g(u) red
  bool keeps_colours = true;    // non-pinkened u: g(u) and u had the same colour before the step
  bool conjugates = true;       // rewritten(g(u)) = sigma(u) for all u
  bool ok() const noexcept { return swaps_pinkened && keeps_colours && conjugates; }
};

/// g = rewritten^{-1} o sigma for a colour-changing event with theta = 1 on
/// an edge of more than two vertices. Throws InvalidInput if edge_size <= 2.
GMapReport g_map(const ChameleonState& before, const Permutation& sigma, std::size_t edge_size,
                 bool modified = false);

}  // namespace hyperex
