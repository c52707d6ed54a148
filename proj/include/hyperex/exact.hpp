#pragma once

// Exact analysis on small state spaces: generators of RW, RW(k), EX(k) and
// IP(k), transition probabilities by uniformization, total-variation
// distances and mixing times, plus the fixed experiments that compare them.

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hyperex/hypermodel.hpp"
#include "hyperex/statespace.hpp"

namespace hyperex {

/// Dense transition matrices are |Omega| x |Omega|; above this many states
/// mixing-time work refuses rather than allocating gigabytes.
inline constexpr std::size_t kDenseStateCap = 2500;

using SparseRates = Eigen::SparseMatrix<double, Eigen::ColMajor>;

struct Generator {
  StateKind kind = StateKind::rw;
  std::size_t k = 1;
  std::shared_ptr<const StateSpace> space;
  SparseRates q;  // off-diagonal rates, diagonal = minus the row sum
  double max_exit_rate = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(q.rows()); }
};

/// rate(a -> b) = sum over edges of the probability that the ringing edge's
/// permutation carries a to b. RW ignores k. Throws StateCapExceeded.
Generator build_generator(StateKind kind, const Model& m, std::size_t k,
                          std::size_t cap = kDefaultStateCap);

/// Largest |q(a,b) - q(b,a)| and largest |row sum|.
double asymmetry(const Generator& g);
double max_row_sum(const Generator& g);

/// True iff the state graph of the generator is connected.
bool connected(const Generator& g);

/// Y <- Y * exp(Q dt), in chunks with (max exit rate) * chunk <= 20 and a
/// Poisson tail below 1e-14 per chunk. Y may be any number of row vectors.
class Propagator {
 public:
  explicit Propagator(const SparseRates& q, double max_exit_rate);
  void advance(Eigen::MatrixXd& y, double dt) const;

 private:
  SparseRates p_;  // I + Q / lambda
  double lambda_;
};

/// exp(Q t) as a dense matrix. Throws InvalidInput for t < 0 and
/// StateCapExceeded above kDenseStateCap states.
Eigen::MatrixXd transition_probs(const Generator& g, double t);

/// Half the L1 distance. Throws InvalidInput on a length mismatch.
double tv(std::span<const double> mu, std::span<const double> nu);

/// max over rows of the TV distance between that row and the uniform law.
double worst_tv_to_uniform(const Eigen::MatrixXd& p);

/// Worst start, over k-tuples of starting vertices, of the TV distance
/// between k independent copies of the one-walker kernel `p` and the uniform
/// law on V^k. Enumerates starts up to reordering.
double product_worst_tv(const Eigen::MatrixXd& p, std::size_t k);

struct MixingResult {
  StateKind kind = StateKind::rw;
  std::size_t k = 1;
  double eps = 0.25;
  double time = 0.0;          // upper end of the final bracket
  double bracket_hi = 0.0;    // first doubling time with TV <= eps
  double tolerance = 0.0;     // 1e-6 * bracket_hi
  std::size_t states = 0;
  std::string method;         // "uniformization" or "product"
};

/// inf{t : worst-start TV(t) <= eps}, by doubling then bisection. RW(k) uses
/// the product structure of independent walkers. Throws ReducibleChain when
/// the chain is not irreducible, StateCapExceeded when it is too large.
MixingResult mixing_time(StateKind kind, const Model& m, std::size_t k, double eps,
                         std::size_t cap = kDefaultStateCap);

struct TvCurve {
  StateKind kind = StateKind::rw;
  std::size_t k = 1;
  std::vector<double> times;
  std::vector<double> worst_tv;
};

/// Worst-start TV at each time of `times` (sorted ascending, >= 0).
TvCurve tv_curve(StateKind kind, const Model& m, std::size_t k, std::vector<double> times,
                 std::size_t cap = kDefaultStateCap);

/// P(M > t) at each time for two independent walkers started at y: walkers
/// move with the RW rates and are absorbed at rate 2 per edge holding both.
std::vector<double> meeting_survival(const Model& m, std::array<Vertex, 2> y,
                                     std::span<const double> times);

/// Endpoint law of IP(k) started from x at time t, indexed like
/// StateSpace(ip, |V|, k).
Eigen::VectorXd ip_endpoint_law(const Model& m, std::span<const Vertex> x, double t,
                                std::size_t cap = kDefaultStateCap);

// ---------------------------------------------------------------------------
// Relations between mixing times

struct RelationRow {
  std::string relation;  // contraction | submultiplicative | rw-powers | product-tv | ex-complement
  std::string detail;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;      // rhs - lhs, or -|lhs - rhs| for equalities
  double tolerance = 0.0;  // numerical allowance from bisection tolerances
  bool ok = true;
  bool skipped = false;
  std::string note;
};

struct RelationsReport {
  std::vector<RelationRow> rows;
  bool all_ok() const;
  std::size_t checked() const;
};

struct RelationsConfig {
  std::vector<std::size_t> ks;  // empty: 1..|V|-1
  std::vector<double> eps{0.25, 0.1, 0.01};
  std::size_t cap = kDefaultStateCap;
};

RelationsReport check_relations(const Model& m, const RelationsConfig& cfg = {});

// ---------------------------------------------------------------------------
// Fixed experiments

/// Four vertices, one edge, weights {2+2: 1-delta, 4: delta}.
Model square_model(double delta);
/// Three vertices, one edge, weights {3: 1-delta, 2: delta}.
Model triangle_model(double delta);
/// Four vertices, one edge, uniform over the six 4-cycles.
Model four_cycle_model();

struct NegCorrRow {
  double t = 0.0;
  double walker_in_b = 0.0;   // P(u_t in B) for one walker
  double product = 0.0;       // P(u_t in B) P(v_t in B)
  double product_bound = 0.0; // (1 - e^{-t})^2
  double exclusion = 0.0;     // P(exclusion set = B)
  double exclusion_bound = 0.0;  // (1/3) t e^{-t}
  bool bounds_ok = false;
  bool strict = false;        // product < exclusion
};

/// Walkers start at the first two vertices of four_cycle_model(), B is the
/// other two. Every row with t in (0, 0.33) must have bounds_ok and strict.
std::vector<NegCorrRow> neg_corr_experiment(std::span<const double> times);

struct DeltaRow {
  double delta = 0.0;
  std::optional<double> ex2_over_ex1;  // square_model(delta)
  std::optional<double> ip2_over_ex2;  // triangle_model(delta)
  std::string square_error;
  std::string triangle_error;
};

/// Ratios of 1/4-mixing times; a reducible model records its error message.
std::vector<DeltaRow> delta_ratio_experiments(std::span<const double> deltas);

/// True iff, ordering rows by decreasing delta, both ratios strictly
/// increase over the rows where they are defined.
bool delta_ratios_monotone(const std::vector<DeltaRow>& rows);

}  // namespace hyperex
