#pragma once

// Permutations of a finite label set {0, ..., n-1}, canonical cyclic
// decompositions, uniform conjugacy-class sampling and the involutive
// rewriting maps used to recolour particles in the chameleon process.
//
// Composition convention (repo-wide): compose(a, b) = a ∘ b, i.e. the
// right argument is applied first: compose(a, b)(x) = a(b(x)).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperex/rng.hpp"

namespace hyperex {

using Vertex = std::uint32_t;

class Permutation {
 public:
  Permutation() = default;

  /// Identity on {0, ..., n-1}.
  explicit Permutation(std::size_t n);

  /// One-line form: image[x] = p(x). Throws InvalidInput unless bijective.
  explicit Permutation(std::vector<Vertex> image);

  static Permutation identity(std::size_t n) { return Permutation(n); }

  /// Builds a permutation of {0..n-1} from disjoint cycles. Throws
  /// InvalidInput on out-of-range or repeated labels.
  static Permutation from_cycles(std::size_t n,
                                 const std::vector<std::vector<Vertex>>& cycles);

  std::size_t size() const noexcept { return image_.size(); }
  Vertex operator()(Vertex x) const { return image_[x]; }
  std::span<const Vertex> one_line() const noexcept { return image_; }

  Permutation inverse() const;
  bool is_identity() const noexcept;

  /// Points moved by the permutation, ascending.
  std::vector<Vertex> support() const;

  /// Mutable access for in-place samplers; the caller restores bijectivity.
  std::vector<Vertex>& raw() noexcept { return image_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<Vertex> image_;
};

/// outer ∘ inner. Throws InvalidInput on size mismatch.
Permutation compose(const Permutation& outer, const Permutation& inner);
inline Permutation operator*(const Permutation& outer, const Permutation& inner) {
  return compose(outer, inner);
}

/// Cycle notation such as "(5 21)(8 10)"; the identity prints as "()".
std::string to_cycle_string(const Permutation& p);

/// Accepts cycle notation or a JSON array in one-line form. For cycle
/// notation `n` fixes the domain size; n = 0 means max label + 1.
Permutation parse_permutation(std::string_view text, std::size_t n = 0);

// ---------------------------------------------------------------------------
// Cycle types

/// Non-trivial cycle lengths, sorted descending. Fixed points are implied by
/// the ambient edge size.
class CycleType {
 public:
  CycleType() = default;
  explicit CycleType(std::vector<std::size_t> parts);

  const std::vector<std::size_t>& parts() const noexcept { return parts_; }
  std::size_t moved() const noexcept;
  std::size_t fixed_points(std::size_t edge_size) const;
  bool is_identity() const noexcept { return parts_.empty(); }

  /// Number of permutations of `edge_size` labels with this type.
  std::uint64_t class_size(std::size_t edge_size) const;

  /// "2+2", "4", ...; the identity type is "id".
  std::string to_string() const;
  /// Inverse of to_string; also accepts "" for the identity.
  static CycleType parse(std::string_view text);

  friend bool operator==(const CycleType&, const CycleType&) = default;
  friend auto operator<=>(const CycleType&, const CycleType&) = default;

 private:
  std::vector<std::size_t> parts_;
};

CycleType cycle_type_of(const Permutation& p);

/// All permutations of {0..n-1} whose restriction to `labels` has cycle
/// type `type` and which fix every other point. Exhaustive; intended for
/// |labels| <= 8.
std::vector<Permutation> enumerate_class(const CycleType& type,
                                         std::span<const Vertex> labels,
                                         std::size_t n);

/// Uniform draw from the conjugacy class of `type` on `labels`, extended to
/// {0..n-1} by fixed points. Shuffle, cut into cycles; no rejection.
Permutation sample_class(const CycleType& type, std::span<const Vertex> labels,
                         std::size_t n, Rng& rng);

/// In-place variant: `out` must already be a permutation of size n that fixes
/// every label in `labels`' complement; points of `labels` are overwritten.
void sample_class_into(const CycleType& type, std::span<const Vertex> labels,
                       Rng& rng, Permutation& out,
                       std::vector<Vertex>& scratch);

// ---------------------------------------------------------------------------
// Canonical cyclic decomposition

struct Transposition {
  Vertex lo;
  Vertex hi;
  friend bool operator==(const Transposition&, const Transposition&) = default;
};

/// A cycle of length >= 3 written from its minimal element:
/// elems[j] = rho^j(m), elems[0] = m.
struct Cycle {
  std::vector<Vertex> elems;
  std::size_t length() const noexcept { return elems.size(); }
  Vertex min() const { return elems.front(); }
  friend bool operator==(const Cycle&, const Cycle&) = default;
};

/// sigma = rho0 ∘ rho_1 ∘ ... ∘ rho_K with fixed points omitted. rho0 lists
/// its transpositions in increasing order of their smaller element
/// (lo < hi inside each pair); the cycles are sorted by length, then by
/// minimal element.
struct CyclicDecomposition {
  std::size_t n = 0;
  std::vector<Transposition> rho0;
  std::vector<Cycle> cycles;

  std::size_t K() const noexcept { return cycles.size(); }
  /// Number of points moved by rho0 (d0 = 2 * #transpositions).
  std::size_t d0() const noexcept { return 2 * rho0.size(); }

  friend bool operator==(const CyclicDecomposition&,
                         const CyclicDecomposition&) = default;
};

CyclicDecomposition decompose(const Permutation& p);

/// Inverse of decompose. Throws InvalidInput if labels overlap, are out of
/// range, a transposition is not normalised, or a cycle is shorter than 3.
Permutation recompose(const CyclicDecomposition& d);

// ---------------------------------------------------------------------------
// Rewriting maps

/// Index set for one block. For a cycle of length d >= 4 the admissible
/// indices are 1..floor(d/4); for d = 3 the only admissible index is 0. For
/// the transposition block they are 1..floor(d0/4).
using IndexSet = std::vector<std::size_t>;

struct ASelection {
  IndexSet a0;
  std::vector<IndexSet> cycles;

  bool empty() const noexcept;
  friend bool operator==(const ASelection&, const ASelection&) = default;
};

std::string to_string(const ASelection& a);

/// floor(d / 4).
constexpr std::size_t quarter(std::size_t d) noexcept { return d / 4; }

/// Exponent window of index i in a cycle of length d:
/// {2i-2, 2i-1, 2d'+2i-2, 2d'+2i-1} for d >= 4, {0, 1, 2} for d = 3.
std::vector<std::size_t> cycle_window(std::size_t d, std::size_t i);

/// The index map on exponents {0, ..., d-1} (0 fixed) obtained by composing
/// the swaps 2i-1 <-> 2d'+2i-1 for i in A (or 1 <-> 2 when d = 3, A = {0}).
std::vector<std::size_t> beta_index_map(std::size_t d, const IndexSet& a);

/// Rewrites a cycle so that its j-th power sequence becomes the old sequence
/// read through beta_index_map. Throws InvalidInput if A is out of range.
Cycle beta_cycle(const IndexSet& a, const Cycle& rho);

/// For each i in A with a_{4i-1} < a_{4i-2}, multiplies rho0 on the right by
/// (a_{4i-3} a_{4i-1})(a_{4i-2} a_{4i}); result in canonical order. Throws
/// InvalidInput if rho0 is not canonically ordered or A is out of range.
std::vector<Transposition> beta_trans(const IndexSet& a,
                                      const std::vector<Transposition>& rho0);

/// Applies beta_trans / beta_cycle blockwise to decompose(sigma). Throws
/// InvalidInput if the shape of A does not match the decomposition.
Permutation beta_tilde(const ASelection& a, const Permutation& sigma);

/// Vertex colours relevant to the selector. Anything not red or white
/// (black particles, pink particles) disqualifies a window.
enum class Colour : std::uint8_t { black, red, pink, white };

/// Selects, per block, the windows holding exactly one red and three whites
/// or one white and three reds (for 3-cycles: a 1:2 or 2:1 split).
ASelection build_A(std::span<const Colour> colour, const Permutation& sigma);

/// Set-based form. R and W are vertex lists; throws InvalidInput if they
/// intersect or contain out-of-range labels.
ASelection build_A(std::span<const Vertex> red, std::span<const Vertex> white,
                   const Permutation& sigma);

}  // namespace hyperex
