#pragma once

#include <cstddef>
#include <cstdint>
#include <algorithm>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hyperex/permgroup.hpp"

namespace hyperex {

/// Which process a state space belongs to:
///   rw  - one walker, states V
///   rwk - k independent walkers, states V^k
///   ex  - exclusion, states are k-subsets (stored ascending)
///   ip  - interchange, states are k-tuples of distinct vertices
enum class StateKind { rw, rwk, ex, ip };

std::string to_string(StateKind kind);
/// Accepts "rw", "rwk", "ex", "ip" (case-insensitive). Throws InvalidInput.
StateKind parse_state_kind(std::string_view text);

/// Number of states, saturating at SIZE_MAX on overflow.
std::size_t count_states(StateKind kind, std::size_t n, std::size_t k);

/// Enumerated states with a reverse index.
class StateSpace {
 public:
  /// Throws StateCapExceeded if the space has more than `cap` states and
  /// InvalidInput if k does not fit n.
  StateSpace(StateKind kind, std::size_t n, std::size_t k, std::size_t cap);

  StateKind kind() const noexcept { return kind_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t size() const noexcept { return states_.size() / std::max<std::size_t>(k_, 1); }

  std::span<const Vertex> state(std::size_t i) const {
    return {states_.data() + i * k_, k_};
  }

  /// Index of a state. EX states must be sorted ascending. Throws
  /// InvalidInput for a state outside the space.
  std::size_t index(std::span<const Vertex> s) const;

 private:
  std::uint64_t key(std::span<const Vertex> s) const;

  StateKind kind_;
  std::size_t n_;
  std::size_t k_;
  std::vector<Vertex> states_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

}  // namespace hyperex
