#include "hyperex/statespace.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "hyperex/errors.hpp"

namespace hyperex {

std::string to_string(StateKind kind) {
  switch (kind) {
    case StateKind::rw: return "rw";
    case StateKind::rwk: return "rwk";
    case StateKind::ex: return "ex";
    case StateKind::ip: return "ip";
  }
  return "?";
}

StateKind parse_state_kind(std::string_view text) {
  std::string s(text);
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "rw") return StateKind::rw;
  if (s == "rwk") return StateKind::rwk;
  if (s == "ex") return StateKind::ex;
  if (s == "ip") return StateKind::ip;
  throw InvalidInput("unknown process kind '" + std::string(text) + "' (expected rw, rwk, ex or ip)");
}

namespace {

constexpr std::size_t kSat = std::numeric_limits<std::size_t>::max();

std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > kSat / a) return kSat;
  return a * b;
}

}  // namespace

std::size_t count_states(StateKind kind, std::size_t n, std::size_t k) {
  switch (kind) {
    case StateKind::rw: return n;
    case StateKind::rwk: {
      std::size_t c = 1;
      for (std::size_t i = 0; i < k; ++i) c = sat_mul(c, n);
      return c;
    }
    case StateKind::ex: {
      if (k > n) return 0;
      // C(n,k) computed incrementally; exact while it fits.
      std::size_t c = 1;
      const std::size_t kk = std::min(k, n - k);
      for (std::size_t i = 1; i <= kk; ++i) {
        const std::size_t num = sat_mul(c, n - kk + i);
        if (num == kSat) return kSat;
        c = num / i;
      }
      return c;
    }
    case StateKind::ip: {
      if (k > n) return 0;
      std::size_t c = 1;
      for (std::size_t i = 0; i < k; ++i) c = sat_mul(c, n - i);
      return c;
    }
  }
  return 0;
}

StateSpace::StateSpace(StateKind kind, std::size_t n, std::size_t k, std::size_t cap)
    : kind_(kind), n_(n), k_(kind == StateKind::rw ? 1 : k) {
  if (kind == StateKind::rw && k > 1) throw InvalidInput("rw state space has k = 1");
  if (k_ == 0 || k_ > n) throw InvalidInput("state space needs 1 <= k <= |V|");
  const std::size_t count = count_states(kind, n, k_);
  if (count > cap)
    throw StateCapExceeded(to_string(kind) + "(k=" + std::to_string(k_) + ") on " + std::to_string(n) +
                               " vertices has " + (count == kSat ? std::string("too many") : std::to_string(count)) +
                               " states, above the cap of " + std::to_string(cap),
                           count, cap);
  // Keys are base-n digits; make sure they fit.
  if (count_states(StateKind::rwk, n, k_) == kSat ||
      count_states(StateKind::rwk, n, k_) > (std::uint64_t{1} << 62))
    throw StateCapExceeded("state keys do not fit in 64 bits", count, cap);

  states_.reserve(count * k_);
  index_.reserve(count);
  std::vector<Vertex> cur(k_, 0);

  auto emit = [&] {
    index_.emplace(key(cur), static_cast<std::uint32_t>(states_.size() / k_));
    states_.insert(states_.end(), cur.begin(), cur.end());
  };

  switch (kind) {
    case StateKind::rw:
    case StateKind::rwk: {
      while (true) {
        emit();
        std::size_t i = k_;
        while (i > 0 && cur[i - 1] + 1 == n) cur[--i] = 0;
        if (i == 0) break;
        ++cur[i - 1];
      }
      break;
    }
    case StateKind::ex: {
      for (std::size_t i = 0; i < k_; ++i) cur[i] = static_cast<Vertex>(i);
      while (true) {
        emit();
        std::size_t i = k_;
        while (i > 0 && cur[i - 1] == n - k_ + (i - 1)) --i;
        if (i == 0) break;
        ++cur[i - 1];
        for (std::size_t j = i; j < k_; ++j) cur[j] = cur[j - 1] + 1;
      }
      break;
    }
    case StateKind::ip: {
      // Tuples of distinct vertices in lexicographic order.
      std::vector<bool> used(n, false);
      std::vector<Vertex> next(k_, 0);
      std::size_t depth = 0;
      cur.assign(k_, 0);
      // Iterative DFS: next[depth] is the candidate to try at this depth.
      while (true) {
        if (depth == k_) {
          emit();
          --depth;
          used[cur[depth]] = false;
          next[depth] = cur[depth] + 1;
          continue;
        }
        Vertex c = next[depth];
        while (c < n && used[c]) ++c;
        if (c >= n) {
          if (depth == 0) break;
          --depth;
          used[cur[depth]] = false;
          next[depth] = cur[depth] + 1;
          continue;
        }
        cur[depth] = c;
        used[c] = true;
        ++depth;
        if (depth < k_) next[depth] = 0;
      }
      break;
    }
  }
}

std::uint64_t StateSpace::key(std::span<const Vertex> s) const {
  std::uint64_t k = 0;
  for (Vertex v : s) k = k * n_ + v;
  return k;
}

std::size_t StateSpace::index(std::span<const Vertex> s) const {
  if (s.size() != k_) throw InvalidInput("state has the wrong length");
  for (Vertex v : s)
    if (v >= n_) throw InvalidInput("state names an unknown vertex");
  auto it = index_.find(key(s));
  if (it == index_.end()) throw InvalidInput("state is not in the " + to_string(kind_) + " space");
  return it->second;
}

}  // namespace hyperex
