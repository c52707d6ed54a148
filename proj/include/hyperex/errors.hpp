#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperex {

/// Input that violates a documented precondition (bad shape, out-of-range
/// index, overlapping sets, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Text or JSON that could not be parsed. `position` is a byte offset when
/// known, and `path` a JSON pointer to the offending value when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position = npos,
             std::string path = {})
      : std::runtime_error(what), position_(position), path_(std::move(path)) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t position() const noexcept { return position_; }
  const std::string& path() const noexcept { return path_; }

 private:
  std::size_t position_;
  std::string path_;
};

/// An exact computation would need more states than the configured cap.
/// The question is left undecided rather than answered approximately.
class StateCapExceeded : public std::runtime_error {
 public:
  StateCapExceeded(const std::string& what, std::size_t states, std::size_t cap)
      : std::runtime_error(what), states_(states), cap_(cap) {}

  std::size_t states() const noexcept { return states_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t states_;
  std::size_t cap_;
};

/// The chain is not irreducible, so it has no mixing time.
class ReducibleChain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hyperex
