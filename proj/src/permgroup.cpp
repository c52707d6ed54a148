#include "hyperex/permgroup.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "hyperex/errors.hpp"

namespace hyperex {

// ---------------------------------------------------------------------------
// Permutation

Permutation::Permutation(std::size_t n) : image_(n) {
  std::iota(image_.begin(), image_.end(), Vertex{0});
}

Permutation::Permutation(std::vector<Vertex> image) : image_(std::move(image)) {
  std::vector<bool> hit(image_.size(), false);
  for (Vertex y : image_) {
    if (y >= image_.size() || hit[y])
      throw InvalidInput("one-line form is not a bijection of {0..n-1}");
    hit[y] = true;
  }
}

Permutation Permutation::from_cycles(
    std::size_t n, const std::vector<std::vector<Vertex>>& cycles) {
  Permutation p(n);
  std::vector<bool> used(n, false);
  for (const auto& c : cycles) {
    for (Vertex x : c) {
      if (x >= n) throw InvalidInput("cycle label " + std::to_string(x) + " out of range");
      if (used[x]) throw InvalidInput("label " + std::to_string(x) + " repeated in cycles");
      used[x] = true;
    }
    for (std::size_t i = 0; i < c.size(); ++i) p.image_[c[i]] = c[(i + 1) % c.size()];
  }
  return p;
}

Permutation Permutation::inverse() const {
  Permutation inv(size());
  for (std::size_t x = 0; x < size(); ++x) inv.image_[image_[x]] = static_cast<Vertex>(x);
  return inv;
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t x = 0; x < image_.size(); ++x)
    if (image_[x] != x) return false;
  return true;
}

std::vector<Vertex> Permutation::support() const {
  std::vector<Vertex> s;
  for (std::size_t x = 0; x < image_.size(); ++x)
    if (image_[x] != x) s.push_back(static_cast<Vertex>(x));
  return s;
}

Permutation compose(const Permutation& outer, const Permutation& inner) {
  if (outer.size() != inner.size()) throw InvalidInput("compose: size mismatch");
  std::vector<Vertex> img(inner.size());
  for (std::size_t x = 0; x < img.size(); ++x) img[x] = outer(inner(static_cast<Vertex>(x)));
  return Permutation(std::move(img));
}

std::string to_cycle_string(const Permutation& p) {
  std::ostringstream os;
  std::vector<bool> seen(p.size(), false);
  bool any = false;
  for (Vertex x = 0; x < p.size(); ++x) {
    if (seen[x] || p(x) == x) continue;
    any = true;
    os << '(';
    Vertex y = x;
    bool first = true;
    do {
      if (!first) os << ' ';
      os << y;
      first = false;
      seen[y] = true;
      y = p(y);
    } while (y != x);
    os << ')';
  }
  if (!any) os << "()";
  return os.str();
}

Permutation parse_permutation(std::string_view text, std::size_t n) {
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  if (i < text.size() && text[i] == '[') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("permutation JSON: ") + e.what(), e.byte);
    }
    std::vector<Vertex> img;
    for (const auto& v : j) {
      if (!v.is_number_unsigned()) throw ParseError("permutation JSON entries must be non-negative integers");
      img.push_back(v.get<Vertex>());
    }
    if (n != 0 && img.size() != n) throw ParseError("permutation JSON has wrong length");
    try {
      return Permutation(std::move(img));
    } catch (const InvalidInput& e) {
      throw ParseError(e.what());
    }
  }

  std::vector<std::vector<Vertex>> cycles;
  Vertex max_label = 0;
  while (true) {
    skip_ws();
    if (i == text.size()) break;
    if (text[i] != '(') throw ParseError("expected '(' in cycle notation", i);
    ++i;
    std::vector<Vertex> cyc;
    while (true) {
      skip_ws();
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i == text.size()) throw ParseError("unterminated cycle", i);
      if (text[i] == ')') {
        ++i;
        break;
      }
      if (!std::isdigit(static_cast<unsigned char>(text[i])))
        throw ParseError("expected a label in cycle notation", i);
      std::uint64_t v = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        v = v * 10 + static_cast<std::uint64_t>(text[i] - '0');
        if (v > 0xffffffffULL) throw ParseError("label too large", i);
        ++i;
      }
      cyc.push_back(static_cast<Vertex>(v));
      max_label = std::max(max_label, static_cast<Vertex>(v));
    }
    if (!cyc.empty()) cycles.push_back(std::move(cyc));
  }
  const std::size_t size = n != 0 ? n : (cycles.empty() ? 0 : std::size_t{max_label} + 1);
  try {
    return Permutation::from_cycles(size, cycles);
  } catch (const InvalidInput& e) {
    throw ParseError(e.what());
  }
}

// ---------------------------------------------------------------------------
// Cycle types

CycleType::CycleType(std::vector<std::size_t> parts) : parts_(std::move(parts)) {
  for (std::size_t p : parts_)
    if (p < 2) throw InvalidInput("cycle type parts must be >= 2");
  std::sort(parts_.begin(), parts_.end(), std::greater<>());
}

std::size_t CycleType::moved() const noexcept {
  return std::accumulate(parts_.begin(), parts_.end(), std::size_t{0});
}

std::size_t CycleType::fixed_points(std::size_t edge_size) const {
  if (moved() > edge_size) throw InvalidInput("cycle type " + to_string() + " does not fit edge");
  return edge_size - moved();
}

std::uint64_t CycleType::class_size(std::size_t edge_size) const {
  const std::size_t fixed = fixed_points(edge_size);
  // n! / (prod parts * prod multiplicity! * fixed!)
  auto fact = [](std::size_t k) {
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= k; ++i) f *= i;
    return f;
  };
  std::uint64_t denom = fact(fixed);
  for (std::size_t i = 0; i < parts_.size();) {
    std::size_t j = i;
    while (j < parts_.size() && parts_[j] == parts_[i]) ++j;
    denom *= fact(j - i);
    for (std::size_t k = i; k < j; ++k) denom *= parts_[k];
    i = j;
  }
  return fact(edge_size) / denom;
}

std::string CycleType::to_string() const {
  if (parts_.empty()) return "id";
  std::string s;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) s += '+';
    s += std::to_string(parts_[i]);
  }
  return s;
}

CycleType CycleType::parse(std::string_view text) {
  if (text.empty() || text == "id") return CycleType{};
  std::vector<std::size_t> parts;
  std::size_t i = 0;
  while (i <= text.size()) {
    std::size_t j = text.find('+', i);
    if (j == std::string_view::npos) j = text.size();
    const std::string_view tok = text.substr(i, j - i);
    if (tok.empty()) throw ParseError("empty part in cycle type '" + std::string(text) + "'", i);
    std::size_t v = 0;
    for (char c : tok) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw ParseError("bad cycle type '" + std::string(text) + "'", i);
      v = v * 10 + static_cast<std::size_t>(c - '0');
      if (v > 1000) throw ParseError("cycle length too large", i);
    }
    if (v < 2) throw ParseError("cycle type parts must be >= 2 in '" + std::string(text) + "'", i);
    parts.push_back(v);
    i = j + 1;
  }
  return CycleType(std::move(parts));
}

CycleType cycle_type_of(const Permutation& p) {
  std::vector<std::size_t> parts;
  std::vector<bool> seen(p.size(), false);
  for (Vertex x = 0; x < p.size(); ++x) {
    if (seen[x]) continue;
    std::size_t len = 0;
    Vertex y = x;
    do {
      seen[y] = true;
      y = p(y);
      ++len;
    } while (y != x);
    if (len >= 2) parts.push_back(len);
  }
  return CycleType(std::move(parts));
}

std::vector<Permutation> enumerate_class(const CycleType& type,
                                         std::span<const Vertex> labels,
                                         std::size_t n) {
  type.fixed_points(labels.size());
  std::vector<Vertex> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Vertex> img = sorted;
  std::vector<Permutation> out;
  do {
    Permutation p(n);
    for (std::size_t i = 0; i < sorted.size(); ++i) p.raw()[sorted[i]] = img[i];
    if (cycle_type_of(p) == type) out.push_back(std::move(p));
  } while (std::next_permutation(img.begin(), img.end()));
  return out;
}

void sample_class_into(const CycleType& type, std::span<const Vertex> labels,
                       Rng& rng, Permutation& out, std::vector<Vertex>& scratch) {
  scratch.assign(labels.begin(), labels.end());
  for (std::size_t i = scratch.size(); i > 1; --i)
    std::swap(scratch[i - 1], scratch[uniform_index(rng, i)]);
  auto& img = out.raw();
  std::size_t pos = 0;
  for (std::size_t len : type.parts()) {
    for (std::size_t k = 0; k < len; ++k)
      img[scratch[pos + k]] = scratch[pos + (k + 1) % len];
    pos += len;
  }
  for (; pos < scratch.size(); ++pos) img[scratch[pos]] = scratch[pos];
}

Permutation sample_class(const CycleType& type, std::span<const Vertex> labels,
                         std::size_t n, Rng& rng) {
  type.fixed_points(labels.size());
  for (Vertex v : labels)
    if (v >= n) throw InvalidInput("sample_class: label out of range");
  Permutation p(n);
  std::vector<Vertex> scratch;
  sample_class_into(type, labels, rng, p, scratch);
  return p;
}

// ---------------------------------------------------------------------------
// Decomposition

CyclicDecomposition decompose(const Permutation& p) {
  CyclicDecomposition d;
  d.n = p.size();
  std::vector<bool> seen(p.size(), false);
  for (Vertex x = 0; x < p.size(); ++x) {
    if (seen[x] || p(x) == x) continue;
    // Scanning upwards means x is the minimum of its cycle.
    Cycle c;
    Vertex y = x;
    do {
      seen[y] = true;
      c.elems.push_back(y);
      y = p(y);
    } while (y != x);
    if (c.elems.size() == 2)
      d.rho0.push_back({c.elems[0], c.elems[1]});
    else
      d.cycles.push_back(std::move(c));
  }
  // Shorter cycles first, ties by minimal element. The scan already orders
  // by minimum, so a stable sort on length suffices.
  std::stable_sort(d.cycles.begin(), d.cycles.end(),
                   [](const Cycle& a, const Cycle& b) { return a.length() < b.length(); });
  return d;
}

Permutation recompose(const CyclicDecomposition& d) {
  std::vector<std::vector<Vertex>> cycles;
  for (const auto& t : d.rho0) {
    if (t.lo >= t.hi) throw InvalidInput("transposition must satisfy lo < hi");
    cycles.push_back({t.lo, t.hi});
  }
  for (const auto& c : d.cycles) {
    if (c.length() < 3) throw InvalidInput("cycles in a decomposition must have length >= 3");
    cycles.push_back(c.elems);
  }
  return Permutation::from_cycles(d.n, cycles);
}

// ---------------------------------------------------------------------------
// Rewriting maps

bool ASelection::empty() const noexcept {
  if (!a0.empty()) return false;
  for (const auto& s : cycles)
    if (!s.empty()) return false;
  return true;
}

std::string to_string(const ASelection& a) {
  auto set = [](const IndexSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(s[i]);
    }
    return out + "}";
  };
  std::string out = "(" + set(a.a0);
  for (const auto& s : a.cycles) out += "," + set(s);
  return out + ")";
}

namespace {

void require_strictly_increasing(const IndexSet& a) {
  for (std::size_t i = 1; i < a.size(); ++i)
    if (a[i] <= a[i - 1]) throw InvalidInput("index set must be strictly increasing");
}

}  // namespace

std::vector<std::size_t> cycle_window(std::size_t d, std::size_t i) {
  if (d == 3) {
    if (i != 0) throw InvalidInput("3-cycles only admit index 0");
    return {0, 1, 2};
  }
  const std::size_t dq = quarter(d);
  if (d < 3 || i < 1 || i > dq) throw InvalidInput("cycle window index out of range");
  return {2 * i - 2, 2 * i - 1, 2 * dq + 2 * i - 2, 2 * dq + 2 * i - 1};
}

std::vector<std::size_t> beta_index_map(std::size_t d, const IndexSet& a) {
  if (d < 3) throw InvalidInput("beta maps need a cycle of length >= 3");
  require_strictly_increasing(a);
  std::vector<std::size_t> map(d);
  std::iota(map.begin(), map.end(), std::size_t{0});
  const std::size_t dq = quarter(d);
  for (std::size_t i : a) {
    if (d == 3) {
      if (i != 0) throw InvalidInput("3-cycles only admit index 0");
      std::swap(map[1], map[2]);
    } else {
      if (i < 1 || i > dq)
        throw InvalidInput("index " + std::to_string(i) + " outside [1, " + std::to_string(dq) + "]");
      std::swap(map[2 * i - 1], map[2 * dq + 2 * i - 1]);
    }
  }
  return map;
}

Cycle beta_cycle(const IndexSet& a, const Cycle& rho) {
  const auto map = beta_index_map(rho.length(), a);
  Cycle out;
  out.elems.resize(rho.length());
  for (std::size_t j = 0; j < rho.length(); ++j) out.elems[j] = rho.elems[map[j]];
  return out;
}

std::vector<Transposition> beta_trans(const IndexSet& a,
                                      const std::vector<Transposition>& rho0) {
  require_strictly_increasing(a);
  Vertex top = 0;
  for (std::size_t i = 0; i < rho0.size(); ++i) {
    if (rho0[i].lo >= rho0[i].hi) throw InvalidInput("transposition must satisfy lo < hi");
    if (i > 0 && rho0[i].lo <= rho0[i - 1].lo)
      throw InvalidInput("transpositions are not in canonical order");
    top = std::max(top, rho0[i].hi);
  }
  const std::size_t blocks = rho0.size() / 2;
  for (std::size_t i : a)
    if (i < 1 || i > blocks)
      throw InvalidInput("transposition block index " + std::to_string(i) + " out of range");
  if (a.empty()) return rho0;

  CyclicDecomposition d;
  d.n = std::size_t{top} + 1;
  d.rho0 = rho0;
  const Permutation sigma = recompose(d);  // also rejects overlapping pairs
  std::vector<std::vector<Vertex>> modifier;
  for (std::size_t i : a) {
    const Vertex a1 = rho0[2 * i - 2].lo, a2 = rho0[2 * i - 2].hi;
    const Vertex a3 = rho0[2 * i - 1].lo, a4 = rho0[2 * i - 1].hi;
    if (a3 < a2) {
      modifier.push_back({a1, a3});
      modifier.push_back({a2, a4});
    }
  }
  const Permutation tau = Permutation::from_cycles(d.n, modifier);
  return decompose(compose(sigma, tau)).rho0;
}

Permutation beta_tilde(const ASelection& a, const Permutation& sigma) {
  CyclicDecomposition d = decompose(sigma);
  if (a.cycles.size() != d.K())
    throw InvalidInput("selection has " + std::to_string(a.cycles.size()) +
                       " cycle slots but the permutation has " + std::to_string(d.K()));
  d.rho0 = beta_trans(a.a0, d.rho0);
  for (std::size_t i = 0; i < d.K(); ++i) d.cycles[i] = beta_cycle(a.cycles[i], d.cycles[i]);
  return recompose(d);
}

namespace {

bool is_one_three_split(std::span<const Colour> colour, std::span<const Vertex> window) {
  std::size_t r = 0, w = 0;
  for (Vertex v : window) {
    if (colour[v] == Colour::red) ++r;
    else if (colour[v] == Colour::white) ++w;
  }
  if (window.size() == 3) return (r == 1 && w == 2) || (r == 2 && w == 1);
  return (r == 1 && w == 3) || (r == 3 && w == 1);
}

}  // namespace

ASelection build_A(std::span<const Colour> colour, const Permutation& sigma) {
  if (colour.size() < sigma.size()) throw InvalidInput("colour table smaller than permutation domain");
  const CyclicDecomposition d = decompose(sigma);
  ASelection a;
  for (std::size_t j = 1; j <= d.rho0.size() / 2; ++j) {
    const Vertex win[4] = {d.rho0[2 * j - 2].lo, d.rho0[2 * j - 2].hi,
                           d.rho0[2 * j - 1].lo, d.rho0[2 * j - 1].hi};
    if (is_one_three_split(colour, win)) a.a0.push_back(j);
  }
  a.cycles.resize(d.K());
  std::vector<Vertex> win;
  for (std::size_t i = 0; i < d.K(); ++i) {
    const Cycle& c = d.cycles[i];
    const std::size_t len = c.length();
    if (len == 3) {
      if (is_one_three_split(colour, c.elems)) a.cycles[i].push_back(0);
      continue;
    }
    for (std::size_t j = 1; j <= quarter(len); ++j) {
      win.clear();
      for (std::size_t e : cycle_window(len, j)) win.push_back(c.elems[e]);
      if (is_one_three_split(colour, win)) a.cycles[i].push_back(j);
    }
  }
  return a;
}

ASelection build_A(std::span<const Vertex> red, std::span<const Vertex> white,
                   const Permutation& sigma) {
  std::vector<Colour> colour(sigma.size(), Colour::black);
  for (Vertex v : red) {
    if (v >= sigma.size()) throw InvalidInput("red vertex out of range");
    colour[v] = Colour::red;
  }
  for (Vertex v : white) {
    if (v >= sigma.size()) throw InvalidInput("white vertex out of range");
    if (colour[v] == Colour::red) throw InvalidInput("R and W must be disjoint");
    colour[v] = Colour::white;
  }
  return build_A(colour, sigma);
}

}  // namespace hyperex
