#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "support.hpp"

#include "hyperex/engine.hpp"
#include "hyperex/errors.hpp"
#include "hyperex/exact.hpp"

using namespace hyperex;
using testing_support::same_measure;

namespace {

std::vector<Vertex> sorted(std::vector<Vertex> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<Vertex> key(const Permutation& p) { return {p.one_line().begin(), p.one_line().end()}; }

double empirical_tv(const std::map<std::vector<Vertex>, int>& a, const std::map<std::vector<Vertex>, int>& b,
                    double n) {
  std::map<std::vector<Vertex>, double> diff;
  for (const auto& [k, c] : a) diff[k] += c / n;
  for (const auto& [k, c] : b) diff[k] -= c / n;
  double s = 0.0;
  for (const auto& [k, d] : diff) s += std::abs(d);
  return s / 2;
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("event counts are Poisson and laziness coins are fair") {
  const Model m = square_model(0.3);
  const int streams = 10000;
  double sum = 0.0;
  std::size_t heads = 0, total = 0;
  for (int s = 0; s < streams; ++s) {
    const EventStream st = gen_events(m, 10.0, false, 99, s);
    sum += static_cast<double>(st.events.size());
    for (std::size_t i = 1; i < st.events.size(); ++i) CHECK(st.events[i - 1].time < st.events[i].time);
    for (const auto& e : st.events) {
      CHECK(e.theta);
      CHECK(e.time <= 10.0);
    }
    const EventStream lz = gen_events(m, 10.0, true, 99, s);
    for (const auto& e : lz.events) heads += e.theta;
    total += lz.events.size();
  }
  CHECK(std::abs(sum / streams - 10.0) < 3 * std::sqrt(10.0 / streams));
  const double frac = static_cast<double>(heads) / static_cast<double>(total);
  CHECK(std::abs(frac - 0.5) < 3 * std::sqrt(0.25 / static_cast<double>(total)));
  // lazy streams run at twice the rate
  CHECK(std::abs(static_cast<double>(total) / streams - 20.0) < 3 * std::sqrt(20.0 / streams));
}

TEST_CASE("edges are uniform and permutations follow the edge measure") {
  const Model m = testing_support::make_model(
      5, {{0, 1, 2}, {2, 3, 4}}, {{{"3", 1.0}}, {{"2", 0.4}, {"3", 0.6}}});
  const EventStream st = gen_events(m, 20000.0, false, 1, 0);
  std::size_t on0 = 0, twos = 0, on1 = 0;
  for (const auto& e : st.events) {
    const auto& edge = m.graph.edge(e.edge);
    for (Vertex v : e.sigma.support()) CHECK(std::find(edge.begin(), edge.end(), v) != edge.end());
    if (e.edge == 0) {
      ++on0;
      CHECK(cycle_type_of(e.sigma) == CycleType::parse("3"));
    } else {
      ++on1;
      twos += cycle_type_of(e.sigma) == CycleType::parse("2");
    }
  }
  const double n = static_cast<double>(st.events.size());
  CHECK(std::abs(on0 / n - 0.5) < 3 * std::sqrt(0.25 / n));
  CHECK(std::abs(twos / double(on1) - 0.4) < 3 * std::sqrt(0.24 / on1));
}

TEST_CASE("streams replay from their descriptor") {
  const Model m = square_model(0.3);
  const EventStream a = gen_events(m, 5.0, true, 1234, 7);
  const EventStream b = replay(m, a.descriptor);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].time == b.events[i].time);
    CHECK(a.events[i].sigma == b.events[i].sigma);
    CHECK(a.events[i].theta == b.events[i].theta);
  }
  CHECK(gen_events(m, 0.0, false, 1, 0).events.empty());
  CHECK(gen_events(m, 5.0, false, 1234, 8).events.front().time != a.events.front().time);
}

TEST_CASE("interval maps: identity, cocycle and range checks") {
  const Model m = testing_support::corpus_model("prism6.json");
  Rng rng(17);
  for (int r = 0; r < 200; ++r) {
    const bool lazy = r % 2;
    const EventStream st = gen_events(m, 8.0, lazy, 5, r);
    double s = 8.0 * uniform01(rng), t = 8.0 * uniform01(rng);
    if (s > t) std::swap(s, t);
    CHECK(interval_map(st, t, t).perm.is_identity());
    const Permutation whole = interval_map(st, 0.0, t).perm;
    CHECK(whole == compose(interval_map(st, s, t).perm, interval_map(st, 0.0, s).perm));
    // direct composition oracle
    Permutation direct(m.num_vertices());
    for (const auto& e : st.events)
      if (e.time <= t && e.theta) direct = compose(e.sigma, direct);
    CHECK(direct == whole);
  }
  const EventStream st = gen_events(m, 3.0, false, 5, 0);
  CHECK_THROWS_AS(interval_map(st, 2.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(interval_map(st, -1.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(interval_map(st, 0.0, 4.0), InvalidInput);

  EventStream lazy = gen_events(m, 3.0, true, 5, 1);
  for (auto& e : lazy.events) e.theta = false;
  CHECK(interval_map(lazy, 0.0, 3.0).perm.is_identity());
}

TEST_CASE("unlabelled IP equals EX on shared streams") {
  const Model m = testing_support::corpus_model("ring6_quads.json");
  for (int r = 0; r < 100; ++r) {
    const EventStream st = gen_events(m, 6.0, r % 2, 3, r);
    const std::vector<Vertex> x{4, 0, 2};
    const Trajectory ip = evolve(StateKind::ip, x, st);
    const Trajectory ex = evolve(StateKind::ex, x, st);
    REQUIRE(ip.points.size() == ex.points.size());
    for (std::size_t i = 0; i < ip.points.size(); ++i) {
      CHECK(sorted(ip.points[i].state) == ex.points[i].state);
      CHECK(ip.points[i].time == ex.points[i].time);
    }
    // lifting the interval map gives the same state
    const double t = ip.points.back().time;
    const Permutation I = interval_map(st, 0.0, t).perm;
    CHECK(ip.at(t) == std::vector<Vertex>{I(4), I(0), I(2)});
  }
}

TEST_CASE("evolve: empty stream, bad input") {
  const Model m = square_model(0.3);
  const EventStream empty = gen_events(m, 0.0, false, 1, 0);
  const Trajectory tr = evolve(StateKind::ip, std::vector<Vertex>{2, 0}, empty);
  CHECK(tr.points.size() == 1);
  CHECK(tr.at(100.0) == std::vector<Vertex>{2, 0});
  CHECK_THROWS_AS(evolve(StateKind::ip, std::vector<Vertex>{1, 1}, empty), InvalidInput);
  CHECK_THROWS_AS(evolve(StateKind::rwk, std::vector<Vertex>{1, 1}, empty), InvalidInput);
  CHECK_THROWS_AS(evolve(StateKind::rw, std::vector<Vertex>{9}, empty), InvalidInput);
}

TEST_CASE("random walk on the double-transposition square") {
  const Model m = square_model(0.0);
  const int n = 40000;
  int home = 0;
  for (int r = 0; r < n; ++r) {
    const EventStream st = gen_events(m, 1.0, false, 21, r);
    home += evolve(StateKind::rw, std::vector<Vertex>{0}, st).at(1.0)[0] == 0;
  }
  const double exact = 0.25 + 0.75 * std::exp(-4.0 / 3.0);
  CHECK(std::abs(home / double(n) - exact) < 3 * std::sqrt(exact * (1 - exact) / n));
}

TEST_CASE("independent walkers are single walkers on their own streams") {
  const Model m = testing_support::corpus_model("cycle5_pairs.json");
  const std::vector<Vertex> init{0, 0, 3};
  const Trajectory all = evolve_rwk(m, init, 5.0, 77, 10);
  for (std::size_t i = 0; i < init.size(); ++i) {
    const Trajectory one = evolve(StateKind::rw, std::vector<Vertex>{init[i]}, gen_events(m, 5.0, false, 77, 10 + i));
    for (double t : {0.0, 0.7, 1.9, 3.3, 5.0}) CHECK(all.at(t)[i] == one.at(t)[0]);
  }
}

TEST_CASE("lazy streams have the same interval-map law, which is inversion invariant") {
  const Model m = square_model(0.3);
  const int n = 100000;
  std::map<std::vector<Vertex>, int> std_law, lazy_law, inv_law;
  for (int r = 0; r < n; ++r) {
    const Permutation a = interval_map(gen_events(m, 1.0, false, 8, r), 0.0, 1.0).perm;
    const Permutation b = interval_map(gen_events(m, 1.0, true, 9, r), 0.0, 1.0).perm;
    ++std_law[key(a)];
    ++lazy_law[key(b)];
    ++inv_law[key(a.inverse())];
  }
  CHECK(empirical_tv(std_law, lazy_law, n) < 0.02);
  CHECK(empirical_tv(std_law, inv_law, n) < 0.02);
}

TEST_CASE("meeting times on a single edge are exponential races") {
  const Model m = square_model(0.3);
  const int n = 20000;
  double two = 0.0, four = 0.0;
  for (int r = 0; r < n; ++r) {
    EventSource a(m, 4, 2 * r, false), b(m, 4, 2 * r + 1, false);
    const auto t = meeting_time(m, {0, 1}, a, b, 1e9);
    REQUIRE(t.has_value());
    two += *t;
    std::array<EventSource, 4> src{EventSource(m, 5, 4 * r, false), EventSource(m, 5, 4 * r + 1, false),
                                   EventSource(m, 5, 4 * r + 2, false), EventSource(m, 5, 4 * r + 3, false)};
    const auto u = bar_meeting_time(m, {0, 1, 2, 3}, std::span<EventSource, 4>(src), 1e9);
    REQUIRE(u.has_value());
    four += *u;
  }
  // Exp(2) has mean 1/2 and sd 1/2; Exp(4) has mean 1/4 and sd 1/4.
  CHECK(std::abs(two / n - 0.5) < 3 * 0.5 / std::sqrt(n));
  CHECK(std::abs(four / n - 0.25) < 3 * 0.25 / std::sqrt(n));
  Rng rng(1);
  CHECK_FALSE(meeting_time(m, {0, 1}, rng, 0.0).has_value());
  CHECK_FALSE(bar_meeting_time(m, {0, 1, 2, 3}, rng, 0.0).has_value());
  CHECK_THROWS_AS(bar_meeting_time(m, {0, 1, 2, 2}, rng, 1.0), InvalidInput);
}

TEST_CASE("meeting time law matches the exact absorbing chain") {
  const Model m = testing_support::make_model(5, {{0, 1, 2}, {2, 3, 4}},
                                              {{{"3", 0.5}, {"2", 0.5}}, {{"3", 0.5}, {"2", 0.5}}});
  const int n = 100000;
  std::vector<double> samples;
  for (int r = 0; r < n; ++r) {
    EventSource a(m, 6, 2 * r, false), b(m, 6, 2 * r + 1, false);
    samples.push_back(meeting_time(m, {0, 4}, a, b, 1e9).value());
  }
  std::sort(samples.begin(), samples.end());
  std::vector<double> grid;
  for (int i = 1; i <= 400; ++i) grid.push_back(samples[static_cast<std::size_t>(i * (n - 1) / 401)]);
  const auto survival = meeting_survival(m, {0, 4}, grid);
  double ks = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double emp = static_cast<double>(std::upper_bound(samples.begin(), samples.end(), grid[i]) - samples.begin()) / n;
    ks = std::max(ks, std::abs(emp - (1.0 - survival[i])));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("bar meeting time is the earliest pairwise meeting on shared streams") {
  const Model m = testing_support::corpus_model("cycle5_pairs.json");
  for (int r = 0; r < 500; ++r) {
    const std::array<Vertex, 4> x{0, 1, 2, 4};
    auto source = [&](int i) { return EventSource(m, 31, 4 * r + i, false); };
    std::array<EventSource, 4> src{source(0), source(1), source(2), source(3)};
    const auto bar = bar_meeting_time(m, x, std::span<EventSource, 4>(src), 50.0);
    std::optional<double> best;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        EventSource a = source(i), b = source(j);
        const auto t = meeting_time(m, {x[i], x[j]}, a, b, 50.0);
        if (t && (!best || *t < *best)) best = t;
      }
    CHECK(bar.has_value() == best.has_value());
    if (bar && best) CHECK(*bar == *best);
  }
}

TEST_CASE("Wilson intervals") {
  const auto [lo, hi] = wilson_interval(0, 10, 1.96);
  CHECK(lo == doctest::Approx(0.0));
  CHECK(hi == doctest::Approx(3.8416 / 13.8416).epsilon(1e-12));
  const auto [lo2, hi2] = wilson_interval(50, 100, 1.96);
  CHECK(lo2 == doctest::Approx(0.5 - 1.96 / 103.8416 * std::sqrt(25.0 + 0.9604)).epsilon(1e-12));
  CHECK(hi2 == doctest::Approx(1.0 - lo2).epsilon(1e-12));
}

TEST_CASE("easy classification") {
  const Model m = square_model(0.3);
  const EasyVerdict desk = classify_easy(m, EasyConfig::desk_preset());
  CHECK(desk.easy);
  CHECK(desk.pairs.size() == 16);
  CHECK(desk.threshold == doctest::Approx(100.0 * desk.t_ex2));
  CHECK(desk.t_ex2 == doctest::Approx(mixing_time(StateKind::ex, m, 2, 0.25).time));

  EasyConfig all = EasyConfig::desk_preset();
  all.c_prob = 1.0;
  all.c_time = 1e-9;
  all.replicas = 100;
  CHECK(classify_easy(m, all).easy);

  EasyConfig never = EasyConfig::desk_preset();
  never.c_time = 0.0;
  never.replicas = 100;
  const EasyVerdict v = classify_easy(m, never);
  CHECK_FALSE(v.easy);
  CHECK(v.worst.exceed == v.worst.replicas);

  EasyConfig supplied;
  supplied.t_ex2 = 1.0;
  supplied.replicas = 10;
  CHECK(classify_easy(square_model(0.0), supplied).t_ex2 == 1.0);
  CHECK_THROWS_AS(classify_easy(square_model(0.0), EasyConfig{}), InvalidInput);
}

}  // TEST_SUITE
