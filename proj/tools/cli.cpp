#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"

#include "hyperex/chameleon.hpp"
#include "hyperex/engine.hpp"
#include "hyperex/errors.hpp"
#include "hyperex/exact.hpp"
#include "hyperex/io.hpp"

namespace hyperex::cli {

using ojson = nlohmann::ordered_json;

namespace {

// A table cell: text, or a number tagged with how it was obtained.
struct Num {
  double value = 0.0;
  std::string method;  // "exact" or "monte-carlo"
  std::optional<double> se;
};
using Cell = std::variant<std::string, Num, std::int64_t, bool>;

Num exact(double v) { return {v, "exact", std::nullopt}; }
Num mc(double v, double se) { return {v, "monte-carlo", se}; }

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

ojson cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> ojson {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Num>) {
          ojson j{{"value", std::isfinite(v.value) ? ojson(v.value) : ojson(nullptr)},
                  {"method", v.method}};
          if (v.se) j["se"] = *v.se;
          return j;
        } else {
          return ojson(v);
        }
      },
      c);
}

std::string cell_csv(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Num>) {
          std::ostringstream s;
          s << std::setprecision(12) << v.value;
          return s.str();
        } else if constexpr (std::is_same_v<V, std::string>) {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string q = "\"";
          for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          return q + "\"";
        } else if constexpr (std::is_same_v<V, bool>) {
          return v ? "true" : "false";
        } else {
          return std::to_string(v);
        }
      },
      c);
}

struct Options {
  std::string model_path;
  std::uint64_t seed = 1;
  std::vector<std::size_t> k;
  std::vector<double> eps;
  std::size_t replicas = 0;
  bool replicas_set = false;
  double horizon = -1.0;
  double phase_length = -1.0;
  bool modified = false;
  unsigned threads = 1;
  bool deterministic = false;
  std::string output;
  std::string format = "json";
  // subcommand specifics
  std::vector<std::string> kinds;
  std::vector<long long> start;
  std::string what = "trajectory";
  std::string process = "ex";
  bool lazy = false;
  std::vector<double> probes;
  double max_unabsorbed = 0.0;
  std::string experiment;
  std::vector<double> times;
  std::vector<double> deltas;
  double c_time = -1.0;
  double c_prob = -1.0;
  bool desk_preset = false;
  std::size_t cap = kDefaultStateCap;
};

class Report {
 public:
  Report(std::string command, const Options& o) : command_(std::move(command)), opt_(o) {
    config_ = ojson::object();
  }
  ojson& config() { return config_; }
  ojson& summary() { return summary_; }
  void add(Table t) { tables_.push_back(std::move(t)); }

  void write(std::ostream& out) const {
    if (opt_.format == "csv") {
      for (const auto& t : tables_) {
        out << "# " << t.name << "\n";
        for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
        out << ",method\n";
        for (const auto& row : t.rows) {
          std::string method;
          for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << cell_csv(row[i]);
            if (const Num* n = std::get_if<Num>(&row[i])) {
              if (method.empty() || method == n->method) method = n->method;
              else method = "mixed";
            }
          }
          out << "," << method << "\n";
        }
      }
      return;
    }
    ojson j;
    j["command"] = command_;
    j["seed"] = opt_.seed;
    j["config"] = config_;
    if (!opt_.deterministic) {
      const auto now = std::chrono::system_clock::now().time_since_epoch();
      j["generated_at_unix"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();
    }
    if (!summary_.is_null()) j["summary"] = summary_;
    ojson tables = ojson::object();
    for (const auto& t : tables_) {
      ojson rows = ojson::array();
      for (const auto& row : t.rows) {
        ojson r = ojson::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(r));
      }
      tables[t.name] = std::move(rows);
    }
    j["tables"] = std::move(tables);
    out << j.dump(2) << "\n";
  }

 private:
  std::string command_;
  const Options& opt_;
  ojson config_;
  ojson summary_;
  std::vector<Table> tables_;
};

ojson base_config(const Options& o) {
  ojson c;
  c["model"] = o.model_path;
  c["seed"] = o.seed;
  c["threads"] = o.threads;
  c["deterministic"] = o.deterministic;
  c["format"] = o.format;
  c["state_cap"] = o.cap;
  return c;
}

std::vector<Vertex> to_indices(const Model& m, const std::vector<long long>& labels) {
  std::vector<Vertex> out;
  for (long long l : labels) out.push_back(m.graph.index_of(l));
  return out;
}

ojson labels_json(const Model& m, std::span<const Vertex> vs) {
  ojson a = ojson::array();
  for (Vertex v : vs) a.push_back(m.graph.label(v));
  return a;
}

std::string labels_text(const Model& m, std::span<const Vertex> vs) {
  std::string s;
  for (Vertex v : vs) s += (s.empty() ? "" : " ") + std::to_string(m.graph.label(v));
  return s;
}

NamedModel need_model(const Options& o) {
  if (o.model_path.empty()) throw CLI::RequiredError("--model");
  return load_model(o.model_path);
}

// ---------------------------------------------------------------------------

int cmd_validate(const Options& o, Report& rep) {
  const auto [name, m] = need_model(o);
  const ValidationReport v = validate(m, o.k, o.cap);
  rep.config() = base_config(o);
  rep.config()["k"] = o.k;
  Table checks{"checks", {"check", "pass", "value"}, {}};
  checks.rows.push_back({std::string("class-function"), v.class_function, exact(1.0)});
  checks.rows.push_back({std::string("fixed-point probability"), v.fixed_point_ok, exact(v.max_fixed_point_prob)});
  checks.rows.push_back({std::string("regularity"), v.regular,
                         exact(static_cast<double>(*std::max_element(v.degrees.begin(), v.degrees.end())))});
  for (const auto& row : v.irreducibility)
    checks.rows.push_back({"irreducibility k=" + std::to_string(row.k), row.irreducible.value_or(false),
                           row.irreducible ? Cell(exact(*row.irreducible ? 1.0 : 0.0))
                                           : Cell(std::string("undecided: " + row.note))});
  rep.add(std::move(checks));
  rep.summary() = {{"model", name}, {"all_pass", v.all_pass()}, {"failures", v.failures()}};
  return v.all_pass() ? kOk : kFailed;
}

int cmd_mix(const Options& o, Report& rep) {
  const auto [name, m] = need_model(o);
  const std::size_t n = m.num_vertices();
  std::vector<std::string> kinds = o.kinds.empty() ? std::vector<std::string>{"rw", "ex", "ip"} : o.kinds;
  std::vector<std::size_t> ks = o.k;
  if (ks.empty())
    for (std::size_t k = 1; k + 1 <= n; ++k) ks.push_back(k);
  std::vector<double> eps = o.eps.empty() ? std::vector<double>{0.25} : o.eps;

  rep.config() = base_config(o);
  rep.config()["kinds"] = kinds;
  rep.config()["k"] = ks;
  rep.config()["eps"] = eps;

  std::optional<double> t_ex2;
  try {
    if (n >= 3) t_ex2 = mixing_time(StateKind::ex, m, 2, 0.25, o.cap).time;
  } catch (const StateCapExceeded&) {
  } catch (const ReducibleChain&) {
  }

  Table t{"mixing_times",
          {"kind", "k", "eps", "time", "bracket_hi", "tolerance", "states", "ratio_reported_not_asserted", "note"},
          {}};
  bool reducible = false;
  std::string reducible_msg;
  for (const auto& kname : kinds) {
    const StateKind kind = parse_state_kind(kname);
    const std::vector<std::size_t> row_ks = kind == StateKind::rw ? std::vector<std::size_t>{1} : ks;
    for (std::size_t k : row_ks) {
      for (double e : eps) {
        std::vector<Cell> row{kname, static_cast<std::int64_t>(k), exact(e)};
        try {
          const MixingResult r = mixing_time(kind, m, k, e, o.cap);
          row.push_back(Num{r.time, "exact", r.tolerance});
          row.push_back(exact(r.bracket_hi));
          row.push_back(exact(r.tolerance));
          row.push_back(static_cast<std::int64_t>(r.states));
          if (kind == StateKind::ex && t_ex2 && *t_ex2 > 0.0)
            row.push_back(exact(r.time / (std::log(static_cast<double>(n) / e) * *t_ex2)));
          else
            row.push_back(std::string("-"));
          row.push_back(std::string(r.method));
        } catch (const StateCapExceeded& ex) {
          row.insert(row.end(), {std::string("-"), std::string("-"), std::string("-"),
                                 std::int64_t{-1}, std::string("-"),
                                 std::string("skipped: ") + ex.what()});
        } catch (const ReducibleChain& ex) {
          reducible = true;
          reducible_msg = ex.what();
          row.insert(row.end(), {std::string("-"), std::string("-"), std::string("-"),
                                 std::int64_t{-1}, std::string("-"), std::string("error: ") + ex.what()});
        }
        t.rows.push_back(std::move(row));
      }
    }
  }
  rep.add(std::move(t));
  rep.summary() = {{"model", name}, {"t_ex2_quarter", t_ex2 ? ojson(*t_ex2) : ojson(nullptr)}};
  if (reducible) {
    rep.summary()["error"] = "irreducibility requirement violated: " + reducible_msg;
    return kFailed;
  }
  return kOk;
}

int cmd_simulate(const Options& o, Report& rep) {
  const auto [name, m] = need_model(o);
  const std::vector<Vertex> start = to_indices(m, o.start);
  const double horizon = o.horizon >= 0.0 ? o.horizon : 10.0;
  rep.config() = base_config(o);
  rep.config()["what"] = o.what;
  rep.config()["start"] = o.start;
  rep.config()["horizon"] = horizon;

  if (o.what == "trajectory") {
    const StateKind kind = parse_state_kind(o.process);
    rep.config()["process"] = o.process;
    rep.config()["lazy"] = o.lazy;
    Trajectory tr;
    ojson streams = ojson::array();
    if (kind == StateKind::rwk) {
      tr = evolve_rwk(m, start, horizon, o.seed, 0);
      for (std::size_t i = 0; i < start.size(); ++i)
        streams.push_back({{"seed", o.seed}, {"stream_id", i}, {"horizon", horizon}, {"lazy", false}});
    } else {
      const EventStream s = gen_events(m, horizon, o.lazy, o.seed, 0);
      tr = evolve(kind, start, s);
      streams.push_back({{"seed", o.seed}, {"stream_id", 0}, {"horizon", horizon}, {"lazy", o.lazy}});
    }
    rep.config()["streams"] = streams;
    Table t{"trajectory", {"time", "state"}, {}};
    for (const auto& p : tr.points) t.rows.push_back({Num{p.time, "monte-carlo", std::nullopt}, labels_text(m, p.state)});
    rep.add(std::move(t));
    return kOk;
  }

  const bool bar = o.what == "bar-meeting";
  if (!bar && o.what != "meeting") throw CLI::ValidationError("--what", "expected trajectory, meeting or bar-meeting");
  if (start.size() != (bar ? 4u : 2u))
    throw CLI::ValidationError("--start", bar ? "bar-meeting needs four vertices" : "meeting needs two vertices");
  const std::size_t replicas = o.replicas_set ? o.replicas : 1000;
  rep.config()["n_replicas"] = replicas;
  rep.config()["stream_ids"] = bar ? "4r .. 4r+3 for replica r" : "2r, 2r+1 for replica r";
  double sum = 0.0, sum_sq = 0.0;
  std::size_t met = 0;
  Table samples{"samples", {"replica", "time"}, {}};
  for (std::size_t r = 0; r < replicas; ++r) {
    std::optional<double> t;
    if (bar) {
      std::array<EventSource, 4> src{EventSource(m, o.seed, 4 * r, false), EventSource(m, o.seed, 4 * r + 1, false),
                                     EventSource(m, o.seed, 4 * r + 2, false), EventSource(m, o.seed, 4 * r + 3, false)};
      t = bar_meeting_time(m, {start[0], start[1], start[2], start[3]}, std::span<EventSource, 4>(src), horizon);
    } else {
      EventSource a(m, o.seed, 2 * r, false), b(m, o.seed, 2 * r + 1, false);
      t = meeting_time(m, {start[0], start[1]}, a, b, horizon);
    }
    if (t) {
      ++met;
      sum += *t;
      sum_sq += *t * *t;
      samples.rows.push_back({static_cast<std::int64_t>(r), Num{*t, "monte-carlo", std::nullopt}});
    } else {
      samples.rows.push_back({static_cast<std::int64_t>(r), std::string("not-met")});
    }
  }
  const double mean = met ? sum / static_cast<double>(met) : 0.0;
  const double var = met > 1 ? (sum_sq - static_cast<double>(met) * mean * mean) / static_cast<double>(met - 1) : 0.0;
  const double se = met ? std::sqrt(std::max(0.0, var) / static_cast<double>(met)) : 0.0;
  Table summary{"meeting", {"replicas", "met", "mean_given_met"}, {}};
  summary.rows.push_back({static_cast<std::int64_t>(replicas), static_cast<std::int64_t>(met), mc(mean, se)});
  rep.add(std::move(summary));
  rep.add(std::move(samples));
  return kOk;
}

int cmd_chameleon(const Options& o, Report& rep) {
  const auto [name, m] = need_model(o);
  std::vector<Vertex> start = o.start.empty() ? std::vector<Vertex>{0, 1} : to_indices(m, o.start);
  const std::size_t k = start.size();
  const std::size_t replicas = o.replicas_set ? o.replicas : 10000;

  BatchOptions b;
  b.run.phase_length = o.phase_length > 0.0 ? o.phase_length : default_phase_length(m);
  const double T = b.run.phase_length;
  b.run.horizon = o.horizon >= 0.0 ? o.horizon : 1000.0 * T;
  b.run.modified = o.modified;
  b.run.probes = o.probes.empty() ? std::vector<double>{T, 2 * T, 4 * T} : o.probes;
  std::sort(b.run.probes.begin(), b.run.probes.end());
  b.run.check_invariants = true;
  b.replicas = replicas;
  b.seed = o.seed;
  b.threads = o.threads;

  rep.config() = base_config(o);
  rep.config()["start"] = labels_json(m, start);
  rep.config()["n_replicas"] = replicas;
  rep.config()["phase_length"] = T;
  rep.config()["phase_length_source"] = o.phase_length > 0.0 ? "user" : "20 * T_EX(4)(1/4), exact";
  rep.config()["horizon"] = b.run.horizon;
  rep.config()["modified"] = o.modified;
  rep.config()["probes"] = b.run.probes;
  rep.config()["max_unabsorbed"] = o.max_unabsorbed;
  rep.config()["stream_ids"] = "replica r: movement 2r, coins 2r+1";

  if (replicas == 0) {
    rep.summary() = {{"model", name}, {"replicas", 0}};
    return kOk;
  }
  const BatchResult r = run_batch(m, start, b);
  const double target = 1.0 / static_cast<double>(m.num_vertices() - k + 1);
  const auto [lo, hi] = wilson_interval(r.fill, r.replicas, 2.5758293035489004);
  const double p = r.fill_fraction();

  Table fill{"fill", {"replicas", "fill", "empty", "unabsorbed", "fill_fraction", "wilson99_lo", "wilson99_hi", "target"}, {}};
  fill.rows.push_back({static_cast<std::int64_t>(r.replicas), static_cast<std::int64_t>(r.fill),
                       static_cast<std::int64_t>(r.empty), static_cast<std::int64_t>(r.unabsorbed),
                       mc(p, std::sqrt(p * (1 - p) / static_cast<double>(r.replicas))), mc(lo, 0.0), mc(hi, 0.0),
                       exact(target)});
  rep.add(std::move(fill));

  Table ink{"ink", {"time", "mean", "within_4se_of_start"}, {}};
  bool martingale_ok = true;
  for (std::size_t i = 0; i < b.run.probes.size(); ++i) {
    const auto [mean, se] = r.ink_mean_se(i);
    const bool ok = std::abs(mean - 1.0) <= 4.0 * se + 1e-12;
    martingale_ok = martingale_ok && ok;
    ink.rows.push_back({exact(b.run.probes[i]), mc(mean, se), ok});
  }
  rep.add(std::move(ink));

  Table hist{"depinkings", {"j", "time", "count"}, {}};
  for (std::size_t j = 0; j < r.depink_histogram.size(); ++j)
    for (std::size_t i = 0; i < r.depink_histogram[j].size(); ++i)
      if (r.depink_histogram[j][i])
        hist.rows.push_back({static_cast<std::int64_t>(j + 1), exact(2.0 * static_cast<double>(i + 1) * T),
                             static_cast<std::int64_t>(r.depink_histogram[j][i])});
  rep.add(std::move(hist));

  const auto& inv = r.invariants;
  Table invt{"invariants", {"check", "violations", "enforced"}, {}};
  invt.rows.push_back({std::string("partition"), static_cast<std::int64_t>(inv.partition), true});
  invt.rows.push_back({std::string("red/white monotone between depinkings"), static_cast<std::int64_t>(inv.monotone), true});
  invt.rows.push_back({std::string("cap |P| <= min(|R|,|W|)"), static_cast<std::int64_t>(inv.cap), !o.modified});
  invt.rows.push_back({std::string("pinkened pairs one red one white"), static_cast<std::int64_t>(inv.pair_colours), true});
  invt.rows.push_back({std::string("ink conserved outside depinking"), static_cast<std::int64_t>(inv.ink), true});
  rep.add(std::move(invt));

  const double unabsorbed = static_cast<double>(r.unabsorbed) / static_cast<double>(r.replicas);
  const std::size_t violations =
      inv.partition + inv.monotone + inv.pair_colours + inv.ink + (o.modified ? 0 : inv.cap);
  rep.summary() = {{"model", name},
                   {"fill_ci_contains_target", lo <= target && target <= hi},
                   {"ink_martingale_ok", martingale_ok},
                   {"unabsorbed_fraction", unabsorbed},
                   {"invariant_violations", violations},
                   {"steps_checked", inv.steps}};
  if (unabsorbed > o.max_unabsorbed) {
    rep.summary()["error"] = "unabsorbed fraction above the limit; raise --horizon";
    return kFailed;
  }
  return violations ? kFailed : kOk;
}

int cmd_experiments(const Options& o, Report& rep, std::ostream& err) {
  rep.config() = base_config(o);
  rep.config()["experiment"] = o.experiment;
  if (o.experiment == "neg-corr") {
    const std::vector<double> times =
        o.times.empty() ? std::vector<double>{0.01, 0.05, 0.10, 0.20, 0.30} : o.times;
    rep.config()["times"] = times;
    const auto rows = neg_corr_experiment(times);
    Table t{"neg_corr",
            {"t", "walker_in_b", "product", "product_bound", "exclusion", "exclusion_bound", "bounds_ok", "strict"},
            {}};
    bool ok = true;
    for (const auto& r : rows) {
      if (r.t > 0.0 && r.t < 0.33) ok = ok && r.bounds_ok && r.strict;
      t.rows.push_back({exact(r.t), exact(r.walker_in_b), exact(r.product), exact(r.product_bound),
                        exact(r.exclusion), exact(r.exclusion_bound), r.bounds_ok, r.strict});
    }
    rep.add(std::move(t));
    rep.summary() = {{"all_hold", ok}};
    return ok ? kOk : kFailed;
  }
  if (o.experiment == "delta-ratio") {
    const std::vector<double> deltas =
        o.deltas.empty() ? std::vector<double>{1.0, 0.5, 0.1, 0.02, 0.0} : o.deltas;
    rep.config()["deltas"] = deltas;
    const auto rows = delta_ratio_experiments(deltas);
    Table t{"delta_ratio", {"delta", "ex2_over_ex1", "ip2_over_ex2", "note"}, {}};
    for (const auto& r : rows) {
      std::string note = r.square_error;
      if (!r.triangle_error.empty()) note += (note.empty() ? "" : "; ") + r.triangle_error;
      t.rows.push_back({exact(r.delta), r.ex2_over_ex1 ? Cell(exact(*r.ex2_over_ex1)) : Cell(std::string("-")),
                        r.ip2_over_ex2 ? Cell(exact(*r.ip2_over_ex2)) : Cell(std::string("-")), note});
    }
    rep.add(std::move(t));
    const bool mono = delta_ratios_monotone(rows);
    rep.summary() = {{"strictly_increasing_as_delta_decreases", mono}};
    return mono ? kOk : kFailed;
  }
  if (o.experiment == "easy-classify") {
    const auto [name, m] = need_model(o);
    EasyConfig cfg = o.desk_preset ? EasyConfig::desk_preset() : EasyConfig{};
    if (o.c_time >= 0.0) cfg.c_time = o.c_time;
    if (o.c_prob >= 0.0) cfg.c_prob = o.c_prob;
    if (o.replicas_set) cfg.replicas = o.replicas;
    cfg.seed = o.seed;
    const EasyVerdict v = classify_easy(m, cfg);
    rep.config()["c_time"] = cfg.c_time;
    rep.config()["c_prob"] = cfg.c_prob;
    rep.config()["n_replicas"] = cfg.replicas;
    rep.config()["constants"] = o.desk_preset ? "desk preset (not the asymptotic constants)" : "as given";
    rep.config()["wilson_z"] = cfg.z;
    rep.config()["stream_ids"] = "pair p, replica r: 2(p N + r) and 2(p N + r) + 1";
    Table t{"pairs", {"y1", "y2", "exceed", "replicas", "estimate", "wilson_hi"}, {}};
    for (const auto& p : v.pairs) {
      const double est = p.estimate;
      t.rows.push_back({static_cast<std::int64_t>(m.graph.label(p.y[0])), static_cast<std::int64_t>(m.graph.label(p.y[1])),
                        static_cast<std::int64_t>(p.exceed), static_cast<std::int64_t>(p.replicas),
                        mc(est, p.replicas ? std::sqrt(est * (1 - est) / static_cast<double>(p.replicas)) : 0.0),
                        mc(p.wilson_hi, 0.0)});
    }
    rep.add(std::move(t));
    rep.summary() = {{"model", name},
                     {"easy", v.easy},
                     {"t_ex2_quarter", v.t_ex2},
                     {"threshold", v.threshold},
                     {"worst_pair", labels_json(m, v.worst.y)},
                     {"worst_wilson_hi", v.worst.wilson_hi}};
    return kOk;
  }
  err << "unknown experiment '" << o.experiment << "'; valid names: neg-corr, delta-ratio, easy-classify\n";
  return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Random walk, exclusion, interchange and chameleon processes on hypergraphs"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI or TOML file with option values; flags win");

  app.add_option("--model", o.model_path, "Model JSON file");
  app.add_option("--seed", o.seed, "64-bit seed");
  app.add_option("--k", o.k, "Particle count(s)");
  app.add_option("--eps", o.eps, "Total-variation threshold(s)");
  auto* reps = app.add_option("--n-replicas", o.replicas, "Monte Carlo replicas");
  app.add_option("--horizon", o.horizon, "Time horizon");
  app.add_option("--phase-length", o.phase_length, "Chameleon phase length T");
  app.add_flag("--modified", o.modified, "Uncapped chameleon variant");
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", o.deterministic, "Omit the timestamp from JSON output");
  app.add_option("--output", o.output, "Write results here instead of stdout");
  app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--state-cap", o.cap, "Largest exact state space");
  app.add_option("--start", o.start, "Start vertex labels");

  auto* validate_cmd = app.add_subcommand("validate", "Check a model");
  auto* mix_cmd = app.add_subcommand("mix", "Exact mixing times");
  mix_cmd->add_option("--kind", o.kinds, "rw, rwk, ex, ip (repeatable)");
  auto* sim_cmd = app.add_subcommand("simulate", "Trajectories and meeting times");
  sim_cmd->add_option("--what", o.what, "trajectory, meeting or bar-meeting");
  sim_cmd->add_option("--process", o.process, "rw, rwk, ex or ip");
  sim_cmd->add_flag("--lazy", o.lazy, "Lazy doubled-rate stream");
  auto* cham_cmd = app.add_subcommand("chameleon", "Chameleon process runs");
  cham_cmd->add_option("--probes", o.probes, "Times at which ink is recorded");
  cham_cmd->add_option("--max-unabsorbed", o.max_unabsorbed, "Largest tolerated unabsorbed fraction");
  auto* exp_cmd = app.add_subcommand("experiments", "Fixed experiments");
  exp_cmd->add_option("name", o.experiment, "neg-corr, delta-ratio or easy-classify")->required();
  exp_cmd->add_option("--times", o.times, "Time grid for neg-corr");
  exp_cmd->add_option("--deltas", o.deltas, "delta values for delta-ratio");
  exp_cmd->add_option("--c-time", o.c_time, "Time multiplier for easy-classify");
  exp_cmd->add_option("--c-prob", o.c_prob, "Probability threshold for easy-classify");
  exp_cmd->add_flag("--desk-preset", o.desk_preset, "c_time = 100, c_prob = 0.01, 2000 replicas");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  o.replicas_set = reps->count() > 0;

  std::string command;
  for (auto* sc : {validate_cmd, mix_cmd, sim_cmd, cham_cmd, exp_cmd})
    if (sc->parsed()) command = sc->get_name();
  Report rep(command, o);
  int code = kOk;
  try {
    if (command == "validate") code = cmd_validate(o, rep);
    else if (command == "mix") code = cmd_mix(o, rep);
    else if (command == "simulate") code = cmd_simulate(o, rep);
    else if (command == "chameleon") code = cmd_chameleon(o, rep);
    else code = cmd_experiments(o, rep, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what();
    if (e.position() != ParseError::npos) err << " (byte " << e.position() << ")";
    err << "\n";
    return kUsage;
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const ReducibleChain& e) {
    err << "irreducibility requirement violated: " << e.what() << "\n";
    return kFailed;
  } catch (const StateCapExceeded& e) {
    err << "state cap: " << e.what() << "\n";
    return kFailed;
  }
  if (code == kUsage) return code;

  if (o.output.empty()) {
    rep.write(out);
  } else {
    std::ofstream f(o.output);
    if (!f) {
      err << "cannot write '" << o.output << "'\n";
      return kUsage;
    }
    rep.write(f);
  }
  return code;
}

}  // namespace hyperex::cli
