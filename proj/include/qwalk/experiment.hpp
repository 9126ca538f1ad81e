#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "coin.hpp"
#include "continuum.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "lattice.hpp"
#include "observables.hpp"
#include "phase.hpp"
#include "state.hpp"

namespace qwalk {

inline constexpr const char* kVersion = "1.0.0";

// Two recorded runs diverge at the first time their site probabilities
// differ by more than this.
inline constexpr double kDivergenceThreshold = 1e-6;

// ---------------------------------------------------------------------------
// Configuration

struct ExperimentConfig {
  std::string command = "run";  // run | sweep | continuum | compare
  std::string preset;           // empty = none
  EngineKind engine = EngineKind::standard();
  double rho = 0.5;
  PhaseSpec phi0 = PhaseSpec::zero();
  Amplitude u0{1.0 / std::numbers::sqrt2, 0.0};
  Amplitude d0{0.0, 1.0 / std::numbers::sqrt2};
  LatticeKind lattice_kind = LatticeKind::Line;
  std::int64_t line_extent = -1;  // -1: sized automatically to `steps`
  std::int64_t circle_half = 8;   // circle lattice half-size L (2L+1 sites)
  std::int64_t steps = 100;
  std::int64_t stride = 1;
  double w = 0.65;
  double xi_min = -80.5, xi_max = 80.5, dxi = 0.25;
  std::vector<std::int64_t> taus;       // continuum slice times
  std::vector<std::int64_t> snapshots;  // exact snapshot times
  std::vector<EngineKind> engines;      // compare: the two engines
  std::string out = ".";
  std::string format = "csv";  // csv | json
};

namespace detail {

inline double parse_double_field(const std::string& field,
                                 const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE)
    throw usage_error(field + ": expected a real number, got '" + text + "'");
  return v;
}

inline std::int64_t parse_int_field(const std::string& field,
                                    const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE)
    throw usage_error(field + ": expected an integer, got '" + text + "'");
  return v;
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

inline std::vector<std::int64_t> parse_int_list(const std::string& field,
                                                const std::string& text) {
  std::vector<std::int64_t> out;
  if (text.empty()) return out;
  for (const auto& p : split_list(text))
    out.push_back(parse_int_field(field, p));
  return out;
}

}  // namespace detail

inline void apply_preset(ExperimentConfig& cfg, const std::string& name) {
  auto span = [](std::int64_t lo, std::int64_t hi, std::int64_t step) {
    std::vector<std::int64_t> v;
    for (std::int64_t t = lo; t <= hi; t += step) v.push_back(t);
    return v;
  };
  cfg.preset = name;
  if (name == "fig1") {
    // per-denominator step counts are fixed inside run_experiment
    cfg.engine = EngineKind::gqw();
    cfg.rho = 0.5;
    cfg.phi0 = PhaseSpec::rational(1, 10);
    cfg.steps = 600;
    cfg.stride = 10;
  } else if (name == "fig2") {
    cfg.engine = EngineKind::gqw();
    cfg.rho = 0.5;
    cfg.phi0 = PhaseSpec::rational(1, 110);
    cfg.steps = 440;
    cfg.stride = 1;
  } else if (name == "fig4") {
    cfg.engine = EngineKind::gqw();
    cfg.rho = 0.5;
    cfg.phi0 = PhaseSpec::rational(1, 150);
    cfg.steps = 140;
    cfg.stride = 10;
    cfg.snapshots = span(10, 140, 10);
    cfg.taus = span(10, 140, 10);
    cfg.w = 0.65;
  } else if (name == "fig6") {
    // w sweep {0.45 ... 0.85} is fixed inside run_experiment
    cfg.engine = EngineKind::gqw();
    cfg.rho = 0.5;
    cfg.phi0 = PhaseSpec::rational(1, 150);
    cfg.steps = 150;
    cfg.stride = 1;
    cfg.taus = span(0, 150, 1);
  } else if (name == "equivalence") {
    cfg.engines = {EngineKind::timedep_coin(), EngineKind::gqw()};
    cfg.rho = 0.5;
    cfg.phi0 = PhaseSpec::rational(1, 110);
    cfg.steps = 1000;
    cfg.stride = 1;
  } else if (name == "control") {
    cfg.engines = {EngineKind::control(), EngineKind::standard()};
    cfg.rho = 0.5;
    cfg.phi0 = PhaseSpec::rational(1, 50);
    cfg.steps = 500;
    cfg.stride = 1;
  } else if (name == "circle") {
    cfg.engines = {EngineKind::timedep_coin(), EngineKind::gqw()};
    cfg.rho = 0.5;
    cfg.phi0 = PhaseSpec::rational(1, 16);
    cfg.lattice_kind = LatticeKind::Circle;
    cfg.circle_half = 8;
    cfg.steps = 100;
    cfg.stride = 1;
  } else {
    throw usage_error("preset: unknown preset '" + name + "'");
  }
}

// Applies one key=value setting (config-file line or CLI flag).
inline void apply_key(ExperimentConfig& cfg, const std::string& key,
                      const std::string& value) {
  using detail::parse_double_field;
  using detail::parse_int_field;
  using detail::parse_int_list;
  if (key == "preset") {
    apply_preset(cfg, value);
  } else if (key == "engine") {
    cfg.engine = parse_engine(value);
  } else if (key == "rho") {
    cfg.rho = parse_double_field("rho", value);
  } else if (key == "phi0") {
    cfg.phi0 = PhaseSpec::parse(value);
  } else if (key == "steps") {
    cfg.steps = parse_int_field("steps", value);
  } else if (key == "stride") {
    cfg.stride = parse_int_field("stride", value);
  } else if (key == "initial") {
    const auto parts = detail::split_list(value);
    if (parts.size() != 4)
      throw usage_error("initial: expected u_re,u_im,d_re,d_im");
    cfg.u0 = {parse_double_field("initial", parts[0]),
              parse_double_field("initial", parts[1])};
    cfg.d0 = {parse_double_field("initial", parts[2]),
              parse_double_field("initial", parts[3])};
  } else if (key == "lattice") {
    if (value == "line") {
      cfg.lattice_kind = LatticeKind::Line;
      cfg.line_extent = -1;
    } else if (value.rfind("line:", 0) == 0) {
      cfg.lattice_kind = LatticeKind::Line;
      cfg.line_extent = parse_int_field("lattice", value.substr(5));
    } else if (value.rfind("circle:", 0) == 0) {
      cfg.lattice_kind = LatticeKind::Circle;
      cfg.circle_half = parse_int_field("lattice", value.substr(7));
    } else {
      throw usage_error("lattice: expected line, line:EXTENT or circle:L");
    }
  } else if (key == "w") {
    cfg.w = parse_double_field("w", value);
  } else if (key == "xi_min") {
    cfg.xi_min = parse_double_field("xi_min", value);
  } else if (key == "xi_max") {
    cfg.xi_max = parse_double_field("xi_max", value);
  } else if (key == "dxi") {
    cfg.dxi = parse_double_field("dxi", value);
  } else if (key == "taus") {
    cfg.taus = parse_int_list("taus", value);
  } else if (key == "snapshots") {
    cfg.snapshots = parse_int_list("snapshots", value);
  } else if (key == "engines") {
    cfg.engines.clear();
    for (const auto& p : detail::split_list(value))
      cfg.engines.push_back(parse_engine(p));
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "format") {
    if (value != "csv" && value != "json")
      throw usage_error("format: expected csv or json");
    cfg.format = value;
  } else {
    throw usage_error("config: unknown key '" + key + "'");
  }
}

// Reads a flat key=value config file ('#' starts a comment line).
inline std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("config: cannot read '" + path + "'");
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw usage_error("config: expected key=value, got '" + t + "'");
    pairs.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return pairs;
}

// Layered assembly: defaults, then the preset (a preset named on the command
// line beats one named in the file), then file keys, then flag keys.
inline ExperimentConfig build_config(
    const std::string& command,
    const std::vector<std::pair<std::string, std::string>>& file_pairs,
    const std::vector<std::pair<std::string, std::string>>& flag_pairs) {
  ExperimentConfig cfg;
  cfg.command = command;
  std::optional<std::string> preset;
  for (const auto& [k, v] : file_pairs)
    if (k == "preset") preset = v;
  for (const auto& [k, v] : flag_pairs)
    if (k == "preset") preset = v;
  if (preset) apply_preset(cfg, *preset);
  for (const auto& [k, v] : file_pairs)
    if (k != "preset") apply_key(cfg, k, v);
  for (const auto& [k, v] : flag_pairs)
    if (k != "preset") apply_key(cfg, k, v);
  return cfg;
}

inline Lattice make_lattice(const ExperimentConfig& cfg) {
  if (cfg.lattice_kind == LatticeKind::Circle)
    return Lattice::circle(cfg.circle_half);
  return Lattice::line(cfg.line_extent >= 0 ? cfg.line_extent : cfg.steps);
}

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.steps < 0) throw usage_error("steps: must be >= 0");
  if (cfg.stride < 1) throw usage_error("stride: must be >= 1");
  if (cfg.steps % cfg.stride != 0)
    throw usage_error("stride: must divide steps");
  if (cfg.rho < 0.0 || cfg.rho > 1.0)
    throw usage_error("rho: must lie in [0, 1]");
  if (std::abs(std::norm(cfg.u0) + std::norm(cfg.d0) - 1.0) > 1e-12)
    throw usage_error("initial: |u0|^2 + |d0|^2 must be 1 within 1e-12");
  if (cfg.w <= 0.0) throw usage_error("w: must be > 0");
  if (cfg.dxi <= 0.0) throw usage_error("dxi: must be > 0");
  if (cfg.xi_max < cfg.xi_min) throw usage_error("xi_max: must be >= xi_min");
  if (cfg.lattice_kind == LatticeKind::Line && cfg.line_extent >= 0 &&
      cfg.line_extent < cfg.steps)
    throw usage_error("lattice: line extent smaller than steps");
  if (cfg.lattice_kind == LatticeKind::Circle && cfg.circle_half < 1)
    throw usage_error("lattice: circle needs L >= 1");
  for (std::int64_t t : cfg.snapshots)
    if (t < 0 || t > cfg.steps || t % cfg.stride != 0)
      throw usage_error(
          "snapshots: times must be recorded steps (multiples of stride in "
          "[0, steps])");
  for (std::int64_t t : cfg.taus)
    if (t < 0) throw usage_error("taus: times must be >= 0");
  if (cfg.command == "compare" && cfg.engines.size() != 2)
    throw usage_error("engines: compare needs exactly two engines");
  if (cfg.command == "sweep" && cfg.preset.empty())
    throw usage_error("preset: sweep requires a preset");
  if ((cfg.command == "continuum" || !cfg.taus.empty()) && cfg.phi0.is_zero())
    throw usage_error("phi0: continuum evaluation requires a nonzero phase");
}

// ---------------------------------------------------------------------------
// Results

struct SnapshotRow {
  std::int64_t t = 0, n = 0;
  double p = 0.0, pu = 0.0, pd = 0.0;
};

struct ContinuumRow {
  std::int64_t tau = 0;
  double xi = 0.0, p = 0.0;
};

struct ContinuumStatsRow {
  std::int64_t tau = 0;
  double mean = 0.0, sigma = 0.0, sigma2 = 0.0;
};

// One named output table; `kind` selects which row vector is populated and
// which CSV header the table gets.
struct Series {
  std::string name;
  std::string kind;  // stats | snapshots | continuum | continuum_stats
  std::vector<StatsRow> stats;
  std::vector<SnapshotRow> snapshots;
  std::vector<ContinuumRow> continuum;
  std::vector<ContinuumStatsRow> continuum_stats;
};

struct SummaryEntry {
  std::string key;
  double value = 0.0;
};

struct RunRecord {
  ExperimentConfig config;
  std::string version = kVersion;
  std::vector<Series> series;
  std::vector<SummaryEntry> summary;
  double wall_time_s = 0.0;  // diagnostic only; never serialized
};

// ---------------------------------------------------------------------------
// Experiment execution

namespace detail {

inline Series stats_series(const std::string& name, const EngineKind& engine,
                           const CoinParams& params, const Lattice& lat,
                           Amplitude u0, Amplitude d0, std::int64_t steps,
                           std::int64_t stride) {
  Series s{name, "stats", {}, {}, {}, {}};
  WalkState initial(lat, u0, d0);
  run(engine, params, initial, steps, stride,
      [&s](const WalkState& st) { s.stats.push_back(stats_row(st)); });
  return s;
}

inline void append_snapshot(Series& s, const WalkState& st) {
  const Distribution dist = distribution(st);
  for (std::int64_t i = 0; i < dist.size(); ++i)
    s.snapshots.push_back({dist.t, dist.site(i),
                           dist.p[static_cast<std::size_t>(i)],
                           dist.pu[static_cast<std::size_t>(i)],
                           dist.pd[static_cast<std::size_t>(i)]});
}

struct CompareOutcome {
  Series a, b;
  double max_abs_dp = 0.0;
  std::int64_t argmax_t = -1;
  std::int64_t first_divergence_t = -1;
};

// Runs the two engines on identical inputs and scans the recorded site
// probabilities against each other.
inline CompareOutcome compare_engines(const EngineKind& ea,
                                      const EngineKind& eb,
                                      const CoinParams& params,
                                      const Lattice& lat, Amplitude u0,
                                      Amplitude d0, std::int64_t steps,
                                      std::int64_t stride,
                                      const std::string& name_prefix) {
  CompareOutcome out;
  out.a = Series{name_prefix + "_" + engine_name(ea), "stats", {}, {}, {}, {}};
  out.b = Series{name_prefix + "_" + engine_name(eb), "stats", {}, {}, {}, {}};
  const std::int64_t size = lat.size();
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(steps / stride + 1));
  WalkState initial(lat, u0, d0);
  run(ea, params, initial, steps, stride, [&](const WalkState& st) {
    out.a.stats.push_back(stats_row(st));
    std::vector<double> row(static_cast<std::size_t>(size));
    for (std::int64_t i = 0; i < size; ++i)
      row[static_cast<std::size_t>(i)] = st.prob(lat.site(i));
    rows.push_back(std::move(row));
  });
  std::size_t idx = 0;
  run(eb, params, initial, steps, stride, [&](const WalkState& st) {
    out.b.stats.push_back(stats_row(st));
    const auto& row = rows[idx++];
    for (std::int64_t i = 0; i < size; ++i) {
      const double dp =
          std::abs(st.prob(lat.site(i)) - row[static_cast<std::size_t>(i)]);
      if (dp > out.max_abs_dp) {
        out.max_abs_dp = dp;
        out.argmax_t = st.t();
      }
      if (dp > kDivergenceThreshold && out.first_divergence_t < 0)
        out.first_divergence_t = st.t();
    }
  });
  return out;
}

inline Series continuum_series(const std::string& name,
                               const ContinuumSetup& setup,
                               const std::vector<std::int64_t>& taus,
                               const XiGrid& grid) {
  Series s{name, "continuum", {}, {}, {}, {}};
  for (std::int64_t tau : taus) {
    const ContinuumSlice slice = reconstruct(setup, tau, grid);
    const std::int64_t count = grid.count();
    for (std::int64_t i = 0; i < count; ++i)
      s.continuum.push_back(
          {tau, grid.xi(i), slice.density[static_cast<std::size_t>(i)]});
  }
  return s;
}

inline Series continuum_stats_series(const std::string& name,
                                     const ContinuumSetup& setup,
                                     const std::vector<std::int64_t>& taus,
                                     const XiGrid& grid) {
  Series s{name, "continuum_stats", {}, {}, {}, {}};
  for (std::int64_t tau : taus) {
    const ContinuumSlice slice = reconstruct(setup, tau, grid);
    const ContinuumMoments m = continuum_moments(slice);
    s.continuum_stats.push_back({tau, m.mean, m.sigma, m.sigma2});
  }
  return s;
}

inline void push_summary(RunRecord& rec, const CompareOutcome& cmp) {
  rec.series.push_back(cmp.a);
  rec.series.push_back(cmp.b);
  rec.summary.push_back({"max_abs_dp", cmp.max_abs_dp});
  rec.summary.push_back(
      {"argmax_t", static_cast<double>(cmp.argmax_t)});
  rec.summary.push_back({"first_divergence_t",
                         static_cast<double>(cmp.first_divergence_t)});
}

}  // namespace detail

inline RunRecord run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  RunRecord rec;
  rec.config = cfg;
  const CoinParams params{cfg.rho, cfg.phi0, Schedule::Static};
  const XiGrid grid{cfg.xi_min, cfg.xi_max, cfg.dxi};

  if (cfg.preset == "fig1") {
    // Origin-return series for q = 1 and three denominators; each runs long
    // enough to cover the pinned return-decay horizon, recorded once per
    // period.
    const std::pair<std::int64_t, std::int64_t> runs[] = {
        {10, 600}, {30, 3600}, {50, 170000}};
    for (const auto& [p, steps] : runs) {
      const CoinParams pp{cfg.rho, PhaseSpec::rational(1, p),
                          Schedule::Static};
      rec.series.push_back(detail::stats_series(
          "fig1_p" + std::to_string(p), cfg.engine, pp, Lattice::line(steps),
          cfg.u0, cfg.d0, steps, p));
    }
    return rec;
  }

  if (cfg.preset == "fig2") {
    for (std::int64_t q : {1, 3, 7, 9}) {
      const CoinParams pp{cfg.rho, PhaseSpec::rational(q, 110),
                          Schedule::Static};
      rec.series.push_back(detail::stats_series(
          "fig2_q" + std::to_string(q), cfg.engine, pp,
          Lattice::line(cfg.steps), cfg.u0, cfg.d0, cfg.steps, cfg.stride));
    }
    return rec;
  }

  if (cfg.preset == "fig4") {
    Series exact{"fig4_exact", "snapshots", {}, {}, {}, {}};
    WalkState initial(make_lattice(cfg), cfg.u0, cfg.d0);
    run(cfg.engine, params, initial, cfg.steps, cfg.stride,
        [&](const WalkState& st) {
          if (st.t() > 0) detail::append_snapshot(exact, st);
        });
    rec.series.push_back(std::move(exact));
    const ContinuumSetup setup =
        continuum_setup(params, cfg.u0, cfg.d0, cfg.w);
    rec.series.push_back(
        detail::continuum_series("fig4_continuum", setup, cfg.taus, grid));
    return rec;
  }

  if (cfg.preset == "fig6") {
    rec.series.push_back(detail::stats_series(
        "fig6_exact", cfg.engine, params, make_lattice(cfg), cfg.u0, cfg.d0,
        cfg.steps, cfg.stride));
    for (double w : {0.45, 0.55, 0.65, 0.75, 0.85}) {
      const ContinuumSetup setup = continuum_setup(params, cfg.u0, cfg.d0, w);
      char name[32];
      std::snprintf(name, sizeof name, "fig6_w%.2f", w);
      rec.series.push_back(
          detail::continuum_stats_series(name, setup, cfg.taus, grid));
    }
    return rec;
  }

  if (cfg.preset == "equivalence" || cfg.preset == "control" ||
      cfg.preset == "circle" || cfg.command == "compare") {
    if (cfg.engines.size() != 2)
      throw usage_error("engines: comparison needs exactly two engines");
    const auto cmp = detail::compare_engines(
        cfg.engines[0], cfg.engines[1], params, make_lattice(cfg), cfg.u0,
        cfg.d0, cfg.steps, cfg.stride,
        cfg.preset.empty() ? std::string("compare") : cfg.preset);
    detail::push_summary(rec, cmp);
    return rec;
  }

  if (cfg.command == "continuum") {
    const ContinuumSetup setup =
        continuum_setup(params, cfg.u0, cfg.d0, cfg.w);
    const std::vector<std::int64_t> taus =
        cfg.taus.empty() ? std::vector<std::int64_t>{cfg.steps} : cfg.taus;
    rec.series.push_back(
        detail::continuum_series("continuum", setup, taus, grid));
    rec.series.push_back(
        detail::continuum_stats_series("continuum_stats", setup, taus, grid));
    return rec;
  }

  // Plain run (also `sweep --preset ...` falls through the preset branches).
  Series stats{"stats", "stats", {}, {}, {}, {}};
  Series snaps{"snapshots", "snapshots", {}, {}, {}, {}};
  WalkState initial(make_lattice(cfg), cfg.u0, cfg.d0);
  const auto& want = cfg.snapshots;
  run(cfg.engine, params, initial, cfg.steps, cfg.stride,
      [&](const WalkState& st) {
        stats.stats.push_back(stats_row(st));
        if (std::find(want.begin(), want.end(), st.t()) != want.end())
          detail::append_snapshot(snaps, st);
      });
  rec.series.push_back(std::move(stats));
  if (!want.empty()) rec.series.push_back(std::move(snaps));
  if (!cfg.taus.empty()) {
    const ContinuumSetup setup =
        continuum_setup(params, cfg.u0, cfg.d0, cfg.w);
    rec.series.push_back(
        detail::continuum_series("continuum", setup, cfg.taus, grid));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

// 17 significant digits round-trip doubles exactly; negative zero is
// canonicalized so identical values always print identically.
inline std::string fmt17(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\')
      out += std::string("\\") + c;
    else if (static_cast<unsigned char>(c) < 0x20)
      out += ' ';
    else
      out += c;
  }
  return out;
}

inline std::string lattice_spec(const ExperimentConfig& cfg) {
  if (cfg.lattice_kind == LatticeKind::Circle)
    return "circle:" + std::to_string(cfg.circle_half);
  if (cfg.line_extent < 0) return "line";
  return "line:" + std::to_string(cfg.line_extent);
}

inline std::string int_list(const std::vector<std::int64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

inline std::string engine_list(const std::vector<EngineKind>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += engine_name(v[i]);
  }
  return out;
}

// The config echo as the same key=value lines the config-file parser reads.
inline std::vector<std::string> config_lines(const ExperimentConfig& cfg) {
  std::vector<std::string> lines;
  lines.push_back("# command=" + cfg.command);
  if (!cfg.preset.empty()) lines.push_back("preset=" + cfg.preset);
  lines.push_back("engine=" + engine_name(cfg.engine));
  lines.push_back("rho=" + fmt17(cfg.rho));
  lines.push_back("phi0=" + cfg.phi0.to_string());
  lines.push_back("initial=" + fmt17(cfg.u0.real()) + "," +
                  fmt17(cfg.u0.imag()) + "," + fmt17(cfg.d0.real()) + "," +
                  fmt17(cfg.d0.imag()));
  lines.push_back("lattice=" + lattice_spec(cfg));
  lines.push_back("steps=" + std::to_string(cfg.steps));
  lines.push_back("stride=" + std::to_string(cfg.stride));
  lines.push_back("w=" + fmt17(cfg.w));
  lines.push_back("xi_min=" + fmt17(cfg.xi_min));
  lines.push_back("xi_max=" + fmt17(cfg.xi_max));
  lines.push_back("dxi=" + fmt17(cfg.dxi));
  if (!cfg.taus.empty()) lines.push_back("taus=" + int_list(cfg.taus));
  if (!cfg.snapshots.empty())
    lines.push_back("snapshots=" + int_list(cfg.snapshots));
  if (!cfg.engines.empty())
    lines.push_back("engines=" + engine_list(cfg.engines));
  lines.push_back("out=" + cfg.out);
  lines.push_back("format=" + cfg.format);
  return lines;
}

inline const char* csv_header(const std::string& kind) {
  if (kind == "stats") return "t,mean,sigma,sigma2,p0,total_prob";
  if (kind == "snapshots") return "t,n,p,pu,pd";
  if (kind == "continuum") return "tau,xi,p";
  if (kind == "continuum_stats") return "tau,mean,sigma,sigma2";
  throw param_error("series: unknown kind '" + kind + "'");
}

inline void write_series_csv(std::ostream& os, const Series& s) {
  os << csv_header(s.kind) << "\n";
  if (s.kind == "stats") {
    for (const auto& r : s.stats)
      os << r.t << "," << fmt17(r.mean) << "," << fmt17(r.sigma) << ","
         << fmt17(r.sigma2) << "," << fmt17(r.p0) << ","
         << fmt17(r.total_prob) << "\n";
  } else if (s.kind == "snapshots") {
    for (const auto& r : s.snapshots)
      os << r.t << "," << r.n << "," << fmt17(r.p) << "," << fmt17(r.pu)
         << "," << fmt17(r.pd) << "\n";
  } else if (s.kind == "continuum") {
    for (const auto& r : s.continuum)
      os << r.tau << "," << fmt17(r.xi) << "," << fmt17(r.p) << "\n";
  } else {
    for (const auto& r : s.continuum_stats)
      os << r.tau << "," << fmt17(r.mean) << "," << fmt17(r.sigma) << ","
         << fmt17(r.sigma2) << "\n";
  }
}

inline std::string config_json(const ExperimentConfig& cfg) {
  std::string j = "{";
  auto str = [&](const char* k, const std::string& v, bool comma = true) {
    j += std::string("\"") + k + "\":\"" + json_escape(v) + "\"";
    if (comma) j += ",";
  };
  auto num = [&](const char* k, const std::string& v, bool comma = true) {
    j += std::string("\"") + k + "\":" + v;
    if (comma) j += ",";
  };
  str("command", cfg.command);
  str("preset", cfg.preset);
  str("engine", engine_name(cfg.engine));
  num("rho", fmt17(cfg.rho));
  str("phi0", cfg.phi0.to_string());
  num("u_re", fmt17(cfg.u0.real()));
  num("u_im", fmt17(cfg.u0.imag()));
  num("d_re", fmt17(cfg.d0.real()));
  num("d_im", fmt17(cfg.d0.imag()));
  str("lattice", lattice_spec(cfg));
  num("steps", std::to_string(cfg.steps));
  num("stride", std::to_string(cfg.stride));
  num("w", fmt17(cfg.w));
  num("xi_min", fmt17(cfg.xi_min));
  num("xi_max", fmt17(cfg.xi_max));
  num("dxi", fmt17(cfg.dxi));
  j += "\"taus\":[" + [&] {
    std::string a;
    for (std::size_t i = 0; i < cfg.taus.size(); ++i)
      a += (i ? "," : "") + std::to_string(cfg.taus[i]);
    return a;
  }() + "],";
  j += "\"snapshots\":[" + [&] {
    std::string a;
    for (std::size_t i = 0; i < cfg.snapshots.size(); ++i)
      a += (i ? "," : "") + std::to_string(cfg.snapshots[i]);
    return a;
  }() + "],";
  j += "\"engines\":[" + [&] {
    std::string a;
    for (std::size_t i = 0; i < cfg.engines.size(); ++i)
      a += (i ? "," : "") + ("\"" + engine_name(cfg.engines[i]) + "\"");
    return a;
  }() + "],";
  str("out", cfg.out);
  str("format", cfg.format, false);
  j += "}";
  return j;
}

inline std::string record_json(const RunRecord& rec) {
  std::string j = "{\n";
  j += "\"version\":\"" + json_escape(rec.version) + "\",\n";
  j += "\"config\":" + config_json(rec.config) + ",\n";
  j += "\"summary\":[";
  for (std::size_t i = 0; i < rec.summary.size(); ++i) {
    if (i) j += ",";
    j += "{\"key\":\"" + json_escape(rec.summary[i].key) +
         "\",\"value\":" + fmt17(rec.summary[i].value) + "}";
  }
  j += "],\n";
  j += "\"series\":[";
  for (std::size_t si = 0; si < rec.series.size(); ++si) {
    const Series& s = rec.series[si];
    if (si) j += ",";
    j += "\n{\"name\":\"" + json_escape(s.name) + "\",\"kind\":\"" +
         json_escape(s.kind) + "\",\"rows\":[\n";
    bool first = true;
    auto row = [&](const std::string& r) {
      if (!first) j += ",\n";
      first = false;
      j += "[" + r + "]";
    };
    if (s.kind == "stats") {
      for (const auto& r : s.stats)
        row(std::to_string(r.t) + "," + fmt17(r.mean) + "," + fmt17(r.sigma) +
            "," + fmt17(r.sigma2) + "," + fmt17(r.p0) + "," +
            fmt17(r.total_prob));
    } else if (s.kind == "snapshots") {
      for (const auto& r : s.snapshots)
        row(std::to_string(r.t) + "," + std::to_string(r.n) + "," +
            fmt17(r.p) + "," + fmt17(r.pu) + "," + fmt17(r.pd));
    } else if (s.kind == "continuum") {
      for (const auto& r : s.continuum)
        row(std::to_string(r.tau) + "," + fmt17(r.xi) + "," + fmt17(r.p));
    } else {
      for (const auto& r : s.continuum_stats)
        row(std::to_string(r.tau) + "," + fmt17(r.mean) + "," +
            fmt17(r.sigma) + "," + fmt17(r.sigma2));
    }
    j += "\n]}";
  }
  j += "\n]\n}\n";
  return j;
}

}  // namespace detail

// Writes the record under cfg.out: one CSV per series plus summary.csv and a
// config.txt echo, or a single record.json.  Identical records produce
// identical bytes.
inline void write_output(const RunRecord& rec, const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw io_error("out: cannot create directory '" + cfg.out + "'");
  auto open = [&](const std::string& name) {
    std::ofstream os(fs::path(cfg.out) / name,
                     std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("out: cannot write '" + cfg.out + "/" + name +
                            "'");
    return os;
  };
  if (cfg.format == "json") {
    auto os = open("record.json");
    os << detail::record_json(rec);
    if (!os) throw io_error("out: write failed in '" + cfg.out + "'");
    return;
  }
  for (const Series& s : rec.series) {
    auto os = open(s.name + ".csv");
    detail::write_series_csv(os, s);
    if (!os) throw io_error("out: write failed in '" + cfg.out + "'");
  }
  if (!rec.summary.empty()) {
    auto os = open("summary.csv");
    os << "key,value\n";
    for (const auto& e : rec.summary)
      os << e.key << "," << detail::fmt17(e.value) << "\n";
  }
  auto os = open("config.txt");
  for (const auto& line : detail::config_lines(rec.config)) os << line << "\n";
}

}  // namespace qwalk
