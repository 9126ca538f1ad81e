#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "experiment.hpp"

namespace qwalk {

// Parses a record.json written by write_output back into a RunRecord.
// Re-serializing the result reproduces the file byte for byte (doubles are
// written with 17 significant digits, which round-trip exactly).
inline RunRecord read_record(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("record: cannot read '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw io_error("record: parse failure in '" + path + "': " + e.what());
  }
  RunRecord rec;
  rec.version = j.at("version").get<std::string>();
  const auto& c = j.at("config");
  ExperimentConfig cfg;
  cfg.command = c.at("command").get<std::string>();
  const std::string preset = c.at("preset").get<std::string>();
  if (!preset.empty()) apply_preset(cfg, preset);
  cfg.command = c.at("command").get<std::string>();
  cfg.engine = parse_engine(c.at("engine").get<std::string>());
  cfg.rho = c.at("rho").get<double>();
  cfg.phi0 = PhaseSpec::parse(c.at("phi0").get<std::string>());
  cfg.u0 = {c.at("u_re").get<double>(), c.at("u_im").get<double>()};
  cfg.d0 = {c.at("d_re").get<double>(), c.at("d_im").get<double>()};
  apply_key(cfg, "lattice", c.at("lattice").get<std::string>());
  cfg.steps = c.at("steps").get<std::int64_t>();
  cfg.stride = c.at("stride").get<std::int64_t>();
  cfg.w = c.at("w").get<double>();
  cfg.xi_min = c.at("xi_min").get<double>();
  cfg.xi_max = c.at("xi_max").get<double>();
  cfg.dxi = c.at("dxi").get<double>();
  cfg.taus = c.at("taus").get<std::vector<std::int64_t>>();
  cfg.snapshots = c.at("snapshots").get<std::vector<std::int64_t>>();
  cfg.engines.clear();
  for (const auto& e : c.at("engines"))
    cfg.engines.push_back(parse_engine(e.get<std::string>()));
  cfg.out = c.at("out").get<std::string>();
  cfg.format = c.at("format").get<std::string>();
  rec.config = cfg;
  for (const auto& s : j.at("summary"))
    rec.summary.push_back(
        {s.at("key").get<std::string>(), s.at("value").get<double>()});
  for (const auto& js : j.at("series")) {
    Series s;
    s.name = js.at("name").get<std::string>();
    s.kind = js.at("kind").get<std::string>();
    for (const auto& r : js.at("rows")) {
      if (s.kind == "stats") {
        s.stats.push_back({r.at(0).get<std::int64_t>(), r.at(1).get<double>(),
                           r.at(2).get<double>(), r.at(3).get<double>(),
                           r.at(4).get<double>(), r.at(5).get<double>()});
      } else if (s.kind == "snapshots") {
        s.snapshots.push_back(
            {r.at(0).get<std::int64_t>(), r.at(1).get<std::int64_t>(),
             r.at(2).get<double>(), r.at(3).get<double>(),
             r.at(4).get<double>()});
      } else if (s.kind == "continuum") {
        s.continuum.push_back({r.at(0).get<std::int64_t>(),
                               r.at(1).get<double>(), r.at(2).get<double>()});
      } else if (s.kind == "continuum_stats") {
        s.continuum_stats.push_back(
            {r.at(0).get<std::int64_t>(), r.at(1).get<double>(),
             r.at(2).get<double>(), r.at(3).get<double>()});
      } else {
        throw io_error("record: unknown series kind '" + s.kind + "'");
      }
    }
    rec.series.push_back(std::move(s));
  }
  return rec;
}

}  // namespace qwalk
