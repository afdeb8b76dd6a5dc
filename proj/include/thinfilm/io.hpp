#pragma once

//! CSV/JSON artifact writers. Doubles are printed with 17 significant digits
//! so files round-trip exactly and regression diffs are byte-stable.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinfilm/errors.hpp"
#include "thinfilm/solver.hpp"

namespace thinfilm {

using json = nlohmann::ordered_json;

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParamError("cannot open for writing: " + path.string());
  out << content;
}

inline std::string ledger_csv(const Trajectory& traj) {
  std::string s =
      "t,mass_f,mass_g,energy,entropy,energy_eps,m2,m2_half,d_energy,d_entropy\n";
  for (const LedgerRow& r : traj.ledger) {
    s += g17(r.t) + ',' + g17(r.mass_f) + ',' + g17(r.mass_g) + ',' + g17(r.energy) + ',' +
         g17(r.entropy) + ',' + g17(r.energy_eps) + ',' + g17(r.m2) + ',' + g17(r.m2_half) +
         ',' + g17(r.d_energy) + ',' + g17(r.d_entropy) + '\n';
  }
  return s;
}

inline std::string trace_csv(const Trajectory& traj) {
  std::string s = "t,left,right,left_f,right_f,left_g,right_g\n";
  const auto& ts = traj.trace_sum;
  for (std::size_t k = 0; k < ts.t.size(); ++k) {
    s += g17(ts.t[k]) + ',' + g17(ts.left[k]) + ',' + g17(ts.right[k]) + ',' +
         g17(traj.trace_f.left[k]) + ',' + g17(traj.trace_f.right[k]) + ',' +
         g17(traj.trace_g.left[k]) + ',' + g17(traj.trace_g.right[k]) + '\n';
  }
  return s;
}

inline std::string probes_csv(const Trajectory& traj) {
  std::string s = "t";
  for (std::size_t p = 0; p < traj.probes.size(); ++p)
    s += ",max_" + g17(traj.probes[p].lo) + "_" + g17(traj.probes[p].hi);
  s += '\n';
  for (std::size_t k = 0; k < traj.sample_times.size(); ++k) {
    s += g17(traj.sample_times[k]);
    for (const Probe& p : traj.probes) s += ',' + g17(p.max_value[k]);
    s += '\n';
  }
  return s;
}

inline std::string snapshot_csv(const FieldPair& s, const Grid& grid) {
  std::string out = "x,f,g\n";
  for (int i = 0; i < grid.n; ++i)
    out += g17(grid.centers[i]) + ',' + g17(s.f[i]) + ',' + g17(s.g[i]) + '\n';
  return out;
}

//! One row of the machine-readable verdict list.
inline json gate_json(const std::string& name, bool pass, double value, double bound,
                      double margin) {
  json g;
  g["name"] = name;
  g["pass"] = pass;
  g["value"] = value;
  g["bound"] = bound;
  g["margin"] = margin;
  return g;
}

}  // namespace thinfilm
