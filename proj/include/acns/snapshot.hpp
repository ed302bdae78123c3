#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "acns/field.hpp"

namespace acns {

class SnapshotError : public std::runtime_error {
 public:
  explicit SnapshotError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Snapshot {
  Grid grid;
  SimState state;
};

namespace detail_snapshot {

inline double read_value(std::istream& in, const char* where) {
  std::string tok;
  if (!(in >> tok)) throw SnapshotError(std::string("snapshot truncated in ") + where);
  double out{};
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw SnapshotError(std::string("malformed value in ") + where + ": '" + tok + "'");
  if (!std::isfinite(out))
    throw SnapshotError(std::string("non-finite value in ") + where);
  return out;
}

inline void expect_label(std::istream& in, const char* label) {
  std::string tok;
  if (!(in >> tok) || tok != label)
    throw SnapshotError(std::string("expected section '") + label + "'");
}

}  // namespace detail_snapshot

// ASCII snapshot: header `ACNS 1 nx ny lx ly time`, then sections u, v, p,
// phi as row-major interior values at 17 significant digits. Ghost entries
// are not stored; the reader reapplies the boundary conditions.
inline void snapshot_write(const Grid& g, const SimState& st, const std::string& path) {
  require_match(g, st.velocity);
  require_match(g, st.pressure);
  require_match(g, st.phase);
  if (!(st.time >= 0.0)) throw SnapshotError("negative time");
  if (!all_finite(st)) throw SnapshotError("non-finite value in state");

  std::ofstream out(path);
  if (!out) throw SnapshotError("cannot open '" + path + "' for writing");
  out.precision(17);
  out << "ACNS 1 " << g.nx << ' ' << g.ny << ' ' << g.lx << ' ' << g.ly << ' '
      << st.time << '\n';
  out << "u\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i <= g.nx; ++i) out << st.velocity.u(i, j) << (i < g.nx ? ' ' : '\n');
  }
  out << "v\n";
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) out << st.velocity.v(i, j) << (i + 1 < g.nx ? ' ' : '\n');
  }
  out << "p\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) out << st.pressure(i, j) << (i + 1 < g.nx ? ' ' : '\n');
  }
  out << "phi\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) out << st.phase(i, j) << (i + 1 < g.nx ? ' ' : '\n');
  }
  out.flush();
  if (!out) throw SnapshotError("write failure on '" + path + "'");
}

inline Snapshot snapshot_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SnapshotError("cannot open '" + path + "'");

  std::string magic;
  int version = 0;
  Grid g;
  double time = 0;
  if (!(in >> magic) || magic != "ACNS") throw SnapshotError("malformed snapshot header");
  if (!(in >> version)) throw SnapshotError("malformed snapshot header");
  if (version != 1)
    throw SnapshotError("unsupported snapshot version " + std::to_string(version));
  if (!(in >> g.nx >> g.ny >> g.lx >> g.ly >> time))
    throw SnapshotError("malformed snapshot header");
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw SnapshotError(std::string("bad snapshot grid: ") + e.what());
  }
  if (!(time >= 0.0) || !std::isfinite(time)) throw SnapshotError("negative time");

  Snapshot snap{g, SimState(g)};
  snap.state.time = time;
  detail_snapshot::expect_label(in, "u");
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      snap.state.velocity.u(i, j) = detail_snapshot::read_value(in, "u");
  detail_snapshot::expect_label(in, "v");
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      snap.state.velocity.v(i, j) = detail_snapshot::read_value(in, "v");
  detail_snapshot::expect_label(in, "p");
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      snap.state.pressure(i, j) = detail_snapshot::read_value(in, "p");
  detail_snapshot::expect_label(in, "phi");
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      snap.state.phase(i, j) = detail_snapshot::read_value(in, "phi");

  std::string extra;
  if (in >> extra) throw SnapshotError("trailing data after phi section");
  apply_bc(g, snap.state);
  return snap;
}

}  // namespace acns
