#ifndef SPDELAB_SOLVER_HPP
#define SPDELAB_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spdelab/errors.hpp"
#include "spdelab/fft.hpp"
#include "spdelab/fingerprint.hpp"
#include "spdelab/grid.hpp"
#include "spdelab/kernels.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/sigma.hpp"
#include "spdelab/version.hpp"

namespace spdelab {

struct Field {
  GridSpec grid;
  double t = 0.0;
  std::vector<double> values;
};

/// Coordinate of grid index i along an axis.
inline double grid_coord(const GridSpec& g, std::size_t i) { return static_cast<double>(i) * g.h(); }

enum class U0Kind { constant, sine, bump, file };

inline std::string_view to_string(U0Kind k) {
  switch (k) {
    case U0Kind::constant: return "constant";
    case U0Kind::sine: return "sine";
    case U0Kind::bump: return "bump";
    case U0Kind::file: return "file";
  }
  return "unknown";
}

inline U0Kind parse_u0_kind(std::string_view s) {
  if (s == "constant") return U0Kind::constant;
  if (s == "sine") return U0Kind::sine;
  if (s == "bump") return U0Kind::bump;
  if (s == "file") return U0Kind::file;
  fail(ErrorKind::parse, "unknown u0 kind '" + std::string(s) + "'");
}

/// Initial datum.
///   constant  value
///   sine      offset + amplitude sin(2 pi k x / l)      (x = first coordinate)
///   bump      offset + height exp(1 - 1 / (1 - (r/width)^2)) for r < width, r = |x - center|
///   file      field dump in the binary field format
struct U0Spec {
  U0Kind kind = U0Kind::constant;
  double value = 0.0;
  int k = 1;
  double amplitude = 1.0;
  double offset = 0.0;
  double center = 0.5;
  double width = 0.1;
  double height = 1.0;
  std::string path;

  static U0Spec constant(double c) {
    U0Spec s;
    s.value = c;
    return s;
  }
  static U0Spec sine(int k, double amplitude, double offset = 0.0) {
    U0Spec s;
    s.kind = U0Kind::sine;
    s.k = k;
    s.amplitude = amplitude;
    s.offset = offset;
    return s;
  }
  static U0Spec bump(double center, double width, double height, double offset = 0.0) {
    U0Spec s;
    s.kind = U0Kind::bump;
    s.center = center;
    s.width = width;
    s.height = height;
    s.offset = offset;
    return s;
  }
  static U0Spec file(std::string path) {
    U0Spec s;
    s.kind = U0Kind::file;
    s.path = std::move(path);
    return s;
  }

  KeyValues describe(const std::string& prefix = "u0") const {
    KeyValues kv{{prefix + ".kind", std::string(to_string(kind))}};
    switch (kind) {
      case U0Kind::constant: kv[prefix + ".value"] = format_double(value); break;
      case U0Kind::sine:
        kv[prefix + ".k"] = std::to_string(k);
        kv[prefix + ".amplitude"] = format_double(amplitude);
        kv[prefix + ".offset"] = format_double(offset);
        break;
      case U0Kind::bump:
        kv[prefix + ".center"] = format_double(center);
        kv[prefix + ".width"] = format_double(width);
        kv[prefix + ".height"] = format_double(height);
        kv[prefix + ".offset"] = format_double(offset);
        break;
      case U0Kind::file: kv[prefix + ".path"] = path; break;
    }
    return kv;
  }
};

inline double bump_profile(double r, double width) {
  if (r >= width) return 0.0;
  double q = r / width;
  return std::exp(1.0 - 1.0 / (1.0 - q * q));
}

inline Field initial_field(const GridSpec& g, const U0Spec& u0) {
  g.validate();
  Field f{g, 0.0, std::vector<double>(g.size())};
  const std::size_t n = g.n;
  auto coord = [&](std::size_t flat, int axis) {
    std::size_t i = g.dim == 1 ? flat : (axis == 0 ? flat / n : flat % n);
    return grid_coord(g, i);
  };
  switch (u0.kind) {
    case U0Kind::constant: std::fill(f.values.begin(), f.values.end(), u0.value); break;
    case U0Kind::sine:
      for (std::size_t q = 0; q < f.values.size(); ++q)
        f.values[q] = u0.offset + u0.amplitude * std::sin(2.0 * std::numbers::pi * u0.k * coord(q, 0) / g.l);
      break;
    case U0Kind::bump:
      require(u0.width > 0.0, ErrorKind::precondition, "bump width must be > 0");
      for (std::size_t q = 0; q < f.values.size(); ++q) {
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
          double dx = coord(q, a) - u0.center;
          r2 += dx * dx;
        }
        f.values[q] = u0.offset + u0.height * bump_profile(std::sqrt(r2), u0.width);
      }
      break;
    case U0Kind::file: {
      NoiseField nf = read_field(u0.path);
      require(nf.grid.same_space(g), ErrorKind::input,
              "initial field '" + u0.path + "' does not match the grid (dim/n/l)");
      f.values = std::move(nf.values);
      break;
    }
  }
  return f;
}

/// Writes a field in the binary format so that U0Kind::file can read it back.
inline void write_initial_field(const std::string& path, const Field& f) {
  NoiseField nf;
  nf.grid = f.grid;
  nf.kernel.dim = f.grid.dim;
  nf.dt = f.grid.step();
  nf.values = f.values;
  write_field(path, nf);
}

struct ClipStats {
  long count = 0;
  double max_magnitude = 0.0;  // largest distance moved by a clip
};

/// Exponential Euler stepper u <- S_dt (u + sigma(u) dW). Owns its FFT work buffers.
class Stepper {
 public:
  Stepper(const GridSpec& g, const SigmaSpec& s, bool clip = false)
      : grid_(g), sigma_(s), clip_(clip), shape_(g.shape()) {
    g.validate();
    s.validate();
    const double dt = g.step();
    const std::size_t half = fft::half_size(shape_);
    mult_.resize(half);
    const double norm = 1.0 / static_cast<double>(g.size());
    const int hn = g.n / 2 + 1;
    for (std::size_t q = 0; q < half; ++q) {
      double k2;
      if (g.dim == 1) {
        double k = static_cast<double>(q) / g.l;
        k2 = k * k;
      } else {
        int i = static_cast<int>(q / hn), j = static_cast<int>(q % hn);
        double k0 = signed_wavenumber(i, g.n) / g.l, k1 = static_cast<double>(j) / g.l;
        k2 = k0 * k0 + k1 * k1;
      }
      mult_[q] = semigroup_multiplier(k2, dt) * norm;
    }
    spec_.resize(half);
    work_.resize(g.size());
  }

  const GridSpec& grid() const { return grid_; }
  const ClipStats& clip_stats() const { return clips_; }

  /// One step in place. `dw` may be empty (deterministic heat step). `step_index` is reported
  /// on blow-up.
  void step(std::span<double> u, std::span<const double> dw, long step_index = 0) {
    require(u.size() == grid_.size(), ErrorKind::input, "field does not match the stepper grid");
    if (dw.empty()) {
      std::copy(u.begin(), u.end(), work_.begin());
    } else {
      require(dw.size() == u.size(), ErrorKind::input, "noise does not match the field grid");
      for (std::size_t i = 0; i < u.size(); ++i) work_[i] = u[i] + sigma_eval(sigma_, u[i]) * dw[i];
    }
    fft::r2c(shape_, work_, spec_);
    for (std::size_t q = 0; q < spec_.size(); ++q) spec_[q] *= mult_[q];
    fft::c2r(shape_, spec_, u);
    for (double v : u)
      if (!std::isfinite(v)) throw BlowUpError(step_index, "non-finite value in solution");
    if (clip_) apply_clip(u);
  }

 private:
  void apply_clip(std::span<double> u) {
    double hi = sigma_.kind == SigmaKind::viot ? 1.0 : std::numeric_limits<double>::infinity();
    if (sigma_.kind != SigmaKind::viot && sigma_.kind != SigmaKind::sqrt_plus) return;
    for (double& v : u) {
      double c = std::clamp(v, 0.0, hi);
      if (c != v) {
        ++clips_.count;
        clips_.max_magnitude = std::max(clips_.max_magnitude, std::abs(c - v));
        v = c;
      }
    }
  }

  GridSpec grid_;
  SigmaSpec sigma_;
  bool clip_;
  std::vector<int> shape_;
  std::vector<double> mult_;
  std::vector<fft::cplx> spec_;
  std::vector<double> work_;
  ClipStats clips_;
};

/// Stand-alone single step: S_dt(u + sigma(u) dw).
inline Field step(const Field& u, const NoiseField& dw, const SigmaSpec& s) {
  require(u.grid.same_space(dw.grid), ErrorKind::input, "field and noise grids differ");
  GridSpec g = u.grid;
  g.dt = dw.dt;
  Stepper st(g, s);
  Field out{g, u.t + dw.dt, u.values};
  st.step(out.values, dw.values);
  return out;
}

struct SimulationSpec {
  GridSpec grid;
  KernelSpec kernel;
  SigmaSpec sigma;
  U0Spec u0;
  std::uint64_t seed = 0xC0FFEE;
  bool clip = false;

  KeyValues describe() const {
    KeyValues kv{
        {"grid.dim", std::to_string(grid.dim)},
        {"grid.n", std::to_string(grid.n)},
        {"grid.l", format_double(grid.l)},
        {"grid.dt", format_double(grid.step())},
        {"grid.t_end", format_double(grid.t_end)},
        {"grid.t_min", format_double(grid.t_min)},
        {"kernel.kind", std::string(to_string(kernel.kind))},
        {"kernel.alpha", format_double(kernel.alpha)},
        {"kernel.amplitude", format_double(kernel.amplitude)},
        {"sigma.kind", std::string(to_string(sigma.kind))},
        {"sigma.scale", format_double(sigma.scale)},
        {"sigma.gamma", format_double(sigma.gamma)},
        {"solver.clip", clip ? "true" : "false"},
        {"run.seed", std::to_string(seed)},
    };
    kv.merge(u0.describe());
    return kv;
  }

  std::string fingerprint() const { return spdelab::fingerprint(describe()); }
};

/// Converts snapshot times to step indices; each must lie on the step lattice.
inline std::vector<long> snapshot_steps(const GridSpec& g, const std::vector<double>& times) {
  std::vector<long> steps;
  const double dt = g.step();
  for (double t : times) {
    long m = std::lround(t / dt);
    require(m >= 0 && std::abs(m * dt - t) <= 1e-9 * std::max(1.0, std::abs(t)), ErrorKind::precondition,
            "snapshot time " + format_double(t) + " is not on the step lattice");
    require(steps.empty() || m > steps.back(), ErrorKind::precondition, "snapshot times must increase");
    steps.push_back(m);
  }
  return steps;
}

/// Every `every`-th step in [from, to] (inclusive), as times.
inline std::vector<double> lattice_times(const GridSpec& g, long from, long to, long every) {
  std::vector<double> t;
  for (long m = from; m <= to; m += every) t.push_back(m * g.step());
  return t;
}

struct Trajectory {
  std::string fingerprint;
  std::uint64_t replica = 0;
  std::vector<long> steps;
  std::vector<double> times;
  std::vector<Field> fields;
  ClipStats clips;
};

/// Observer receives (step index, time, field values) at each snapshot.
using SnapshotObserver = std::function<void(long, double, std::span<const double>)>;

/// Runs one replica and streams snapshots to `observe`. Returns the clip statistics.
inline ClipStats simulate_stream(const SimulationSpec& spec, std::uint64_t replica,
                                 const std::vector<double>& snapshot_times, const SnapshotObserver& observe) {
  spec.kernel.validate();
  const GridSpec& g = spec.grid;
  auto steps = snapshot_steps(g, snapshot_times);
  Field u = initial_field(g, spec.u0);
  Stepper st(g, spec.sigma, spec.clip);
  NoiseSampler ns(g, spec.kernel, g.step());
  std::vector<double> dw(g.size());
  const double dt = g.step();
  long m = 0;
  for (long target : steps) {
    while (m < target) {
      ns.sample(RngStream{spec.seed, replica, static_cast<std::uint64_t>(m)}, dw);
      st.step(u.values, dw, m);
      ++m;
    }
    observe(m, m * dt, u.values);
  }
  return st.clip_stats();
}

inline Trajectory simulate(const SimulationSpec& spec, std::uint64_t replica,
                           const std::vector<double>& snapshot_times) {
  Trajectory tr;
  tr.fingerprint = spec.fingerprint();
  tr.replica = replica;
  tr.clips = simulate_stream(spec, replica, snapshot_times, [&](long m, double t, std::span<const double> v) {
    tr.steps.push_back(m);
    tr.times.push_back(t);
    tr.fields.push_back(Field{spec.grid, t, std::vector<double>(v.begin(), v.end())});
  });
  return tr;
}

/// Two solutions driven by the same noise: leg 1 starts at u0, leg 2 at u0 + delta * perturbation.
struct PairSpec {
  SimulationSpec base;
  U0Spec perturbation = U0Spec::bump(0.5, 0.1, 1.0);
  double delta = 0.0;
};

struct PairTrajectory {
  std::string fingerprint;
  std::uint64_t replica = 0;
  double delta = 0.0;
  std::vector<long> steps;
  std::vector<double> times;
  std::vector<Field> diff;  // u1 - u2 at each snapshot
  ClipStats clips1, clips2;
};

using PairObserver = std::function<void(long, double, std::span<const double> u1, std::span<const double> u2)>;

inline void simulate_pair_stream(const PairSpec& ps, std::uint64_t replica, const std::vector<double>& snapshot_times,
                                 const PairObserver& observe, ClipStats* clips1 = nullptr,
                                 ClipStats* clips2 = nullptr) {
  const SimulationSpec& spec = ps.base;
  spec.kernel.validate();
  const GridSpec& g = spec.grid;
  auto steps = snapshot_steps(g, snapshot_times);
  Field u1 = initial_field(g, spec.u0);
  Field u2 = u1;
  if (ps.delta != 0.0) {
    Field p = initial_field(g, ps.perturbation);
    for (std::size_t i = 0; i < u2.values.size(); ++i) u2.values[i] += ps.delta * p.values[i];
  }
  Stepper st1(g, spec.sigma, spec.clip), st2(g, spec.sigma, spec.clip);
  NoiseSampler ns(g, spec.kernel, g.step());
  std::vector<double> dw(g.size());
  const double dt = g.step();
  long m = 0;
  for (long target : steps) {
    while (m < target) {
      ns.sample(RngStream{spec.seed, replica, static_cast<std::uint64_t>(m)}, dw);
      st1.step(u1.values, dw, m);
      st2.step(u2.values, dw, m);
      ++m;
    }
    observe(m, m * dt, u1.values, u2.values);
  }
  if (clips1) *clips1 = st1.clip_stats();
  if (clips2) *clips2 = st2.clip_stats();
}

inline KeyValues describe_pair(const PairSpec& ps) {
  KeyValues kv = ps.base.describe();
  kv.merge(ps.perturbation.describe("pair.perturbation"));
  kv["pair.delta"] = format_double(ps.delta);
  return kv;
}

inline PairTrajectory simulate_pair(const PairSpec& ps, std::uint64_t replica, const std::vector<double>& snapshot_times) {
  PairTrajectory pt;
  pt.fingerprint = fingerprint(describe_pair(ps));
  pt.replica = replica;
  pt.delta = ps.delta;
  simulate_pair_stream(
      ps, replica, snapshot_times,
      [&](long m, double t, std::span<const double> a, std::span<const double> b) {
        pt.steps.push_back(m);
        pt.times.push_back(t);
        Field d{ps.base.grid, t, std::vector<double>(a.size())};
        for (std::size_t i = 0; i < a.size(); ++i) d.values[i] = a[i] - b[i];
        pt.diff.push_back(std::move(d));
      },
      &pt.clips1, &pt.clips2);
  return pt;
}

/// Writes one binary record per snapshot plus manifest.txt into `dir` (one directory per replica) (config keys, fingerprint, version,
/// clip counts). Returns the written file names.
inline std::vector<std::string> dump_trajectory(const Trajectory& tr, const SimulationSpec& spec,
                                                const std::filesystem::path& dir, const KeyValues& extra = {}) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < tr.fields.size(); ++i) {
    NoiseField nf;
    nf.grid = spec.grid;
    nf.kernel = spec.kernel;
    nf.dt = spec.grid.step();
    nf.stream = RngStream{spec.seed, tr.replica, static_cast<std::uint64_t>(tr.steps[i])};
    nf.values = tr.fields[i].values;
    char name[64];
    std::snprintf(name, sizeof name, "r%04llu_s%08ld.bin", static_cast<unsigned long long>(tr.replica), tr.steps[i]);
    write_field((dir / name).string(), nf);
    names.emplace_back(name);
  }
  KeyValues kv = spec.describe();
  kv.merge(KeyValues(extra));
  kv["fingerprint"] = tr.fingerprint;
  kv["version"] = kVersion;
  kv["replica"] = std::to_string(tr.replica);
  kv["clip.count"] = std::to_string(tr.clips.count);
  kv["clip.max_magnitude"] = format_double(tr.clips.max_magnitude);
  kv["snapshots"] = std::to_string(tr.fields.size());
  std::ofstream os(dir / "manifest.txt", std::ios::binary);
  require(static_cast<bool>(os), ErrorKind::input, "cannot write manifest in " + dir.string());
  os << canonical_text(kv);
  names.emplace_back("manifest.txt");
  return names;
}

}  // namespace spdelab

#endif  // SPDELAB_SOLVER_HPP
