#ifndef SPDELAB_ESTIMATORS_HPP
#define SPDELAB_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "spdelab/errors.hpp"
#include "spdelab/fingerprint.hpp"
#include "spdelab/grid.hpp"
#include "spdelab/solver.hpp"
#include "spdelab/version.hpp"

namespace spdelab {

enum class Direction { space, time };

inline std::string_view to_string(Direction d) { return d == Direction::space ? "space" : "time"; }

inline constexpr std::size_t kMinAnchors = 100;

/// One row of a structure-function table.
struct MomentRow {
  double lag = 0.0;  // physical lag (space units or time)
  double moment = 0.0;
  double std_error = 0.0;
  std::size_t anchors = 0;
};

/// Accumulates E|v(a + lag) - v(a)|^p over anchors. Anchors are grouped into sampling units
/// (normally one unit per replica); standard errors come from the spread of unit means, or of
/// snapshot means when only one unit exists.
class MomentAccumulator {
 public:
  MomentAccumulator(std::vector<double> lags, double p) : lags_(std::move(lags)), p_(p), rows_(lags_.size()) {
    require(p > 0.0, ErrorKind::precondition, "moment order p must be > 0");
  }

  double p() const { return p_; }
  const std::vector<double>& lags() const { return lags_; }

  /// Adds one group of anchors for lag index li (sum of |increment|^p and anchor count).
  void add(std::size_t li, double sum, std::size_t count) {
    if (count == 0) return;
    auto& r = rows_[li];
    r.sum += sum;
    r.count += count;
    r.unit_sum += sum;
    r.unit_count += count;
    double m = sum / static_cast<double>(count);
    r.snap_sum += m;
    r.snap_sum2 += m * m;
    ++r.snaps;
  }

  /// Closes the current sampling unit.
  void end_unit() {
    for (auto& r : rows_) {
      if (r.unit_count == 0) continue;
      double m = r.unit_sum / static_cast<double>(r.unit_count);
      r.units_sum += m;
      r.units_sum2 += m * m;
      ++r.units;
      r.unit_sum = 0.0;
      r.unit_count = 0;
    }
  }

  std::size_t anchors(std::size_t li) const { return rows_[li].count; }

  /// Folds another accumulator (same lags and p) into this one. Units closed in `other` stay
  /// separate units; merging replicas in a fixed order keeps results bit-stable.
  void merge(const MomentAccumulator& other) {
    require(other.lags_ == lags_ && other.p_ == p_, ErrorKind::input, "merging incompatible moment accumulators");
    for (std::size_t li = 0; li < rows_.size(); ++li) {
      auto& r = rows_[li];
      const auto& o = other.rows_[li];
      r.sum += o.sum;
      r.count += o.count;
      r.unit_sum += o.unit_sum;
      r.unit_count += o.unit_count;
      r.units_sum += o.units_sum;
      r.units_sum2 += o.units_sum2;
      r.units += o.units;
      r.snap_sum += o.snap_sum;
      r.snap_sum2 += o.snap_sum2;
      r.snaps += o.snaps;
    }
  }

  std::vector<MomentRow> table() const {
    std::vector<MomentRow> out;
    for (std::size_t li = 0; li < lags_.size(); ++li) {
      const auto& r = rows_[li];
      MomentRow row;
      row.lag = lags_[li];
      row.anchors = r.count;
      if (r.count == 0) {
        out.push_back(row);
        continue;
      }
      row.moment = r.sum / static_cast<double>(r.count);
      auto se = [](double s, double s2, std::size_t k) {
        if (k < 2) return 0.0;
        double kk = static_cast<double>(k), mean = s / kk;
        return std::sqrt(std::max(0.0, (s2 - kk * mean * mean) / (kk - 1.0)) / kk);
      };
      row.std_error = r.units >= 2 ? se(r.units_sum, r.units_sum2, r.units) : se(r.snap_sum, r.snap_sum2, r.snaps);
      out.push_back(row);
    }
    return out;
  }

 private:
  struct Row {
    double sum = 0.0;
    std::size_t count = 0;
    double unit_sum = 0.0;
    std::size_t unit_count = 0;
    double units_sum = 0.0, units_sum2 = 0.0;
    std::size_t units = 0;
    double snap_sum = 0.0, snap_sum2 = 0.0;
    std::size_t snaps = 0;
  };
  std::vector<double> lags_;
  double p_;
  std::vector<Row> rows_;
};

inline double abs_pow(double v, double p) {
  v = std::abs(v);
  return p == 2.0 ? v * v : std::pow(v, p);
}

/// Spatial increments along the first axis (periodic), optionally restricted to anchors with
/// mask[x] != 0. `lag_cells` must match the accumulator lags in order.
inline void add_space_increments(MomentAccumulator& acc, const GridSpec& g, std::span<const double> u,
                                 std::span<const int> lag_cells, std::span<const unsigned char> mask = {}) {
  const std::size_t n = g.n, rows = g.dim == 1 ? 1 : n;
  for (std::size_t li = 0; li < lag_cells.size(); ++li) {
    const std::size_t lag = static_cast<std::size_t>(lag_cells[li]);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < rows; ++j) {
        std::size_t a = g.dim == 1 ? i : i * n + j;
        if (!mask.empty() && !mask[a]) continue;
        std::size_t b = g.dim == 1 ? (i + lag) % n : ((i + lag) % n) * n + j;
        sum += abs_pow(u[b] - u[a], acc.p());
        ++count;
      }
    }
    acc.add(li, sum, count);
  }
}

/// Streaming temporal increments: feed snapshots at a fixed cadence; lags in snapshot units.
class TimeIncrementStream {
 public:
  TimeIncrementStream(MomentAccumulator& acc, std::vector<int> lag_snaps)
      : acc_(acc), lags_(std::move(lag_snaps)), max_lag_(*std::max_element(lags_.begin(), lags_.end())) {}

  void push(std::span<const double> u) {
    history_.emplace_back(u.begin(), u.end());
    if (history_.size() > static_cast<std::size_t>(max_lag_) + 1) history_.pop_front();
    const auto& now = history_.back();
    for (std::size_t li = 0; li < lags_.size(); ++li) {
      if (history_.size() <= static_cast<std::size_t>(lags_[li])) continue;
      const auto& then = history_[history_.size() - 1 - static_cast<std::size_t>(lags_[li])];
      double sum = 0.0;
      for (std::size_t x = 0; x < now.size(); ++x) sum += abs_pow(now[x] - then[x], acc_.p());
      acc_.add(li, sum, now.size());
    }
  }

  /// Ends a replica: clears the history and closes the sampling unit.
  void end_unit() {
    history_.clear();
    acc_.end_unit();
  }

 private:
  MomentAccumulator& acc_;
  std::vector<int> lags_;
  int max_lag_;
  std::deque<std::vector<double>> history_;
};

struct HolderReport {
  Direction direction = Direction::space;
  double p = 2.0;
  std::vector<MomentRow> rows;
  double slope = 0.0;
  double exponent = 0.0;
  double std_error = 0.0;
  double t_min = 0.0, t_end = 0.0;
  std::string conditioning = "none";
  double xi = 0.0, eps = 0.0;
  std::size_t min_anchors = 0;
};

/// Least-squares slope of log moment against log lag.
inline HolderReport fit_holder(std::vector<MomentRow> rows, double p, Direction dir) {
  require(rows.size() >= 2, ErrorKind::precondition, "exponent fit needs >= 2 lags");
  HolderReport rep;
  rep.direction = dir;
  rep.p = p;
  rep.min_anchors = rows.front().anchors;
  for (const auto& r : rows) rep.min_anchors = std::min(rep.min_anchors, r.anchors);
  if (rep.min_anchors < kMinAnchors)
    fail(ErrorKind::insufficient_data, "only " + std::to_string(rep.min_anchors) + " anchors (need " +
                                           std::to_string(kMinAnchors) + ")");
  for (const auto& r : rows)
    require(r.moment > 0.0, ErrorKind::insufficient_data, "structure function vanishes at lag " + format_double(r.lag));
  const std::size_t k = rows.size();
  double sx = 0, sy = 0;
  for (const auto& r : rows) {
    sx += std::log(r.lag);
    sy += std::log(r.moment);
  }
  double mx = sx / k, my = sy / k, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    double dx = std::log(r.lag) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(r.moment) - my);
  }
  rep.slope = sxy / sxx;
  double ssr = 0;
  for (const auto& r : rows) {
    double e = std::log(r.moment) - (my + rep.slope * (std::log(r.lag) - mx));
    ssr += e * e;
  }
  double se_slope = k > 2 ? std::sqrt(ssr / static_cast<double>(k - 2) / sxx) : 0.0;
  rep.exponent = rep.slope / p;
  rep.std_error = std::max(se_slope / p, 1e-12);
  rep.rows = std::move(rows);
  return rep;
}

/// Converts physical spatial lags into whole cells (exact multiples of h required).
inline std::vector<int> lag_cells(const GridSpec& g, const std::vector<double>& lags) {
  std::vector<int> cells;
  for (double l : lags) {
    long c = std::lround(l / g.h());
    require(c >= 1 && c < g.n && std::abs(c * g.h() - l) <= 1e-9 * l, ErrorKind::precondition,
            "lag " + format_double(l) + " is not resolvable on the grid");
    cells.push_back(static_cast<int>(c));
  }
  return cells;
}

/// Snapshots of `traj` with time in [t_min, t_end].
inline std::vector<std::size_t> window_indices(const Trajectory& traj, double t_min, double t_end) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    if (traj.times[i] >= t_min - 1e-12 && traj.times[i] <= t_end + 1e-12) idx.push_back(i);
  return idx;
}

/// Structure function of trajectories (one sampling unit per trajectory). Spatial lags are
/// physical distances; temporal lags are physical times, multiples of the snapshot spacing.
inline std::vector<MomentRow> structure_function(std::span<const Trajectory> trajs, double p, Direction dir,
                                                 const std::vector<double>& lags, double t_min, double t_end) {
  require(!trajs.empty(), ErrorKind::insufficient_data, "no trajectories");
  require(t_min < t_end, ErrorKind::precondition, "empty estimation window");
  MomentAccumulator acc(lags, p);
  require(!trajs.front().fields.empty(), ErrorKind::insufficient_data, "trajectory without snapshots");
  const GridSpec g = trajs.front().fields.front().grid;
  if (dir == Direction::space) {
    auto cells = lag_cells(g, lags);
    for (const auto& tr : trajs) {
      for (std::size_t i : window_indices(tr, t_min, t_end)) add_space_increments(acc, g, tr.fields[i].values, cells);
      acc.end_unit();
    }
  } else {
    for (const auto& tr : trajs) {
      auto idx = window_indices(tr, t_min, t_end);
      require(idx.size() >= 2, ErrorKind::insufficient_data, "fewer than two snapshots in the window");
      double spacing = tr.times[idx[1]] - tr.times[idx[0]];
      for (std::size_t k = 1; k < idx.size(); ++k)
        require(std::abs(tr.times[idx[k]] - tr.times[idx[k - 1]] - spacing) <= 1e-9 * spacing,
                ErrorKind::precondition, "temporal structure function needs evenly spaced snapshots");
      std::vector<int> snaps;
      for (double l : lags) {
        long s = std::lround(l / spacing);
        require(s >= 1 && std::abs(s * spacing - l) <= 1e-9 * l, ErrorKind::precondition,
                "time lag " + format_double(l) + " is not a multiple of the snapshot spacing");
        snaps.push_back(static_cast<int>(s));
      }
      TimeIncrementStream ts(acc, snaps);
      for (std::size_t i : idx) ts.push(tr.fields[i].values);
      ts.end_unit();
    }
  }
  auto table = acc.table();
  for (const auto& r : table)
    if (r.anchors < kMinAnchors)
      fail(ErrorKind::insufficient_data, "lag " + format_double(r.lag) + " has only " + std::to_string(r.anchors) +
                                             " anchors (need " + std::to_string(kMinAnchors) + ")");
  return table;
}

inline HolderReport holder_exponent(std::span<const Trajectory> trajs, double p, Direction dir,
                                    const std::vector<double>& lags, double t_min, double t_end) {
  auto rep = fit_holder(structure_function(trajs, p, dir, lags, t_min, t_end), p, dir);
  rep.t_min = t_min;
  rep.t_end = t_end;
  return rep;
}

/// sup_t sup_x |u|^p exp(-lambda |x~|), x~ = signed distance of the first coordinate from the
/// domain centre. One value per replica is folded in; quantiles are over replicas.
class WeightedSupAccumulator {
 public:
  WeightedSupAccumulator(const GridSpec& g, double p, double lambda) : grid_(g), p_(p), lambda_(lambda) {
    require(p > 0.0 && lambda > 0.0, ErrorKind::precondition, "weighted sup moment needs p > 0, lambda > 0");
    weight_.resize(g.size());
    const std::size_t n = g.n;
    for (std::size_t q = 0; q < g.size(); ++q) {
      std::size_t i = g.dim == 1 ? q : q / n;
      double x = static_cast<double>(i) * g.h() - 0.5 * g.l;
      weight_[q] = std::exp(-lambda * std::abs(x));
    }
  }

  void observe(std::span<const double> u) {
    for (std::size_t q = 0; q < u.size(); ++q) current_ = std::max(current_, abs_pow(u[q], p_) * weight_[q]);
  }

  void end_replica() {
    per_replica_.push_back(current_);
    current_ = 0.0;
  }

  struct Result {
    double mean = 0.0;
    double q10 = 0.0, q50 = 0.0, q90 = 0.0;
    std::vector<double> per_replica;
  };

  Result result() const {
    Result r;
    r.per_replica = per_replica_;
    if (per_replica_.empty()) return r;
    double s = 0.0;
    for (double v : per_replica_) s += v;
    r.mean = s / static_cast<double>(per_replica_.size());
    auto sorted = per_replica_;
    std::sort(sorted.begin(), sorted.end());
    auto q = [&](double f) {
      double pos = f * static_cast<double>(sorted.size() - 1);
      std::size_t i = static_cast<std::size_t>(pos);
      double w = pos - static_cast<double>(i);
      return i + 1 < sorted.size() ? (1 - w) * sorted[i] + w * sorted[i + 1] : sorted[i];
    };
    r.q10 = q(0.1);
    r.q50 = q(0.5);
    r.q90 = q(0.9);
    return r;
  }

 private:
  GridSpec grid_;
  double p_, lambda_;
  std::vector<double> weight_;
  double current_ = 0.0;
  std::vector<double> per_replica_;
};

inline WeightedSupAccumulator::Result weighted_sup_moment(std::span<const Trajectory> trajs, double p, double lambda) {
  require(!trajs.empty() && !trajs.front().fields.empty(), ErrorKind::insufficient_data, "no snapshots");
  WeightedSupAccumulator acc(trajs.front().fields.front().grid, p, lambda);
  for (const auto& tr : trajs) {
    for (const auto& f : tr.fields) acc.observe(f.values);
    acc.end_replica();
  }
  return acc.result();
}

/// Relative change of a statistic under refinement; flagged when above `limit`.
struct RefinementDrift {
  double coarse = 0.0, fine = 0.0, drift = 0.0;
  bool flagged = false;
};

inline RefinementDrift refinement_drift(double coarse, double fine, double limit = 0.15) {
  RefinementDrift d{coarse, fine, 0.0, false};
  d.drift = coarse != 0.0 ? std::abs(fine - coarse) / std::abs(coarse) : (fine == 0.0 ? 0.0 : INFINITY);
  d.flagged = !(d.drift <= limit);
  return d;
}

/// Upper end of the small-value exponent window: min((1 - alpha/2) / (1 - gamma), 1).
inline double critical_exponent_limit(double alpha, double gamma) {
  require(alpha > 0.0 && alpha < 1.0 && gamma > 0.0 && gamma <= 1.0, ErrorKind::domain,
          "critical exponent needs alpha in (0,1), gamma in (0,1]");
  if (gamma >= 1.0) return 1.0;
  return std::min((1.0 - 0.5 * alpha) / (1.0 - gamma), 1.0);
}

/// xi_0 = (1 - alpha/2) / 2, xi_{n+1} = [(xi_n gamma + 1 - alpha/2) ^ 1] (1 - 1/(n+3)).
inline std::vector<double> exponent_recursion(double alpha, double gamma, int steps) {
  require(alpha > 0.0 && alpha < 1.0 && gamma > 0.0 && gamma <= 1.0, ErrorKind::domain,
          "exponent recursion needs alpha in (0,1), gamma in (0,1]");
  require(steps >= 0, ErrorKind::precondition, "steps must be >= 0");
  std::vector<double> xi{0.5 * (1.0 - 0.5 * alpha)};
  for (int n = 0; n < steps; ++n)
    xi.push_back(std::min(xi.back() * gamma + 1.0 - 0.5 * alpha, 1.0) * (1.0 - 1.0 / (n + 3.0)));
  return xi;
}

/// Default conditioning exponent: midpoint of (1 - alpha/2, critical_exponent_limit).
inline double default_conditioning_xi(double alpha, double gamma) {
  return 0.5 * ((1.0 - 0.5 * alpha) + critical_exponent_limit(alpha, gamma));
}

/// Marks x with |v(x^)| <= threshold for some x^ within `radius` cells along the first axis
/// (periodic). Uses a running count over the window.
inline std::vector<unsigned char> small_value_mask(const GridSpec& g, std::span<const double> v, double threshold,
                                                   int radius) {
  const std::size_t n = g.n, rows = g.dim == 1 ? 1 : n;
  std::vector<unsigned char> mask(v.size(), 0);
  std::vector<int> hit(n);
  for (std::size_t j = 0; j < rows; ++j) {
    auto at = [&](std::size_t i) { return g.dim == 1 ? i : i * n + j; };
    for (std::size_t i = 0; i < n; ++i) hit[i] = std::abs(v[at(i)]) <= threshold ? 1 : 0;
    const int w = std::min<int>(radius, static_cast<int>(n) / 2);
    int count = 0;
    for (int k = -w; k <= w; ++k) count += hit[static_cast<std::size_t>((k + static_cast<int>(n)) % static_cast<int>(n))];
    for (std::size_t i = 0; i < n; ++i) {
      mask[at(i)] = count > 0;
      int out = static_cast<int>((i + n - static_cast<std::size_t>(w)) % n);
      int in = static_cast<int>((i + static_cast<std::size_t>(w) + 1) % n);
      count += hit[static_cast<std::size_t>(in)] - hit[static_cast<std::size_t>(out)];
    }
  }
  return mask;
}

struct ConditionalReport {
  HolderReport unconditional;
  std::vector<HolderReport> conditional;  // one per eps
  std::vector<double> occupancy;          // fraction of anchors retained per eps
  std::vector<double> gap;                // conditional - unconditional exponent per eps
};

/// Streaming small-value conditioning on difference fields u~ = u1 - u2.
class ConditionalAccumulator {
 public:
  ConditionalAccumulator(const GridSpec& g, double xi, std::vector<double> eps, std::vector<double> lags, double p)
      : grid_(g), xi_(xi), eps_(std::move(eps)), lags_(std::move(lags)), p_(p),
        cells_(lag_cells(g, lags_)), uncond_(lags_, p) {
    for (double e : eps_) {
      require(e >= 4.0 * g.h() - 1e-12, ErrorKind::precondition,
              "eps=" + format_double(e) + " is below the resolvable scale 4h");
      cond_.emplace_back(lags_, p);
    }
    require(xi > 0.0, ErrorKind::precondition, "conditioning exponent must be > 0");
  }

  void observe(std::span<const double> diff) {
    for (double v : diff)
      if (v != 0.0) nontrivial_ = true;
    add_space_increments(uncond_, grid_, diff, cells_);
    for (std::size_t k = 0; k < eps_.size(); ++k) {
      int radius = static_cast<int>(std::floor(eps_[k] / grid_.h() + 1e-9));
      auto mask = small_value_mask(grid_, diff, std::pow(eps_[k], xi_), radius);
      add_space_increments(cond_[k], grid_, diff, cells_, mask);
    }
    total_anchors_ += diff.size();
  }

  void end_unit() {
    uncond_.end_unit();
    for (auto& c : cond_) c.end_unit();
  }

  /// Folds another accumulator with the same grid, xi, eps and lags into this one.
  void merge(const ConditionalAccumulator& other) {
    require(other.xi_ == xi_ && other.eps_ == eps_ && grid_.same_space(other.grid_), ErrorKind::input,
            "merging incompatible conditional accumulators");
    uncond_.merge(other.uncond_);
    for (std::size_t k = 0; k < cond_.size(); ++k) cond_[k].merge(other.cond_[k]);
    total_anchors_ += other.total_anchors_;
    nontrivial_ = nontrivial_ || other.nontrivial_;
  }

  ConditionalReport result() const {
    require(nontrivial_, ErrorKind::precondition, "conditioning degenerate: difference field is identically zero");
    ConditionalReport rep;
    rep.unconditional = fit_holder(uncond_.table(), p_, Direction::space);
    for (std::size_t k = 0; k < eps_.size(); ++k) {
      auto table = cond_[k].table();
      std::size_t retained = table.front().anchors;
      for (const auto& r : table) retained = std::min(retained, r.anchors);
      double occ = static_cast<double>(cond_[k].anchors(0)) / static_cast<double>(total_anchors_);
      if (retained < kMinAnchors)
        fail(ErrorKind::insufficient_data, "conditioning set for eps=" + format_double(eps_[k]) + " has " +
                                               std::to_string(retained) + " anchors (occupancy " +
                                               format_double(occ) + ", need " + std::to_string(kMinAnchors) + ")");
      HolderReport h = fit_holder(std::move(table), p_, Direction::space);
      h.conditioning = "small-value";
      h.xi = xi_;
      h.eps = eps_[k];
      rep.gap.push_back(h.exponent - rep.unconditional.exponent);
      rep.occupancy.push_back(occ);
      rep.conditional.push_back(std::move(h));
    }
    return rep;
  }

 private:
  GridSpec grid_;
  double xi_;
  std::vector<double> eps_, lags_;
  double p_;
  std::vector<int> cells_;
  MomentAccumulator uncond_;
  std::vector<MomentAccumulator> cond_;
  std::size_t total_anchors_ = 0;
  bool nontrivial_ = false;
};

/// Small-value conditioned exponents of the difference fields of paired trajectories.
inline ConditionalReport conditional_regularity(std::span<const PairTrajectory> pairs, double xi,
                                                const std::vector<double>& eps, const std::vector<double>& lags,
                                                double p, double t_min, double t_end) {
  require(!pairs.empty() && !pairs.front().diff.empty(), ErrorKind::insufficient_data, "no paired snapshots");
  ConditionalAccumulator acc(pairs.front().diff.front().grid, xi, eps, lags, p);
  for (const auto& pr : pairs) {
    for (std::size_t i = 0; i < pr.diff.size(); ++i)
      if (pr.times[i] >= t_min - 1e-12 && pr.times[i] <= t_end + 1e-12) acc.observe(pr.diff[i].values);
    acc.end_unit();
  }
  auto rep = acc.result();
  rep.unconditional.t_min = t_min;
  rep.unconditional.t_end = t_end;
  for (auto& c : rep.conditional) {
    c.t_min = t_min;
    c.t_end = t_end;
  }
  return rep;
}

/// Per-replica divergence metrics of a pair: int |u~| dx and sup |u~| at each snapshot.
struct PairMetrics {
  std::vector<double> times, l1, sup;
  double sup_l1() const { return l1.empty() ? 0.0 : *std::max_element(l1.begin(), l1.end()); }
};

inline void observe_pair_metrics(PairMetrics& m, const GridSpec& g, double t, std::span<const double> diff) {
  double s = 0.0, mx = 0.0;
  for (double v : diff) {
    s += std::abs(v);
    mx = std::max(mx, std::abs(v));
  }
  m.times.push_back(t);
  m.l1.push_back(s * std::pow(g.h(), g.dim));
  m.sup.push_back(mx);
}

inline PairMetrics pair_metrics(const PairTrajectory& pt) {
  PairMetrics m;
  for (std::size_t i = 0; i < pt.diff.size(); ++i) observe_pair_metrics(m, pt.diff[i].grid, pt.times[i], pt.diff[i].values);
  return m;
}

inline double median(std::vector<double> v) {
  require(!v.empty(), ErrorKind::insufficient_data, "median of an empty sample");
  std::sort(v.begin(), v.end());
  std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

struct DeltaRow {
  double delta = 0.0;
  std::size_t replicas = 0;
  std::vector<double> times;
  std::vector<double> median_l1, median_sup;
  double median_sup_t_l1 = 0.0;  // median over replicas of sup_t int |u~|
};

struct UniquenessReport {
  std::vector<DeltaRow> rows;  // sorted by decreasing delta
  bool strictly_decreasing = false;  // median sup_t int |u~| strictly decreases with delta
};

struct DeltaRuns {
  double delta = 0.0;
  std::vector<PairMetrics> replicas;
};

inline UniquenessReport uniqueness_gap(std::vector<DeltaRuns> runs) {
  UniquenessReport rep;
  std::sort(runs.begin(), runs.end(), [](const DeltaRuns& a, const DeltaRuns& b) { return a.delta > b.delta; });
  for (const auto& r : runs) {
    require(!r.replicas.empty(), ErrorKind::insufficient_data, "delta without replicas");
    DeltaRow row;
    row.delta = r.delta;
    row.replicas = r.replicas.size();
    row.times = r.replicas.front().times;
    for (std::size_t i = 0; i < row.times.size(); ++i) {
      std::vector<double> l1, sup;
      for (const auto& m : r.replicas) {
        require(m.times.size() == row.times.size(), ErrorKind::input, "replicas have different snapshot times");
        l1.push_back(m.l1[i]);
        sup.push_back(m.sup[i]);
      }
      row.median_l1.push_back(median(l1));
      row.median_sup.push_back(median(sup));
    }
    std::vector<double> s;
    for (const auto& m : r.replicas) s.push_back(m.sup_l1());
    row.median_sup_t_l1 = median(s);
    rep.rows.push_back(std::move(row));
  }
  rep.strictly_decreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (!(rep.rows[i].median_sup_t_l1 < rep.rows[i - 1].median_sup_t_l1)) rep.strictly_decreasing = false;
  return rep;
}

// CSV output. Every row carries the run fingerprint and the library version.

inline void write_holder_csv_header(std::ostream& os) {
  os << "direction,p,lag,moment,moment_stderr,anchors,exponent,exponent_stderr,t_min,t_end,conditioning,xi,eps,"
        "fingerprint,version\n";
}

inline void write_holder_csv_rows(std::ostream& os, const HolderReport& r, const std::string& fp) {
  for (const auto& row : r.rows)
    os << to_string(r.direction) << ',' << format_double(r.p) << ',' << format_double(row.lag) << ','
       << format_double(row.moment) << ',' << format_double(row.std_error) << ',' << row.anchors << ','
       << format_double(r.exponent) << ',' << format_double(r.std_error) << ',' << format_double(r.t_min) << ','
       << format_double(r.t_end) << ',' << r.conditioning << ',' << format_double(r.xi) << ','
       << format_double(r.eps) << ',' << fp << ',' << kVersion << '\n';
}

inline void write_uniqueness_csv(std::ostream& os, const UniquenessReport& rep, const std::string& fp) {
  os << "delta,replicas,t,median_l1,median_sup,median_sup_t_l1,fingerprint,version\n";
  for (const auto& r : rep.rows)
    for (std::size_t i = 0; i < r.times.size(); ++i)
      os << format_double(r.delta) << ',' << r.replicas << ',' << format_double(r.times[i]) << ','
         << format_double(r.median_l1[i]) << ',' << format_double(r.median_sup[i]) << ','
         << format_double(r.median_sup_t_l1) << ',' << fp << ',' << kVersion << '\n';
}

}  // namespace spdelab

#endif  // SPDELAB_ESTIMATORS_HPP
