#include "tqkd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "tqkd/detail/parallel.hpp"
#include "tqkd/errors.hpp"

namespace tqkd {

std::uint64_t max_cm_samples(std::uint64_t total_signals) {
  const double sm = std::sqrt(static_cast<double>(total_signals));
  if (sm < 2.0) {
    throw InfeasibleAllocation("max_cm_samples: block too small");
  }
  auto k = static_cast<std::uint64_t>(std::floor((sm - 1.0) * (sm - 1.0))) + 2;
  while (k > 1) {
    if (std::sqrt(static_cast<double>(k)) <= sm - 1.0) break;
    --k;
  }
  return k;
}

namespace {

std::uint64_t key_length_at(std::uint64_t total_signals, std::uint64_t k,
                            const ChannelSpec& ch, const SecurityParams& sec,
                            Protocol p) {
  return key_length(allocate(total_signals, k, p), ch, sec).key_length;
}

constexpr double kCoarseFactor = 1.2;

}  // namespace

OptimumReport optimize_k(std::uint64_t total_signals, const ChannelSpec& ch,
                         const SecurityParams& sec, Protocol p,
                         bool record_trace) {
  if (total_signals < 16) {
    throw InfeasibleAllocation(
        "optimize_k: need at least 16 signals for k >= 1 and n >= 1");
  }
  validate(ch);
  validate(sec);

  const std::uint64_t k_max = max_cm_samples(total_signals);

  std::vector<std::uint64_t> grid;
  for (std::uint64_t k = 1; k <= k_max;
       k = std::max(k + 1, static_cast<std::uint64_t>(
                               static_cast<double>(k) * kCoarseFactor))) {
    grid.push_back(k);
  }
  if (grid.back() != k_max) grid.push_back(k_max);

  OptimumReport report;
  std::size_t best = 0;
  std::uint64_t best_len = 0;
  bool have_best = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::uint64_t len = key_length_at(total_signals, grid[i], ch, sec, p);
    if (record_trace) report.scan_trace.emplace_back(grid[i], len);
    if (!have_best || len > best_len) {
      best = i;
      best_len = len;
      have_best = true;
    }
  }

  // The coarse maximum brackets the true one; the exhaustive pass over the
  // two neighbouring grid cells pins the exact argmax, smallest k first.
  const std::uint64_t lo = grid[best > 0 ? best - 1 : 0];
  const std::uint64_t hi = grid[std::min(best + 1, grid.size() - 1)];
  std::uint64_t k_star = lo;
  std::uint64_t len_star = 0;
  bool have_star = false;
  for (std::uint64_t k = lo; k <= hi; ++k) {
    const std::uint64_t len = key_length_at(total_signals, k, ch, sec, p);
    if (!have_star || len > len_star) {
      k_star = k;
      len_star = len;
      have_star = true;
    }
  }

  report.k_star = k_star;
  report.allocation = allocate(total_signals, k_star, p);
  report.breakdown = key_length(report.allocation, ch, sec);
  return report;
}

std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned threads) {
  if (spec.protocols.empty()) {
    throw std::invalid_argument("sweep: no protocols selected");
  }
  if (!(spec.axis_min < spec.axis_max)) {
    throw std::invalid_argument("sweep: grid min must be below max");
  }
  if (spec.points < 2) {
    throw std::invalid_argument("sweep: need at least two grid points");
  }
  if (spec.log_spacing && !(spec.axis_min > 0.0)) {
    throw std::invalid_argument("sweep: logarithmic grids require min > 0");
  }
  validate(spec.sec);

  std::vector<double> axis(spec.points);
  for (int i = 0; i < spec.points; ++i) {
    const double t = static_cast<double>(i) / (spec.points - 1);
    axis[i] = spec.log_spacing
                  ? std::exp(std::log(spec.axis_min) +
                             t * (std::log(spec.axis_max) - std::log(spec.axis_min)))
                  : spec.axis_min + t * (spec.axis_max - spec.axis_min);
  }
  // Block-size grids land on whole signal counts.
  if (spec.axis == SweepAxis::BlockSize) {
    for (double& v : axis) v = std::round(v);
  }

  std::vector<SweepRow> rows(spec.points);
  detail::parallel_for(axis.size(), threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.axis_value = axis[i];
    row.cells.resize(spec.protocols.size());
    for (std::size_t j = 0; j < spec.protocols.size(); ++j) {
      const double qhalf =
          spec.axis == SweepAxis::ErrorRate ? axis[i] : spec.qhalf;
      const std::uint64_t signals =
          spec.axis == SweepAxis::BlockSize
              ? static_cast<std::uint64_t>(axis[i])
              : spec.signals;
      try {
        const ChannelSpec ch{2.0 * qhalf, spec.mode};
        const OptimumReport opt =
            optimize_k(signals, ch, spec.sec, spec.protocols[j]);
        row.cells[j] = {true, opt.k_star, opt.breakdown.key_length,
                        opt.breakdown.efficiency};
      } catch (const std::domain_error&) {
        row.cells[j] = {};  // infeasible point: leave the cell empty
      }
    }
  });
  return rows;
}

namespace {

// Largest argument in [0, 0.5] where `alive` still holds, to a bracket of
// width `tol`. `alive(0)` must hold.
double bisect_largest_alive(const std::function<bool(double)>& alive,
                            double tol) {
  double lo = 0.0;
  double hi = 0.5;
  if (alive(hi)) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (alive(mid) ? lo : hi) = mid;
  }
  return lo;
}

double crossover_impl(const std::function<double(double)>& diff, double hi,
                      const char* what) {
  constexpr double tol = 1e-5;
  double lo = 0.0;
  const double d_lo = diff(lo);
  const double d_hi = diff(hi);
  if (std::abs(d_lo) < 1e-12 || std::abs(d_hi) < 1e-12 ||
      (d_lo > 0) == (d_hi > 0)) {
    throw NoCrossover(what);
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    ((diff(mid) > 0) == (d_lo > 0) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double zero_threshold(Protocol p, std::uint64_t total_signals,
                      const ChannelSpec& ch, const SecurityParams& sec) {
  const auto optimized_alive = [&](double qhalf) {
    const ChannelSpec scan{2.0 * qhalf, ch.mode};
    return optimize_k(total_signals, scan, sec, p).breakdown.key_length > 0;
  };
  if (!optimized_alive(0.0)) {
    throw NoPositiveRate("zero_threshold: no positive key length at q = 0");
  }
  return bisect_largest_alive(optimized_alive, 1e-5);
}

double asymptotic_zero_threshold(Protocol p, ChannelMode mode) {
  const auto alive = [&](double qhalf) {
    return asymptotic_efficiency(p, ChannelSpec{2.0 * qhalf, mode}) > 0.0;
  };
  if (!alive(0.0)) {
    throw NoPositiveRate("asymptotic_zero_threshold: dead at q = 0");
  }
  return bisect_largest_alive(alive, 1e-5);
}

double crossover(Protocol a, Protocol b, std::uint64_t total_signals,
                 const ChannelSpec& ch, const SecurityParams& sec) {
  const auto optimized_eff = [&](Protocol p, double qhalf) {
    const ChannelSpec scan{2.0 * qhalf, ch.mode};
    return optimize_k(total_signals, scan, sec, p).breakdown.efficiency;
  };
  const double hi = std::min(zero_threshold(a, total_signals, ch, sec),
                             zero_threshold(b, total_signals, ch, sec));
  return crossover_impl(
      [&](double qhalf) {
        return optimized_eff(a, qhalf) - optimized_eff(b, qhalf);
      },
      hi, "crossover: one protocol dominates over the whole bracket");
}

double asymptotic_crossover(Protocol a, Protocol b, ChannelMode mode) {
  const double hi = std::min(asymptotic_zero_threshold(a, mode),
                             asymptotic_zero_threshold(b, mode));
  return crossover_impl(
      [&](double qhalf) {
        const ChannelSpec ch{2.0 * qhalf, mode};
        return asymptotic_efficiency(a, ch) - asymptotic_efficiency(b, ch);
      },
      hi, "asymptotic_crossover: curves do not cross");
}

}  // namespace tqkd
