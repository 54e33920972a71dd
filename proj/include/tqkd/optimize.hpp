#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tqkd/keyrate.hpp"

namespace tqkd {

/// Result of maximizing the key length over the control-mode sample size.
struct OptimumReport {
  std::uint64_t k_star = 0;
  BlockAllocation allocation;
  KeyLengthBreakdown breakdown;
  /// Coarse-scan (k, L) samples; filled only when requested.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> scan_trace;
};

/// Largest feasible control-mode sample size for a block of M signals.
std::uint64_t max_cm_samples(std::uint64_t total_signals);

/// Finds the integer k in [1, (sqrt(M)-1)^2] maximizing the key length, by a
/// multiplicative coarse scan (factor 1.2) followed by an exhaustive pass
/// over the bracketing interval. Ties break toward smaller k, matching an
/// exhaustive scan. When no k yields a positive key the report carries
/// k_star = 1 with key_length 0. Throws InfeasibleAllocation for M < 16.
OptimumReport optimize_k(std::uint64_t total_signals, const ChannelSpec& ch,
                         const SecurityParams& sec, Protocol p,
                         bool record_trace = false);

enum class SweepAxis { ErrorRate, BlockSize };

/// Grid description for one sweep. The axis is either the per-path error
/// rate q/2 (requires fixed `signals`) or the block size M (requires fixed
/// `qhalf`).
struct SweepSpec {
  std::vector<Protocol> protocols;
  ChannelMode mode = ChannelMode::Independent;
  SweepAxis axis = SweepAxis::ErrorRate;
  double axis_min = 0.0;
  double axis_max = 0.0;
  int points = 0;
  bool log_spacing = false;
  std::uint64_t signals = 0;  ///< fixed M for error-rate sweeps
  double qhalf = 0.0;         ///< fixed q/2 for block-size sweeps
  SecurityParams sec;
};

struct SweepCell {
  bool feasible = false;
  std::uint64_t k_star = 0;
  std::uint64_t key_length = 0;
  double efficiency = 0.0;
};

struct SweepRow {
  double axis_value = 0.0;
  std::vector<SweepCell> cells;  ///< one per protocol, in SweepSpec order
};

/// Optimizes every protocol at every grid point. Infeasible points become
/// empty cells rather than aborting the sweep. Grid points are evaluated
/// concurrently (threads = 0 picks the hardware default); the result is
/// assembled in axis order and does not depend on the worker count.
std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned threads = 0);

/// Largest q/2 at which the k-optimized key length is still positive,
/// located by bisection to a bracket width of 1e-5. Throws NoPositiveRate
/// when the protocol is dead already at q = 0. Only ch.mode is read; the
/// error rate is the search variable.
double zero_threshold(Protocol p, std::uint64_t total_signals,
                      const ChannelSpec& ch, const SecurityParams& sec);

/// Infinite-key analogue: largest q/2 with positive asymptotic efficiency.
double asymptotic_zero_threshold(Protocol p, ChannelMode mode);

/// q/2 at which the k-optimized efficiencies of a and b cross, by bisection
/// to 1e-5. The bracket runs from 0 to the smaller zero threshold. Throws
/// NoCrossover when one protocol dominates throughout.
double crossover(Protocol a, Protocol b, std::uint64_t total_signals,
                 const ChannelSpec& ch, const SecurityParams& sec);

/// Infinite-key analogue on the asymptotic efficiencies.
double asymptotic_crossover(Protocol a, Protocol b, ChannelMode mode);

}  // namespace tqkd
