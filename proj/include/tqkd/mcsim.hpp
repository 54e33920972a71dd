#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tqkd/keyrate.hpp"

namespace tqkd {

/// Pure per-round building blocks of the simulator, exposed so the decoding
/// rules can be checked exhaustively.
namespace sim {

/// Pauli group modulo phase as X/Z toggle bits: bit 0 flips Z-basis outcomes
/// (X component), bit 1 flips X-basis outcomes (Z component).
/// I = 0, X = 1, Z = 2, Y = 3; composition is XOR.
using Pauli = std::uint8_t;

constexpr Pauli kIdentity = 0;

constexpr bool flips_z_basis(Pauli p) { return p & 1; }
constexpr bool flips_x_basis(Pauli p) { return p & 2; }
constexpr bool flips_basis(Pauli p, bool x_basis) {
  return x_basis ? flips_x_basis(p) : flips_z_basis(p);
}
constexpr Pauli compose(Pauli a, Pauli b) { return a ^ b; }

/// LM05 unitaries {I, sigma_x, sigma_z, i sigma_y} indexed by their toggle
/// code. With the two-bit labels 00, 10, 01, 11 the key bit (first bit of
/// the label) equals the X-toggle bit.
constexpr int lm05_key_bit(Pauli u) { return u & 1; }

/// Reverse reconciliation: when Bob measured in X and Alice discloses that
/// her unitary came from {sigma_x, sigma_z}, Bob flips his raw bit.
constexpr bool lm05_rr_flip(Pauli u, bool x_basis) {
  return x_basis && (u == 1 || u == 2);
}

/// Bob's raw EM bit (prepared XOR measured) after encoding `u` with channel
/// Paulis `fwd` and `bwd`, plus the RR correction.
constexpr int lm05_decoded_bit(Pauli u, Pauli fwd, Pauli bwd, bool x_basis) {
  const bool raw = flips_basis(fwd, x_basis) ^ flips_basis(u, x_basis) ^
                   flips_basis(bwd, x_basis);
  return static_cast<int>(raw ^ lm05_rr_flip(u, x_basis));
}

/// SDC Bell outcome relative to the source Bell state: Alice's Pauli and the
/// channel Paulis each displace the outcome by their own toggle code.
constexpr Pauli sdc_bell_shift(Pauli u, Pauli fwd, Pauli bwd) {
  return compose(u, compose(fwd, bwd));
}

}  // namespace sim

enum class SamplingMode {
  Auto,            ///< microscopic for independent channels, else statistics-level
  Microscopic,     ///< exact Pauli-frame round simulation
  Phenomenological ///< Bernoulli draws at the stipulated error rates
};

struct SimConfig {
  Protocol protocol;
  ChannelSpec channel;
  std::uint64_t rounds = 0;
  /// Encoding-mode probability; doubles as the preferred-basis probability
  /// (Bob's p_Z for LM05 preparation, both parties' Z bias for BB84).
  double em_probability = 0.5;
  std::uint64_t seed = 1;
  SamplingMode sampling = SamplingMode::Auto;
};

/// An empirical rate with its binomial standard error.
struct RateEstimate {
  std::uint64_t errors = 0;
  std::uint64_t samples = 0;

  double rate() const {
    return samples == 0 ? 0.0
                        : static_cast<double>(errors) /
                              static_cast<double>(samples);
  }
  double std_error() const {
    if (samples == 0) return 0.0;
    const double p = rate();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  }
};

struct SimReport {
  std::uint64_t em_count = 0;
  std::uint64_t cm_count = 0;
  std::uint64_t wasted_count = 0;
  /// Bit error rate for LM05/BB84; any-symbol error rate for SDC.
  RateEstimate em_error;
  /// SDC only: empirical triple (bit-flip only, phase-flip only, both).
  std::array<RateEstimate, 3> em_pauli{};
  /// Per-path control-mode errors. BB84 has no backward path.
  RateEstimate cm_forward;
  RateEstimate cm_backward;
  bool phenomenological = false;
};

/// Runs `rounds` protocol rounds and tallies sift classes and error rates.
/// Fixed (config, seed) gives a bit-identical report regardless of the
/// worker count. Correlated channels reject microscopic sampling with a
/// domain error (no single-Pauli model reproduces e1 = e2 = e_m); Auto picks
/// statistics-level sampling for them.
SimReport simulate(const SimConfig& cfg, unsigned threads = 0);

struct CountingCheck {
  std::string label;
  std::uint64_t observed = 0;
  double expected = 0.0;
  double std_dev = 0.0;
  double zscore = 0.0;
  bool within_3sigma = false;
};

struct CountingReport {
  std::vector<CountingCheck> checks;
  bool all_within_3sigma = false;
};

/// Simulates alloc.total_signals rounds at alloc.em_probability and compares
/// the empirical (em, cm, wasted) split against the allocation, with
/// binomial standard errors.
CountingReport verify_counting(const SimConfig& cfg,
                               const BlockAllocation& alloc);

}  // namespace tqkd
