#pragma once

#include <cstdint>
#include <string_view>
#include <variant>

#include "tqkd/channel.hpp"
#include "tqkd/entropy.hpp"

namespace tqkd {

enum class ProtocolKind { BB84, LM05, SDC };

/// Protocol identity plus the two constants the key-length formulas need:
/// the maximal overlap between the encoding-mode and control-mode
/// measurement operators, and how many physical signals one round costs.
struct Protocol {
  ProtocolKind kind = ProtocolKind::BB84;

  static constexpr Protocol bb84() { return {ProtocolKind::BB84}; }
  static constexpr Protocol lm05() { return {ProtocolKind::LM05}; }
  static constexpr Protocol sdc() { return {ProtocolKind::SDC}; }

  /// Measurement overlap: 1/2 for BB84 and LM05, 1/4 for SDC.
  double overlap() const;

  /// -log2(overlap): raw bits per encoding-mode sample (1 or 2).
  double uncertainty_bits() const;

  /// Signals consumed per round: 2 for SDC (entangled pairs), 1 otherwise.
  int pair_factor() const;

  std::string_view name() const;

  friend constexpr bool operator==(const Protocol&, const Protocol&) = default;
};

struct SecurityParams {
  /// Smoothing / security parameter, in (0, 1).
  double eps_s = 1e-10;
  /// Practical error-correction cost multiplier applied to the Shannon-limit
  /// leak; 1 means the ideal limit.
  double ec_cofactor = 1.0;
};

void validate(const SecurityParams& sec);

/// How a block of transmitted signals splits into encoding-mode samples,
/// control-mode samples and discarded rounds.
struct BlockAllocation {
  ProtocolKind kind = ProtocolKind::BB84;
  std::uint64_t total_signals = 0;    ///< M: qubits, or pairs for SDC
  std::uint64_t em_samples = 0;       ///< n: bits (BB84/LM05) or quaternary digits (SDC)
  std::uint64_t cm_samples = 0;       ///< k
  std::uint64_t em_bits_effective = 0;///< n + floor(sqrt(n k)) for LM05, else n
  std::uint64_t wasted = 0;           ///< total - em_bits_effective - cm
  double em_probability = 0.0;        ///< c = sqrt(n) / (sqrt(n) + sqrt(k))
};

/// Splits `total_signals` so that `cm_samples` control-mode samples are
/// expected: n = round((sqrt(M) - sqrt(k))^2) and c = sqrt(n)/(sqrt(n)+sqrt(k)),
/// under which c*M ~ n_e for LM05 and c^2*M ~ n for BB84/SDC.
/// Throws InfeasibleAllocation when k is too large for M (n would be < 1).
BlockAllocation allocate(std::uint64_t total_signals, std::uint64_t cm_samples,
                         Protocol p);

/// Per-term decomposition of a finite key length.
struct KeyLengthBreakdown {
  std::uint64_t raw_bits = 0;   ///< 2n for SDC, n_e for LM05, n for BB84
  double pa_penalty = 0.0;      ///< privacy-amplification term
  double ec_leak = 0.0;         ///< error-correction leakage
  double const_term = 0.0;      ///< log2(2 / eps_s^2)
  std::uint64_t key_length = 0; ///< max(0, floor(raw - pa - ec - const))
  double efficiency = 0.0;      ///< key_length / (pair_factor * total_signals)
};

/// L_SDC = floor( n [2 - 2 h2(q/2 + mu(n,k)) - h4(Q_E)] - log2(2/eps^2) ),
/// clamped at 0; efficiency counts each entangled pair as two signals.
KeyLengthBreakdown key_length_sdc(const BlockAllocation& alloc,
                                  const ChannelSpec& ch,
                                  const SecurityParams& sec);

/// L_LM05 = floor( n_e [1 - h2(q/2 + mu(n_e,k)) - h2(Q_f)] - log2(2/eps^2) ).
/// The fluctuation term takes n_e, not n.
KeyLengthBreakdown key_length_lm05(const BlockAllocation& alloc,
                                   const ChannelSpec& ch,
                                   const SecurityParams& sec);

/// Asymmetric BB84 baseline, same template with n and EM error q/2.
KeyLengthBreakdown key_length_bb84(const BlockAllocation& alloc,
                                   const ChannelSpec& ch,
                                   const SecurityParams& sec);

/// Dispatches on alloc.kind.
KeyLengthBreakdown key_length(const BlockAllocation& alloc,
                              const ChannelSpec& ch,
                              const SecurityParams& sec);

/// Infinite-key efficiency (unclamped; negative means the protocol is dead):
///   BB84: 1 - 2 h2(q/2)
///   LM05: 1 - h2(q/2) - h2(Q_f)
///   SDC:  1 - h2(q/2) - h4(Q_E)/2
double asymptotic_efficiency(Protocol p, const ChannelSpec& ch);

/// Scalar error rate for LM05/BB84, full triple for SDC.
using ErrorStat = std::variant<double, PauliErrorTriple>;

/// Devetak-Winter lower bound in bits per encoding-mode round, unclamped:
/// 2 - h4(cm) - h4(em) for SDC, 1 - h2(cm) - h2(em) otherwise.
/// Throws std::invalid_argument when the argument arity does not match the
/// protocol.
double dw_rate(Protocol p, const ErrorStat& cm_error, const ErrorStat& em_error);

}  // namespace tqkd
