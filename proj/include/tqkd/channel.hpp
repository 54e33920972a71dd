#pragma once

#include "tqkd/entropy.hpp"

namespace tqkd {

/// How the forward and backward depolarizing channels relate. Independent
/// channels compose bit errors as e1(1-e2) + e2(1-e1); the correlated model
/// stipulates e1 = e2 = e_m instead.
enum class ChannelMode { Independent, Correlated };

/// Two-way depolarizing channel: each traversal replaces the qubit by the
/// maximally mixed state with probability q (equivalently applies each Pauli
/// with probability q/4).
struct ChannelSpec {
  double q = 0.0;
  ChannelMode mode = ChannelMode::Independent;
};

/// Throws std::domain_error unless 0 <= q <= 1.
void validate(const ChannelSpec& ch);

/// Bit error rate of a single path as seen in control mode: q/2, identical
/// in both channel modes.
double cm_bit_error(const ChannelSpec& ch);

/// LM05 encoding-mode bit error rate: q(1 - q/2) for independent channels
/// (two concatenated traversals), q/2 for the correlated model.
double lm05_em_error(const ChannelSpec& ch);

/// SDC encoding-mode symbol error statistics: the symmetric triple with each
/// component (2q - q^2)/4 for independent channels, q/4 for correlated.
PauliErrorTriple sdc_em_error(const ChannelSpec& ch);

/// Net depolarizing strength of two concatenated depolarizing channels:
/// qa + qb - qa*qb. Throws std::domain_error outside [0, 1].
double compose_depolarizing(double qa, double qb);

}  // namespace tqkd
