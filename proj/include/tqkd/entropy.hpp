#pragma once

#include <cstdint>

namespace tqkd {

/// Error statistics of a quaternary symbol carried over two binary channels:
/// probability of an error exclusively in the first channel (q1), exclusively
/// in the second (q2), and in both at once (q3). Each component lies in
/// [0, 1] and q1 + q2 + q3 <= 1.
struct PauliErrorTriple {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;

  static constexpr PauliErrorTriple symmetric(double x) { return {x, x, x}; }

  constexpr double sum() const { return q1 + q2 + q3; }

  friend constexpr bool operator==(const PauliErrorTriple&,
                                   const PauliErrorTriple&) = default;
};

/// Binary Shannon entropy in bits, with the 0*log(0) = 0 convention.
/// Throws std::domain_error when p lies outside [0, 1].
double binary_entropy(double p);

/// Shannon entropy in bits of the four-outcome distribution
/// (q1, q2, q3, 1 - q1 - q2 - q3). Result lies in [0, 2].
/// Throws std::domain_error when the triple violates its invariants.
double quaternary_entropy(const PauliErrorTriple& t);

/// Finite-size statistical fluctuation added to an observed control-mode
/// error rate before it enters the privacy-amplification bound:
///
///   sqrt( (n + k)/(n k) * (k + 1)/k * ln(2 / eps_s) )
///
/// Strictly decreasing in n for fixed k and in k for fixed n. Throws
/// std::domain_error when n or k is zero or eps_s is outside (0, 1).
double statistical_fluctuation(std::uint64_t n, std::uint64_t k, double eps_s);

}  // namespace tqkd
