#include "tqkd/entropy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tqkd {
namespace {

// -p ln(p), extended continuously to p = 0. The subnormal guard keeps
// -inf * 0 out of the sum.
double neg_p_ln_p(double p) {
  if (p < 1e-300) return 0.0;
  return -p * std::log(p);
}

}  // namespace

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("binary_entropy: p must lie in [0, 1]");
  }
  return (neg_p_ln_p(p) + neg_p_ln_p(1.0 - p)) / std::numbers::ln2;
}

double quaternary_entropy(const PauliErrorTriple& t) {
  constexpr double slack = 1e-12;
  const bool components_ok = t.q1 >= 0.0 && t.q1 <= 1.0 && t.q2 >= 0.0 &&
                             t.q2 <= 1.0 && t.q3 >= 0.0 && t.q3 <= 1.0;
  if (!components_ok || !(t.sum() <= 1.0 + slack)) {
    throw std::domain_error(
        "quaternary_entropy: components must lie in [0, 1] with q1+q2+q3 <= 1");
  }
  const double rest = std::max(0.0, 1.0 - t.sum());
  return (neg_p_ln_p(t.q1) + neg_p_ln_p(t.q2) + neg_p_ln_p(t.q3) +
          neg_p_ln_p(rest)) /
         std::numbers::ln2;
}

double statistical_fluctuation(std::uint64_t n, std::uint64_t k, double eps_s) {
  if (n == 0 || k == 0) {
    throw std::domain_error("statistical_fluctuation: n and k must be >= 1");
  }
  if (!(eps_s > 0.0 && eps_s < 1.0)) {
    throw std::domain_error("statistical_fluctuation: eps_s must lie in (0, 1)");
  }
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  return std::sqrt((dn + dk) / (dn * dk) * ((dk + 1.0) / dk) *
                   std::log(2.0 / eps_s));
}

}  // namespace tqkd
