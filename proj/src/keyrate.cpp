#include "tqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tqkd/errors.hpp"

namespace tqkd {

double Protocol::overlap() const {
  return kind == ProtocolKind::SDC ? 0.25 : 0.5;
}

double Protocol::uncertainty_bits() const {
  return kind == ProtocolKind::SDC ? 2.0 : 1.0;
}

int Protocol::pair_factor() const {
  return kind == ProtocolKind::SDC ? 2 : 1;
}

std::string_view Protocol::name() const {
  switch (kind) {
    case ProtocolKind::BB84: return "bb84";
    case ProtocolKind::LM05: return "lm05";
    case ProtocolKind::SDC: return "sdc";
  }
  return "?";
}

void validate(const SecurityParams& sec) {
  if (!(sec.eps_s > 0.0 && sec.eps_s < 1.0)) {
    throw std::domain_error("SecurityParams: eps_s must lie in (0, 1)");
  }
  if (!(sec.ec_cofactor > 0.0)) {
    throw std::domain_error("SecurityParams: ec_cofactor must be positive");
  }
}

BlockAllocation allocate(std::uint64_t total_signals, std::uint64_t cm_samples,
                         Protocol p) {
  if (cm_samples < 1) {
    throw InfeasibleAllocation("allocate: need at least one control-mode sample");
  }
  const double sm = std::sqrt(static_cast<double>(total_signals));
  const double sk = std::sqrt(static_cast<double>(cm_samples));
  if (!(sm - sk >= 1.0)) {
    throw InfeasibleAllocation(
        "allocate: control-mode sample size leaves no encoding rounds "
        "(need sqrt(k) <= sqrt(M) - 1)");
  }

  BlockAllocation out;
  out.kind = p.kind;
  out.total_signals = total_signals;
  out.em_samples =
      static_cast<std::uint64_t>(std::llround((sm - sk) * (sm - sk)));
  out.cm_samples = cm_samples;

  const double sn = std::sqrt(static_cast<double>(out.em_samples));
  out.em_probability = sn / (sn + sk);

  // sqrt(nk) converted to a count rounds down, never overstating the yield.
  out.em_bits_effective =
      p.kind == ProtocolKind::LM05
          ? out.em_samples + static_cast<std::uint64_t>(std::floor(sn * sk))
          : out.em_samples;

  out.wasted = total_signals - out.em_bits_effective - cm_samples;
  return out;
}

namespace {

KeyLengthBreakdown finalize(std::uint64_t raw_bits, double pa_penalty,
                            double ec_leak, double eps_s,
                            std::uint64_t signals_denominator) {
  KeyLengthBreakdown out;
  out.raw_bits = raw_bits;
  out.pa_penalty = pa_penalty;
  out.ec_leak = ec_leak;
  out.const_term = std::log2(2.0 / (eps_s * eps_s));
  const double budget =
      static_cast<double>(raw_bits) - pa_penalty - ec_leak - out.const_term;
  out.key_length =
      budget > 0.0 ? static_cast<std::uint64_t>(std::floor(budget)) : 0;
  out.efficiency = static_cast<double>(out.key_length) /
                   static_cast<double>(signals_denominator);
  return out;
}

// Observed CM error plus fluctuation, capped at 1/2 where h2 saturates and
// the budget cannot stay positive.
double pa_argument(const ChannelSpec& ch, std::uint64_t n, std::uint64_t k,
                   double eps_s) {
  return std::min(cm_bit_error(ch) + statistical_fluctuation(n, k, eps_s), 0.5);
}

}  // namespace

KeyLengthBreakdown key_length_sdc(const BlockAllocation& alloc,
                                  const ChannelSpec& ch,
                                  const SecurityParams& sec) {
  if (alloc.kind != ProtocolKind::SDC) {
    throw std::invalid_argument("key_length_sdc: allocation is not for SDC");
  }
  validate(sec);
  const double n = static_cast<double>(alloc.em_samples);
  const double pa =
      2.0 * n *
      binary_entropy(pa_argument(ch, alloc.em_samples, alloc.cm_samples, sec.eps_s));
  const double ec = sec.ec_cofactor * n * quaternary_entropy(sdc_em_error(ch));
  return finalize(2 * alloc.em_samples, pa, ec, sec.eps_s,
                  2 * alloc.total_signals);
}

KeyLengthBreakdown key_length_lm05(const BlockAllocation& alloc,
                                   const ChannelSpec& ch,
                                   const SecurityParams& sec) {
  if (alloc.kind != ProtocolKind::LM05) {
    throw std::invalid_argument("key_length_lm05: allocation is not for LM05");
  }
  validate(sec);
  const double ne = static_cast<double>(alloc.em_bits_effective);
  const double pa =
      ne * binary_entropy(pa_argument(ch, alloc.em_bits_effective,
                                      alloc.cm_samples, sec.eps_s));
  const double ec = sec.ec_cofactor * ne * binary_entropy(lm05_em_error(ch));
  return finalize(alloc.em_bits_effective, pa, ec, sec.eps_s,
                  alloc.total_signals);
}

KeyLengthBreakdown key_length_bb84(const BlockAllocation& alloc,
                                   const ChannelSpec& ch,
                                   const SecurityParams& sec) {
  if (alloc.kind != ProtocolKind::BB84) {
    throw std::invalid_argument("key_length_bb84: allocation is not for BB84");
  }
  validate(sec);
  const double n = static_cast<double>(alloc.em_samples);
  const double pa =
      n * binary_entropy(pa_argument(ch, alloc.em_samples, alloc.cm_samples,
                                     sec.eps_s));
  const double ec = sec.ec_cofactor * n * binary_entropy(cm_bit_error(ch));
  return finalize(alloc.em_samples, pa, ec, sec.eps_s, alloc.total_signals);
}

KeyLengthBreakdown key_length(const BlockAllocation& alloc,
                              const ChannelSpec& ch,
                              const SecurityParams& sec) {
  switch (alloc.kind) {
    case ProtocolKind::BB84: return key_length_bb84(alloc, ch, sec);
    case ProtocolKind::LM05: return key_length_lm05(alloc, ch, sec);
    case ProtocolKind::SDC: return key_length_sdc(alloc, ch, sec);
  }
  throw std::logic_error("key_length: unknown protocol");
}

double asymptotic_efficiency(Protocol p, const ChannelSpec& ch) {
  const double cm = binary_entropy(cm_bit_error(ch));
  switch (p.kind) {
    case ProtocolKind::BB84:
      return 1.0 - 2.0 * cm;
    case ProtocolKind::LM05:
      return 1.0 - cm - binary_entropy(lm05_em_error(ch));
    case ProtocolKind::SDC:
      return 1.0 - cm - quaternary_entropy(sdc_em_error(ch)) / 2.0;
  }
  throw std::logic_error("asymptotic_efficiency: unknown protocol");
}

double dw_rate(Protocol p, const ErrorStat& cm_error,
               const ErrorStat& em_error) {
  if (p.kind == ProtocolKind::SDC) {
    const auto* cm = std::get_if<PauliErrorTriple>(&cm_error);
    const auto* em = std::get_if<PauliErrorTriple>(&em_error);
    if (!cm || !em) {
      throw std::invalid_argument("dw_rate: SDC takes error triples");
    }
    return 2.0 - quaternary_entropy(*cm) - quaternary_entropy(*em);
  }
  const auto* cm = std::get_if<double>(&cm_error);
  const auto* em = std::get_if<double>(&em_error);
  if (!cm || !em) {
    throw std::invalid_argument("dw_rate: LM05/BB84 take scalar error rates");
  }
  return 1.0 - binary_entropy(*cm) - binary_entropy(*em);
}

}  // namespace tqkd
