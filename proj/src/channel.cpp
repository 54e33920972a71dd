#include "tqkd/channel.hpp"

#include <stdexcept>

namespace tqkd {

void validate(const ChannelSpec& ch) {
  if (!(ch.q >= 0.0 && ch.q <= 1.0)) {
    throw std::domain_error("ChannelSpec: q must lie in [0, 1]");
  }
}

double cm_bit_error(const ChannelSpec& ch) {
  validate(ch);
  return ch.q / 2.0;
}

double lm05_em_error(const ChannelSpec& ch) {
  validate(ch);
  switch (ch.mode) {
    case ChannelMode::Independent:
      return ch.q * (1.0 - ch.q / 2.0);
    case ChannelMode::Correlated:
      return ch.q / 2.0;
  }
  throw std::logic_error("lm05_em_error: unknown channel mode");
}

PauliErrorTriple sdc_em_error(const ChannelSpec& ch) {
  validate(ch);
  switch (ch.mode) {
    case ChannelMode::Independent:
      // Two traversals compose to net strength 2q - q^2; the three
      // non-identity Paulis share it equally.
      return PauliErrorTriple::symmetric((2.0 * ch.q - ch.q * ch.q) / 4.0);
    case ChannelMode::Correlated:
      return PauliErrorTriple::symmetric(ch.q / 4.0);
  }
  throw std::logic_error("sdc_em_error: unknown channel mode");
}

double compose_depolarizing(double qa, double qb) {
  if (!(qa >= 0.0 && qa <= 1.0) || !(qb >= 0.0 && qb <= 1.0)) {
    throw std::domain_error("compose_depolarizing: strengths must lie in [0, 1]");
  }
  return qa + qb - qa * qb;
}

}  // namespace tqkd
