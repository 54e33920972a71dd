#include "tqkd/mcsim.hpp"

#include <algorithm>
#include <stdexcept>

#include "tqkd/detail/parallel.hpp"
#include "tqkd/detail/rng.hpp"

namespace tqkd {
namespace {

using detail::RoundRng;
using sim::Pauli;

struct Tally {
  std::uint64_t em = 0, cm = 0, wasted = 0;
  std::uint64_t em_errors = 0;
  std::array<std::uint64_t, 3> em_pauli{};  // x-only, z-only, both
  std::uint64_t cm_fwd_samples = 0, cm_fwd_errors = 0;
  std::uint64_t cm_bwd_samples = 0, cm_bwd_errors = 0;

  Tally& operator+=(const Tally& o) {
    em += o.em;
    cm += o.cm;
    wasted += o.wasted;
    em_errors += o.em_errors;
    for (int i = 0; i < 3; ++i) em_pauli[i] += o.em_pauli[i];
    cm_fwd_samples += o.cm_fwd_samples;
    cm_fwd_errors += o.cm_fwd_errors;
    cm_bwd_samples += o.cm_bwd_samples;
    cm_bwd_errors += o.cm_bwd_errors;
    return *this;
  }
};

// Depolarizing draw: identity with 1 - 3q/4, each non-identity Pauli q/4.
Pauli draw_pauli(RoundRng& g, double q) {
  if (!g.bernoulli(q)) return sim::kIdentity;
  return g.two_bits();
}

void classify_sdc_error(Pauli residual, Tally& t) {
  if (residual == sim::kIdentity) return;
  ++t.em_errors;
  ++t.em_pauli[residual - 1];
}

// --- microscopic rounds (independent channels) ---

void round_bb84_micro(RoundRng& g, double q, double c, Tally& t) {
  const bool alice_z = g.bernoulli(c);
  const Pauli p = draw_pauli(g, q);
  const bool bob_z = g.bernoulli(c);
  if (alice_z != bob_z) {
    ++t.wasted;
    return;
  }
  const bool err = sim::flips_basis(p, !alice_z);
  if (alice_z) {
    ++t.em;
    t.em_errors += err;
  } else {
    ++t.cm;
    ++t.cm_fwd_samples;
    t.cm_fwd_errors += err;
  }
}

void round_lm05_micro(RoundRng& g, double q, double c, Tally& t) {
  const bool bob_z = g.bernoulli(c);  // preparation basis, p_Z = c
  const bool x_basis = !bob_z;
  const Pauli fwd = draw_pauli(g, q);
  if (g.bernoulli(c)) {
    // Encoding mode decodes in Bob's own basis, so every round yields a bit.
    const Pauli u = g.two_bits();
    const Pauli bwd = draw_pauli(g, q);
    ++t.em;
    t.em_errors +=
        sim::lm05_decoded_bit(u, fwd, bwd, x_basis) != sim::lm05_key_bit(u);
  } else if (x_basis) {
    // Control mode: Alice measures in X; meaningful only against an
    // X-prepared qubit.
    const bool prepared = g.bit();
    const bool alice = prepared ^ sim::flips_x_basis(fwd);
    ++t.cm;
    ++t.cm_fwd_samples;
    t.cm_fwd_errors += alice != prepared;
    const Pauli bwd = draw_pauli(g, q);
    const bool bob = alice ^ sim::flips_x_basis(bwd);
    ++t.cm_bwd_samples;
    t.cm_bwd_errors += bob != alice;
  } else {
    ++t.wasted;
  }
}

void round_sdc_micro(RoundRng& g, double q, double c, Tally& t) {
  const Pauli fwd = draw_pauli(g, q);
  const bool alice_em = g.bernoulli(c);
  const bool bob_em = g.bernoulli(c);
  if (alice_em && bob_em) {
    const Pauli u = g.two_bits();
    const Pauli bwd = draw_pauli(g, q);
    ++t.em;
    // Bob reads the Bell shift; anything beyond Alice's Pauli is an error.
    classify_sdc_error(sim::compose(sim::sdc_bell_shift(u, fwd, bwd), u), t);
  } else if (!alice_em && !bob_em) {
    // Stored half in Z against Alice's Z measurement (psi+ anticorrelation),
    // fresh X qubit back to Bob.
    const bool stored = g.bit();
    const bool alice_z = !stored ^ sim::flips_z_basis(fwd);
    ++t.cm;
    ++t.cm_fwd_samples;
    t.cm_fwd_errors += alice_z == stored;
    const bool alice_x = g.bit();
    const Pauli bwd = draw_pauli(g, q);
    const bool bob_x = alice_x ^ sim::flips_x_basis(bwd);
    ++t.cm_bwd_samples;
    t.cm_bwd_errors += bob_x != alice_x;
  } else {
    ++t.wasted;
  }
}

// --- statistics-level rounds (any channel mode) ---

void round_bb84_pheno(RoundRng& g, const ChannelSpec& ch, double c, Tally& t) {
  const bool alice_z = g.bernoulli(c);
  const bool bob_z = g.bernoulli(c);
  if (alice_z != bob_z) {
    ++t.wasted;
    return;
  }
  const bool err = g.bernoulli(cm_bit_error(ch));
  if (alice_z) {
    ++t.em;
    t.em_errors += err;
  } else {
    ++t.cm;
    ++t.cm_fwd_samples;
    t.cm_fwd_errors += err;
  }
}

void round_lm05_pheno(RoundRng& g, const ChannelSpec& ch, double c, Tally& t) {
  const bool bob_z = g.bernoulli(c);
  if (g.bernoulli(c)) {
    ++t.em;
    t.em_errors += g.bernoulli(lm05_em_error(ch));
  } else if (!bob_z) {
    ++t.cm;
    ++t.cm_fwd_samples;
    t.cm_fwd_errors += g.bernoulli(cm_bit_error(ch));
    ++t.cm_bwd_samples;
    t.cm_bwd_errors += g.bernoulli(cm_bit_error(ch));
  } else {
    ++t.wasted;
  }
}

void round_sdc_pheno(RoundRng& g, const ChannelSpec& ch, double c, Tally& t) {
  const bool alice_em = g.bernoulli(c);
  const bool bob_em = g.bernoulli(c);
  if (alice_em && bob_em) {
    ++t.em;
    const PauliErrorTriple e = sdc_em_error(ch);
    const double u = g.uniform();
    if (u < e.q1) {
      ++t.em_errors;
      ++t.em_pauli[0];
    } else if (u < e.q1 + e.q2) {
      ++t.em_errors;
      ++t.em_pauli[1];
    } else if (u < e.sum()) {
      ++t.em_errors;
      ++t.em_pauli[2];
    }
  } else if (!alice_em && !bob_em) {
    ++t.cm;
    ++t.cm_fwd_samples;
    t.cm_fwd_errors += g.bernoulli(cm_bit_error(ch));
    ++t.cm_bwd_samples;
    t.cm_bwd_errors += g.bernoulli(cm_bit_error(ch));
  } else {
    ++t.wasted;
  }
}

}  // namespace

SimReport simulate(const SimConfig& cfg, unsigned threads) {
  if (cfg.rounds < 1) {
    throw std::domain_error("simulate: need at least one round");
  }
  if (!(cfg.em_probability > 0.0 && cfg.em_probability < 1.0)) {
    throw std::domain_error("simulate: em_probability must lie in (0, 1)");
  }
  validate(cfg.channel);

  SamplingMode sampling = cfg.sampling;
  if (sampling == SamplingMode::Auto) {
    sampling = cfg.channel.mode == ChannelMode::Correlated
                   ? SamplingMode::Phenomenological
                   : SamplingMode::Microscopic;
  }
  if (sampling == SamplingMode::Microscopic &&
      cfg.channel.mode == ChannelMode::Correlated) {
    throw std::domain_error(
        "simulate: correlated channels are phenomenological-only; no "
        "single-Pauli microscopic model reproduces e1 = e2 = e_m");
  }

  const bool micro = sampling == SamplingMode::Microscopic;
  const double q = cfg.channel.q;
  const double c = cfg.em_probability;

  constexpr std::uint64_t kChunk = 1 << 16;
  const std::uint64_t chunks = (cfg.rounds + kChunk - 1) / kChunk;
  std::vector<Tally> partial(chunks);

  detail::parallel_for(chunks, threads, [&](std::size_t ci) {
    const std::uint64_t begin = ci * kChunk;
    const std::uint64_t end = std::min(begin + kChunk, cfg.rounds);
    Tally t;
    for (std::uint64_t r = begin; r < end; ++r) {
      RoundRng g(cfg.seed, r);
      switch (cfg.protocol.kind) {
        case ProtocolKind::BB84:
          micro ? round_bb84_micro(g, q, c, t)
                : round_bb84_pheno(g, cfg.channel, c, t);
          break;
        case ProtocolKind::LM05:
          micro ? round_lm05_micro(g, q, c, t)
                : round_lm05_pheno(g, cfg.channel, c, t);
          break;
        case ProtocolKind::SDC:
          micro ? round_sdc_micro(g, q, c, t)
                : round_sdc_pheno(g, cfg.channel, c, t);
          break;
      }
    }
    partial[ci] = t;
  });

  Tally total;
  for (const Tally& t : partial) total += t;

  SimReport report;
  report.em_count = total.em;
  report.cm_count = total.cm;
  report.wasted_count = total.wasted;
  report.em_error = {total.em_errors, total.em};
  for (int i = 0; i < 3; ++i) {
    report.em_pauli[i] = {total.em_pauli[i],
                          cfg.protocol.kind == ProtocolKind::SDC ? total.em : 0};
  }
  report.cm_forward = {total.cm_fwd_errors, total.cm_fwd_samples};
  report.cm_backward = {total.cm_bwd_errors, total.cm_bwd_samples};
  report.phenomenological = !micro;
  return report;
}

CountingReport verify_counting(const SimConfig& cfg,
                               const BlockAllocation& alloc) {
  SimConfig run = cfg;
  run.rounds = alloc.total_signals;
  run.em_probability = alloc.em_probability;
  const SimReport rep = simulate(run);

  const double m = static_cast<double>(alloc.total_signals);
  const double c = alloc.em_probability;
  const bool lm05 = cfg.protocol.kind == ProtocolKind::LM05;
  const double p_em = lm05 ? c : c * c;
  const double p_cm = (1.0 - c) * (1.0 - c);
  const double p_wasted = 1.0 - p_em - p_cm;

  const auto check = [&](std::string label, std::uint64_t observed,
                         double expected, double p) {
    CountingCheck out;
    out.label = std::move(label);
    out.observed = observed;
    out.expected = expected;
    out.std_dev = std::sqrt(m * p * (1.0 - p));
    out.zscore = (static_cast<double>(observed) - expected) / out.std_dev;
    out.within_3sigma = std::abs(out.zscore) <= 3.0;
    return out;
  };

  CountingReport out;
  out.checks.push_back(check("em", rep.em_count,
                             static_cast<double>(alloc.em_bits_effective),
                             p_em));
  out.checks.push_back(check("cm", rep.cm_count,
                             static_cast<double>(alloc.cm_samples), p_cm));
  out.checks.push_back(check("wasted", rep.wasted_count,
                             static_cast<double>(alloc.wasted), p_wasted));
  out.all_within_3sigma =
      std::all_of(out.checks.begin(), out.checks.end(),
                  [](const CountingCheck& c) { return c.within_3sigma; });
  return out;
}

}  // namespace tqkd
