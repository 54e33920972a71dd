// tqkd: finite-key secure key lengths and efficiencies for the two-way QKD
// protocols LM05 and SDC and the asymmetric BB84 baseline over depolarizing
// channels. Emits CSV (default) or JSON; every record echoes the inputs that
// produced it.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tqkd/errors.hpp"
#include "tqkd/mcsim.hpp"
#include "tqkd/optimize.hpp"

namespace {

using nlohmann::json;
using namespace tqkd;

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// formatting: locale-independent, shortest round-trip representation

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    os << (i ? "," : "") << t.header[i];
  }
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << row[i];
    }
    os << '\n';
  }
  return os.str();
}

std::filesystem::path resolve_output(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("TQKD_OUTPUT_DIR")) {
      p = std::filesystem::path(dir) / p;
    }
  }
  return p;
}

struct CommonOpts {
  std::string format = "csv";
  std::string output;
  std::string config;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--output,-o", opts.output,
                  "write to this path instead of stdout (relative paths "
                  "resolve under $TQKD_OUTPUT_DIR when set)");
  cmd->add_option("--config", opts.config,
                  "JSON file whose \"params\" object supplies defaults; "
                  "explicit flags win");
}

void emit(const CommonOpts& opts, const Table& table, const json& doc) {
  const std::string text =
      opts.format == "json" ? doc.dump(2) + "\n" : to_csv(table);
  if (opts.output.empty()) {
    std::cout << text;
    return;
  }
  const auto path = resolve_output(opts.output);
  std::ofstream file(path);
  if (!file) throw IoError("cannot open output file: " + path.string());
  file << text;
  if (!file.good()) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// flag parsing

bool is_infinite(const std::string& s) {
  return s == "inf" || s == "INF" || s == "Inf" || s == "infinity";
}

double parse_real(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string(what) + ": cannot parse '" + s + "'");
  }
}

std::uint64_t parse_count(const std::string& s, const char* what) {
  const double v = parse_real(s, what);
  const double r = std::round(v);
  if (!(v >= 0) || std::abs(v - r) > 1e-6 * std::max(1.0, std::abs(v)) ||
      r > 1e18) {
    throw UsageError(std::string(what) + ": expected a nonnegative integer, got '" +
                     s + "'");
  }
  return static_cast<std::uint64_t>(r);
}

struct Grid {
  double min = 0;
  double max = 0;
  int points = 0;
};

Grid parse_grid(const std::string& s, const char* what) {
  const auto a = s.find(':');
  const auto b = s.rfind(':');
  if (a == std::string::npos || b == a) {
    throw UsageError(std::string(what) + ": expected min:max:points, got '" + s +
                     "'");
  }
  Grid g;
  g.min = parse_real(s.substr(0, a), what);
  g.max = parse_real(s.substr(a + 1, b - a - 1), what);
  const auto pts = parse_count(s.substr(b + 1), what);
  if (pts < 2 || pts > 1000000) {
    throw UsageError(std::string(what) + ": points must lie in [2, 1e6]");
  }
  g.points = static_cast<int>(pts);
  return g;
}

Protocol parse_protocol(const std::string& s) {
  if (s == "bb84") return Protocol::bb84();
  if (s == "lm05") return Protocol::lm05();
  if (s == "sdc") return Protocol::sdc();
  throw UsageError("unknown protocol '" + s + "' (bb84, lm05, sdc)");
}

std::vector<Protocol> parse_protocol_set(const std::string& s) {
  if (s == "all") return {Protocol::bb84(), Protocol::lm05(), Protocol::sdc()};
  std::vector<Protocol> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_protocol(item));
  if (out.empty()) throw UsageError("empty protocol list");
  return out;
}

std::string protocol_set_name(const std::vector<Protocol>& ps) {
  std::string out;
  for (const auto& p : ps) {
    if (!out.empty()) out += ',';
    out += p.name();
  }
  return out;
}

ChannelMode parse_mode(const std::string& s) {
  if (s == "independent") return ChannelMode::Independent;
  if (s == "correlated") return ChannelMode::Correlated;
  throw UsageError("unknown channel mode '" + s +
                   "' (independent, correlated)");
}

const char* mode_name(ChannelMode m) {
  return m == ChannelMode::Independent ? "independent" : "correlated";
}

SamplingMode parse_sampling(const std::string& s) {
  if (s == "auto") return SamplingMode::Auto;
  if (s == "microscopic") return SamplingMode::Microscopic;
  if (s == "phenomenological") return SamplingMode::Phenomenological;
  throw UsageError("unknown sampling mode '" + s +
                   "' (auto, microscopic, phenomenological)");
}

// ---------------------------------------------------------------------------
// config merging: a previous JSON output re-feeds the same run

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream file(path);
  if (!file) throw IoError("cannot read config file: " + path);
  json doc;
  try {
    file >> doc;
  } catch (const json::parse_error& e) {
    throw UsageError("config is not valid JSON: " + std::string(e.what()));
  }
  if (doc.contains("params") && doc["params"].is_object()) {
    return doc["params"];
  }
  return doc.is_object() ? doc : json::object();
}

class ConfigMerge {
 public:
  explicit ConfigMerge(json params) : params_(std::move(params)) {}

  void fill(const CLI::Option* opt, const char* key, std::string& var) const {
    if (opt->count() > 0 || !params_.contains(key)) return;
    const json& v = params_.at(key);
    var = v.is_string() ? v.get<std::string>() : v.dump();
  }
  void fill(const CLI::Option* opt, const char* key, double& var) const {
    if (opt->count() > 0 || !params_.contains(key)) return;
    var = params_.at(key).get<double>();
  }
  void fill(const CLI::Option* opt, const char* key, std::uint64_t& var) const {
    if (opt->count() > 0 || !params_.contains(key)) return;
    var = params_.at(key).get<std::uint64_t>();
  }
  void fill(const CLI::Option* opt, const char* key, bool& var) const {
    if (opt->count() > 0 || !params_.contains(key)) return;
    var = params_.at(key).get<bool>();
  }

 private:
  json params_;
};

// ---------------------------------------------------------------------------
// shared JSON fragments

json to_json(const BlockAllocation& a) {
  return {{"total_signals", a.total_signals},
          {"em_samples", a.em_samples},
          {"cm_samples", a.cm_samples},
          {"em_bits_effective", a.em_bits_effective},
          {"wasted", a.wasted},
          {"em_probability", a.em_probability}};
}

json to_json(const KeyLengthBreakdown& b) {
  return {{"raw_bits", b.raw_bits},
          {"pa_penalty", b.pa_penalty},
          {"ec_leak", b.ec_leak},
          {"const_term", b.const_term},
          {"key_length", b.key_length},
          {"efficiency", b.efficiency}};
}

json to_json(const RateEstimate& r) {
  return {{"errors", r.errors},
          {"samples", r.samples},
          {"rate", r.rate()},
          {"std_error", r.std_error()}};
}

json make_doc(const char* command, json params, json result) {
  return {{"command", command},
          {"version", kVersion},
          {"params", std::move(params)},
          {"result", std::move(result)}};
}

// ---------------------------------------------------------------------------
// rate / optimize

struct RateArgs {
  std::string protocol;
  std::string channel = "independent";
  std::string signals;
  double qhalf = std::nan("");
  double eps_s = 1e-10;
  double ec_cofactor = 1.0;
  std::string cm_samples;
  bool optimize = false;
  bool trace = false;
};

int run_rate(const char* command, const RateArgs& a, const CommonOpts& opts) {
  if (a.protocol.empty()) throw UsageError("--protocol is required");
  if (a.signals.empty()) throw UsageError("--signals is required");
  if (std::isnan(a.qhalf)) throw UsageError("--qhalf is required");
  if (!a.optimize && a.cm_samples.empty()) {
    throw UsageError("give --cm-samples K or --optimize-k");
  }
  if (a.optimize && !a.cm_samples.empty()) {
    throw UsageError("--cm-samples and --optimize-k are mutually exclusive");
  }

  const Protocol p = parse_protocol(a.protocol);
  const ChannelMode mode = parse_mode(a.channel);
  const ChannelSpec ch{2.0 * a.qhalf, mode};
  const SecurityParams sec{a.eps_s, a.ec_cofactor};
  const std::uint64_t m = parse_count(a.signals, "--signals");

  BlockAllocation alloc;
  KeyLengthBreakdown kb;
  json trace = json::array();
  if (a.optimize) {
    const OptimumReport report = optimize_k(m, ch, sec, p, a.trace);
    alloc = report.allocation;
    kb = report.breakdown;
    for (const auto& [k, len] : report.scan_trace) {
      trace.push_back({{"cm_samples", k}, {"key_length", len}});
    }
  } else {
    alloc = allocate(m, parse_count(a.cm_samples, "--cm-samples"), p);
    kb = key_length(alloc, ch, sec);
  }

  json params{{"protocol", p.name()},      {"channel", mode_name(mode)},
              {"signals", m},              {"qhalf", a.qhalf},
              {"eps_s", a.eps_s},          {"ec_cofactor", a.ec_cofactor},
              {"optimize_k", a.optimize}};
  if (!a.optimize) params["cm_samples"] = alloc.cm_samples;
  if (std::strcmp(command, "optimize") == 0) params["trace"] = a.trace;

  json result{{"allocation", to_json(alloc)}, {"breakdown", to_json(kb)}};
  if (a.optimize) result["k_star"] = alloc.cm_samples;
  if (a.trace) result["scan_trace"] = trace;

  Table t;
  t.header = {"command",          "version",     "protocol",
              "channel",          "signals",     "qhalf",
              "q",                "eps_s",       "ec_cofactor",
              "optimize_k",       "cm_samples",  "em_samples",
              "em_bits_effective","em_probability", "wasted",
              "raw_bits",         "pa_penalty",  "ec_leak",
              "const_term",       "key_length",  "efficiency"};
  t.rows.push_back({command, kVersion, std::string(p.name()), mode_name(mode),
                    fmt(m), fmt(a.qhalf), fmt(2.0 * a.qhalf), fmt(a.eps_s),
                    fmt(a.ec_cofactor), a.optimize ? "1" : "0",
                    fmt(alloc.cm_samples), fmt(alloc.em_samples),
                    fmt(alloc.em_bits_effective), fmt(alloc.em_probability),
                    fmt(alloc.wasted), fmt(kb.raw_bits), fmt(kb.pa_penalty),
                    fmt(kb.ec_leak), fmt(kb.const_term), fmt(kb.key_length),
                    fmt(kb.efficiency)});

  emit(opts, t, make_doc(command, std::move(params), std::move(result)));
  return 0;
}

// ---------------------------------------------------------------------------
// sweeps

struct SweepArgs {
  std::string protocol = "all";
  std::string channel = "independent";
  std::string signals;  // grid for sweep-blocks, scalar for sweep-error
  std::string qhalf;    // grid for sweep-error, scalar for sweep-blocks
  double eps_s = 1e-10;
  double ec_cofactor = 1.0;
  bool log_spacing = false;
  unsigned threads = 0;
};

int run_sweep(bool error_axis, const SweepArgs& a, const CommonOpts& opts) {
  const char* command = error_axis ? "sweep-error" : "sweep-blocks";
  if (a.signals.empty()) throw UsageError("--signals is required");
  if (a.qhalf.empty()) throw UsageError("--qhalf is required");

  SweepSpec spec;
  spec.protocols = parse_protocol_set(a.protocol);
  spec.mode = parse_mode(a.channel);
  spec.sec = {a.eps_s, a.ec_cofactor};
  spec.log_spacing = a.log_spacing;
  if (error_axis) {
    spec.axis = SweepAxis::ErrorRate;
    const Grid g = parse_grid(a.qhalf, "--qhalf");
    spec.axis_min = g.min;
    spec.axis_max = g.max;
    spec.points = g.points;
    spec.signals = parse_count(a.signals, "--signals");
  } else {
    spec.axis = SweepAxis::BlockSize;
    const Grid g = parse_grid(a.signals, "--signals");
    spec.axis_min = g.min;
    spec.axis_max = g.max;
    spec.points = g.points;
    spec.qhalf = parse_real(a.qhalf, "--qhalf");
  }

  const auto rows = sweep(spec, a.threads);

  json params{{"protocol", protocol_set_name(spec.protocols)},
              {"channel", mode_name(spec.mode)},
              {"eps_s", a.eps_s},
              {"ec_cofactor", a.ec_cofactor},
              {"log", a.log_spacing}};
  if (error_axis) {
    params["signals"] = spec.signals;
    params["qhalf"] = a.qhalf;
  } else {
    params["signals"] = a.signals;
    params["qhalf"] = spec.qhalf;
  }

  Table t;
  t.header = {"command", "version", "channel", "eps_s", "ec_cofactor"};
  if (error_axis) {
    t.header.insert(t.header.end(), {"signals", "qhalf", "q"});
  } else {
    t.header.insert(t.header.end(), {"qhalf", "q", "signals"});
  }
  for (const auto& p : spec.protocols) {
    const std::string n(p.name());
    t.header.push_back(n + "_cm_samples");
    t.header.push_back(n + "_key_length");
    t.header.push_back(n + "_efficiency");
  }

  json jrows = json::array();
  for (const auto& row : rows) {
    const double qhalf = error_axis ? row.axis_value : spec.qhalf;
    const auto signals = error_axis
                             ? spec.signals
                             : static_cast<std::uint64_t>(row.axis_value);
    std::vector<std::string> cells = {command, kVersion,
                                      mode_name(spec.mode), fmt(a.eps_s),
                                      fmt(a.ec_cofactor)};
    if (error_axis) {
      cells.push_back(fmt(signals));
      cells.push_back(fmt(qhalf));
      cells.push_back(fmt(2.0 * qhalf));
    } else {
      cells.push_back(fmt(qhalf));
      cells.push_back(fmt(2.0 * qhalf));
      cells.push_back(fmt(signals));
    }
    json jrow{{"qhalf", qhalf}, {"q", 2.0 * qhalf}, {"signals", signals}};
    for (std::size_t j = 0; j < spec.protocols.size(); ++j) {
      const SweepCell& cell = row.cells[j];
      const std::string n(spec.protocols[j].name());
      if (cell.feasible) {
        cells.push_back(fmt(cell.k_star));
        cells.push_back(fmt(cell.key_length));
        cells.push_back(fmt(cell.efficiency));
        jrow[n] = {{"cm_samples", cell.k_star},
                   {"key_length", cell.key_length},
                   {"efficiency", cell.efficiency}};
      } else {
        cells.insert(cells.end(), {"", "", ""});
        jrow[n] = nullptr;
      }
    }
    t.rows.push_back(std::move(cells));
    jrows.push_back(std::move(jrow));
  }

  emit(opts, t,
       make_doc(command, std::move(params), json{{"rows", std::move(jrows)}}));
  return 0;
}

// ---------------------------------------------------------------------------
// threshold / crossover / asymptotic

struct ThresholdArgs {
  std::string protocol;
  std::string channel = "independent";
  std::string signals;
  double eps_s = 1e-10;
  double ec_cofactor = 1.0;
};

int run_threshold(const ThresholdArgs& a, const CommonOpts& opts) {
  if (a.protocol.empty()) throw UsageError("--protocol is required");
  if (a.signals.empty()) throw UsageError("--signals is required (count or 'inf')");
  const Protocol p = parse_protocol(a.protocol);
  const ChannelMode mode = parse_mode(a.channel);

  double threshold = 0.0;
  json params{{"protocol", p.name()},
              {"channel", mode_name(mode)},
              {"eps_s", a.eps_s},
              {"ec_cofactor", a.ec_cofactor}};
  std::string signals_cell;
  if (is_infinite(a.signals)) {
    threshold = asymptotic_zero_threshold(p, mode);
    params["signals"] = "inf";
    signals_cell = "inf";
  } else {
    const std::uint64_t m = parse_count(a.signals, "--signals");
    threshold = zero_threshold(p, m, ChannelSpec{0.0, mode},
                               SecurityParams{a.eps_s, a.ec_cofactor});
    params["signals"] = m;
    signals_cell = fmt(m);
  }

  Table t;
  t.header = {"command",  "version",     "protocol",       "channel",
              "signals",  "eps_s",       "ec_cofactor",    "threshold_qhalf",
              "threshold_q"};
  t.rows.push_back({"threshold", kVersion, std::string(p.name()),
                    mode_name(mode), signals_cell, fmt(a.eps_s),
                    fmt(a.ec_cofactor), fmt(threshold), fmt(2.0 * threshold)});

  emit(opts, t,
       make_doc("threshold", std::move(params),
                json{{"threshold_qhalf", threshold},
                     {"threshold_q", 2.0 * threshold}}));
  return 0;
}

struct CrossoverArgs {
  std::string protocol_a;
  std::string protocol_b;
  std::string channel = "independent";
  std::string signals;
  double eps_s = 1e-10;
  double ec_cofactor = 1.0;
};

int run_crossover(const CrossoverArgs& a, const CommonOpts& opts) {
  if (a.protocol_a.empty() || a.protocol_b.empty()) {
    throw UsageError("--protocol-a and --protocol-b are required");
  }
  if (a.signals.empty()) throw UsageError("--signals is required (count or 'inf')");
  const Protocol pa = parse_protocol(a.protocol_a);
  const Protocol pb = parse_protocol(a.protocol_b);
  const ChannelMode mode = parse_mode(a.channel);

  double cross = 0.0;
  json params{{"protocol_a", pa.name()}, {"protocol_b", pb.name()},
              {"channel", mode_name(mode)}, {"eps_s", a.eps_s},
              {"ec_cofactor", a.ec_cofactor}};
  std::string signals_cell;
  if (is_infinite(a.signals)) {
    cross = asymptotic_crossover(pa, pb, mode);
    params["signals"] = "inf";
    signals_cell = "inf";
  } else {
    const std::uint64_t m = parse_count(a.signals, "--signals");
    cross = crossover(pa, pb, m, ChannelSpec{0.0, mode},
                      SecurityParams{a.eps_s, a.ec_cofactor});
    params["signals"] = m;
    signals_cell = fmt(m);
  }

  Table t;
  t.header = {"command",   "version",     "protocol_a", "protocol_b",
              "channel",   "signals",     "eps_s",      "ec_cofactor",
              "crossover_qhalf", "crossover_q"};
  t.rows.push_back({"crossover", kVersion, std::string(pa.name()),
                    std::string(pb.name()), mode_name(mode), signals_cell,
                    fmt(a.eps_s), fmt(a.ec_cofactor), fmt(cross),
                    fmt(2.0 * cross)});

  emit(opts, t,
       make_doc("crossover", std::move(params),
                json{{"crossover_qhalf", cross}, {"crossover_q", 2.0 * cross}}));
  return 0;
}

struct AsymptoticArgs {
  std::string protocol;
  std::string channel = "independent";
  double qhalf = std::nan("");
};

int run_asymptotic(const AsymptoticArgs& a, const CommonOpts& opts) {
  if (a.protocol.empty()) throw UsageError("--protocol is required");
  if (std::isnan(a.qhalf)) throw UsageError("--qhalf is required");
  const Protocol p = parse_protocol(a.protocol);
  const ChannelMode mode = parse_mode(a.channel);
  const double eff =
      asymptotic_efficiency(p, ChannelSpec{2.0 * a.qhalf, mode});

  Table t;
  t.header = {"command", "version", "protocol", "channel",
              "qhalf",   "q",       "efficiency"};
  t.rows.push_back({"asymptotic", kVersion, std::string(p.name()),
                    mode_name(mode), fmt(a.qhalf), fmt(2.0 * a.qhalf),
                    fmt(eff)});

  emit(opts, t,
       make_doc("asymptotic",
                json{{"protocol", p.name()},
                     {"channel", mode_name(mode)},
                     {"qhalf", a.qhalf}},
                json{{"efficiency", eff}}));
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string protocol;
  std::string channel = "independent";
  std::string rounds;
  double qhalf = std::nan("");
  double em_probability = 0.5;
  std::uint64_t seed = 1;
  std::string sampling = "auto";
  unsigned threads = 0;
};

int run_simulate(const SimulateArgs& a, const CommonOpts& opts) {
  if (a.protocol.empty()) throw UsageError("--protocol is required");
  if (a.rounds.empty()) throw UsageError("--rounds is required");
  if (std::isnan(a.qhalf)) throw UsageError("--qhalf is required");

  SimConfig cfg;
  cfg.protocol = parse_protocol(a.protocol);
  cfg.channel = {2.0 * a.qhalf, parse_mode(a.channel)};
  cfg.rounds = parse_count(a.rounds, "--rounds");
  cfg.em_probability = a.em_probability;
  cfg.seed = a.seed;
  cfg.sampling = parse_sampling(a.sampling);

  const SimReport rep = simulate(cfg, a.threads);
  const bool sdc = cfg.protocol.kind == ProtocolKind::SDC;
  const bool bb84 = cfg.protocol.kind == ProtocolKind::BB84;

  json params{{"protocol", cfg.protocol.name()},
              {"channel", mode_name(cfg.channel.mode)},
              {"qhalf", a.qhalf},
              {"rounds", cfg.rounds},
              {"em_probability", a.em_probability},
              {"seed", a.seed},
              {"sampling", a.sampling}};

  json result{{"em_count", rep.em_count},
              {"cm_count", rep.cm_count},
              {"wasted_count", rep.wasted_count},
              {"em_error", to_json(rep.em_error)},
              {"cm_forward", to_json(rep.cm_forward)},
              {"phenomenological", rep.phenomenological}};
  if (sdc) {
    result["em_pauli"] = {{"bit_flip", to_json(rep.em_pauli[0])},
                          {"phase_flip", to_json(rep.em_pauli[1])},
                          {"both", to_json(rep.em_pauli[2])}};
  }
  if (!bb84) result["cm_backward"] = to_json(rep.cm_backward);

  Table t;
  t.header = {"command",        "version",
              "protocol",       "channel",
              "sampling",       "phenomenological",
              "rounds",         "em_probability",
              "qhalf",          "q",
              "seed",           "em_count",
              "cm_count",       "wasted_count",
              "em_errors",      "em_error_rate",
              "em_error_se",    "em_bitflip_rate",
              "em_phaseflip_rate", "em_bothflip_rate",
              "cm_forward_rate", "cm_forward_se",
              "cm_backward_rate", "cm_backward_se"};
  t.rows.push_back(
      {"simulate", kVersion, std::string(cfg.protocol.name()),
       mode_name(cfg.channel.mode), a.sampling,
       rep.phenomenological ? "1" : "0", fmt(cfg.rounds),
       fmt(a.em_probability), fmt(a.qhalf), fmt(2.0 * a.qhalf), fmt(a.seed),
       fmt(rep.em_count), fmt(rep.cm_count), fmt(rep.wasted_count),
       fmt(rep.em_error.errors), fmt(rep.em_error.rate()),
       fmt(rep.em_error.std_error()),
       sdc ? fmt(rep.em_pauli[0].rate()) : std::string(),
       sdc ? fmt(rep.em_pauli[1].rate()) : std::string(),
       sdc ? fmt(rep.em_pauli[2].rate()) : std::string(),
       fmt(rep.cm_forward.rate()), fmt(rep.cm_forward.std_error()),
       bb84 ? std::string() : fmt(rep.cm_backward.rate()),
       bb84 ? std::string() : fmt(rep.cm_backward.std_error())});

  emit(opts, t, make_doc("simulate", std::move(params), std::move(result)));
  return 0;
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
  CLI::App app{"finite-key rates, optimization, sweeps and simulation for "
               "two-way QKD (LM05, SDC) and asymmetric BB84"};
  app.require_subcommand(1);

  // rate / optimize
  RateArgs rate_args;
  CommonOpts rate_opts;
  auto* rate_cmd = app.add_subcommand(
      "rate", "key length and efficiency for one parameter set");
  auto* rate_protocol = rate_cmd->add_option("--protocol", rate_args.protocol);
  auto* rate_channel = rate_cmd->add_option("--channel", rate_args.channel);
  auto* rate_signals = rate_cmd->add_option("--signals", rate_args.signals,
                                            "total signals M (pairs for SDC)");
  auto* rate_qhalf = rate_cmd->add_option("--qhalf", rate_args.qhalf,
                                          "per-path error rate q/2");
  auto* rate_eps = rate_cmd->add_option("--eps-s", rate_args.eps_s);
  auto* rate_cof = rate_cmd->add_option("--ec-cofactor", rate_args.ec_cofactor);
  auto* rate_cm = rate_cmd->add_option("--cm-samples", rate_args.cm_samples,
                                       "control-mode sample size k");
  auto* rate_opt = rate_cmd->add_flag("--optimize-k", rate_args.optimize,
                                      "maximize the key length over k");
  add_common(rate_cmd, rate_opts);

  RateArgs optimize_args;
  optimize_args.optimize = true;
  CommonOpts optimize_opts;
  auto* optimize_cmd = app.add_subcommand(
      "optimize", "optimal control-mode sample size for a block");
  auto* opt_protocol =
      optimize_cmd->add_option("--protocol", optimize_args.protocol);
  auto* opt_channel =
      optimize_cmd->add_option("--channel", optimize_args.channel);
  auto* opt_signals =
      optimize_cmd->add_option("--signals", optimize_args.signals);
  auto* opt_qhalf = optimize_cmd->add_option("--qhalf", optimize_args.qhalf);
  auto* opt_eps = optimize_cmd->add_option("--eps-s", optimize_args.eps_s);
  auto* opt_cof =
      optimize_cmd->add_option("--ec-cofactor", optimize_args.ec_cofactor);
  auto* opt_trace = optimize_cmd->add_flag(
      "--trace", optimize_args.trace, "include the coarse scan in JSON output");
  add_common(optimize_cmd, optimize_opts);

  // sweeps
  SweepArgs sweep_error_args;
  CommonOpts sweep_error_opts;
  auto* sweep_error_cmd = app.add_subcommand(
      "sweep-error", "optimized efficiency against the error rate q/2");
  auto* swe_protocol =
      sweep_error_cmd->add_option("--protocol", sweep_error_args.protocol,
                                  "all or comma list");
  auto* swe_channel =
      sweep_error_cmd->add_option("--channel", sweep_error_args.channel);
  auto* swe_signals =
      sweep_error_cmd->add_option("--signals", sweep_error_args.signals);
  auto* swe_qhalf = sweep_error_cmd->add_option(
      "--qhalf", sweep_error_args.qhalf, "grid min:max:points");
  auto* swe_eps = sweep_error_cmd->add_option("--eps-s", sweep_error_args.eps_s);
  auto* swe_cof =
      sweep_error_cmd->add_option("--ec-cofactor", sweep_error_args.ec_cofactor);
  auto* swe_log = sweep_error_cmd->add_flag("--log", sweep_error_args.log_spacing);
  sweep_error_cmd->add_option("--threads", sweep_error_args.threads);
  add_common(sweep_error_cmd, sweep_error_opts);

  SweepArgs sweep_blocks_args;
  CommonOpts sweep_blocks_opts;
  auto* sweep_blocks_cmd = app.add_subcommand(
      "sweep-blocks", "optimized efficiency against the block size M");
  auto* swb_protocol =
      sweep_blocks_cmd->add_option("--protocol", sweep_blocks_args.protocol);
  auto* swb_channel =
      sweep_blocks_cmd->add_option("--channel", sweep_blocks_args.channel);
  auto* swb_signals = sweep_blocks_cmd->add_option(
      "--signals", sweep_blocks_args.signals, "grid min:max:points");
  auto* swb_qhalf =
      sweep_blocks_cmd->add_option("--qhalf", sweep_blocks_args.qhalf);
  auto* swb_eps =
      sweep_blocks_cmd->add_option("--eps-s", sweep_blocks_args.eps_s);
  auto* swb_cof = sweep_blocks_cmd->add_option("--ec-cofactor",
                                               sweep_blocks_args.ec_cofactor);
  auto* swb_log =
      sweep_blocks_cmd->add_flag("--log", sweep_blocks_args.log_spacing);
  sweep_blocks_cmd->add_option("--threads", sweep_blocks_args.threads);
  add_common(sweep_blocks_cmd, sweep_blocks_opts);

  // threshold / crossover / asymptotic
  ThresholdArgs threshold_args;
  CommonOpts threshold_opts;
  auto* threshold_cmd = app.add_subcommand(
      "threshold", "largest q/2 with a positive optimized key");
  auto* thr_protocol =
      threshold_cmd->add_option("--protocol", threshold_args.protocol);
  auto* thr_channel =
      threshold_cmd->add_option("--channel", threshold_args.channel);
  auto* thr_signals = threshold_cmd->add_option(
      "--signals", threshold_args.signals, "count or 'inf'");
  auto* thr_eps = threshold_cmd->add_option("--eps-s", threshold_args.eps_s);
  auto* thr_cof =
      threshold_cmd->add_option("--ec-cofactor", threshold_args.ec_cofactor);
  add_common(threshold_cmd, threshold_opts);

  CrossoverArgs crossover_args;
  CommonOpts crossover_opts;
  auto* crossover_cmd = app.add_subcommand(
      "crossover", "q/2 where two optimized efficiency curves cross");
  auto* crs_a =
      crossover_cmd->add_option("--protocol-a", crossover_args.protocol_a);
  auto* crs_b =
      crossover_cmd->add_option("--protocol-b", crossover_args.protocol_b);
  auto* crs_channel =
      crossover_cmd->add_option("--channel", crossover_args.channel);
  auto* crs_signals = crossover_cmd->add_option(
      "--signals", crossover_args.signals, "count or 'inf'");
  auto* crs_eps = crossover_cmd->add_option("--eps-s", crossover_args.eps_s);
  auto* crs_cof =
      crossover_cmd->add_option("--ec-cofactor", crossover_args.ec_cofactor);
  add_common(crossover_cmd, crossover_opts);

  AsymptoticArgs asymptotic_args;
  CommonOpts asymptotic_opts;
  auto* asymptotic_cmd =
      app.add_subcommand("asymptotic", "infinite-key efficiency");
  auto* asy_protocol =
      asymptotic_cmd->add_option("--protocol", asymptotic_args.protocol);
  auto* asy_channel =
      asymptotic_cmd->add_option("--channel", asymptotic_args.channel);
  auto* asy_qhalf = asymptotic_cmd->add_option("--qhalf", asymptotic_args.qhalf);
  add_common(asymptotic_cmd, asymptotic_opts);

  // simulate
  SimulateArgs simulate_args;
  CommonOpts simulate_opts;
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "seeded Monte Carlo round simulation");
  auto* sim_protocol =
      simulate_cmd->add_option("--protocol", simulate_args.protocol);
  auto* sim_channel =
      simulate_cmd->add_option("--channel", simulate_args.channel);
  auto* sim_rounds = simulate_cmd->add_option("--rounds", simulate_args.rounds);
  auto* sim_qhalf = simulate_cmd->add_option("--qhalf", simulate_args.qhalf);
  auto* sim_c = simulate_cmd->add_option("--em-probability",
                                         simulate_args.em_probability);
  auto* sim_seed = simulate_cmd->add_option("--seed", simulate_args.seed);
  auto* sim_sampling =
      simulate_cmd->add_option("--sampling", simulate_args.sampling,
                               "auto | microscopic | phenomenological");
  simulate_cmd->add_option("--threads", simulate_args.threads);
  add_common(simulate_cmd, simulate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (rate_cmd->parsed()) {
    const ConfigMerge cfg(load_config(rate_opts.config));
    cfg.fill(rate_protocol, "protocol", rate_args.protocol);
    cfg.fill(rate_channel, "channel", rate_args.channel);
    cfg.fill(rate_signals, "signals", rate_args.signals);
    cfg.fill(rate_qhalf, "qhalf", rate_args.qhalf);
    cfg.fill(rate_eps, "eps_s", rate_args.eps_s);
    cfg.fill(rate_cof, "ec_cofactor", rate_args.ec_cofactor);
    cfg.fill(rate_cm, "cm_samples", rate_args.cm_samples);
    cfg.fill(rate_opt, "optimize_k", rate_args.optimize);
    return run_rate("rate", rate_args, rate_opts);
  }
  if (optimize_cmd->parsed()) {
    const ConfigMerge cfg(load_config(optimize_opts.config));
    cfg.fill(opt_protocol, "protocol", optimize_args.protocol);
    cfg.fill(opt_channel, "channel", optimize_args.channel);
    cfg.fill(opt_signals, "signals", optimize_args.signals);
    cfg.fill(opt_qhalf, "qhalf", optimize_args.qhalf);
    cfg.fill(opt_eps, "eps_s", optimize_args.eps_s);
    cfg.fill(opt_cof, "ec_cofactor", optimize_args.ec_cofactor);
    cfg.fill(opt_trace, "trace", optimize_args.trace);
    optimize_args.optimize = true;
    return run_rate("optimize", optimize_args, optimize_opts);
  }
  if (sweep_error_cmd->parsed()) {
    const ConfigMerge cfg(load_config(sweep_error_opts.config));
    cfg.fill(swe_protocol, "protocol", sweep_error_args.protocol);
    cfg.fill(swe_channel, "channel", sweep_error_args.channel);
    cfg.fill(swe_signals, "signals", sweep_error_args.signals);
    cfg.fill(swe_qhalf, "qhalf", sweep_error_args.qhalf);
    cfg.fill(swe_eps, "eps_s", sweep_error_args.eps_s);
    cfg.fill(swe_cof, "ec_cofactor", sweep_error_args.ec_cofactor);
    cfg.fill(swe_log, "log", sweep_error_args.log_spacing);
    return run_sweep(true, sweep_error_args, sweep_error_opts);
  }
  if (sweep_blocks_cmd->parsed()) {
    const ConfigMerge cfg(load_config(sweep_blocks_opts.config));
    cfg.fill(swb_protocol, "protocol", sweep_blocks_args.protocol);
    cfg.fill(swb_channel, "channel", sweep_blocks_args.channel);
    cfg.fill(swb_signals, "signals", sweep_blocks_args.signals);
    cfg.fill(swb_qhalf, "qhalf", sweep_blocks_args.qhalf);
    cfg.fill(swb_eps, "eps_s", sweep_blocks_args.eps_s);
    cfg.fill(swb_cof, "ec_cofactor", sweep_blocks_args.ec_cofactor);
    cfg.fill(swb_log, "log", sweep_blocks_args.log_spacing);
    return run_sweep(false, sweep_blocks_args, sweep_blocks_opts);
  }
  if (threshold_cmd->parsed()) {
    const ConfigMerge cfg(load_config(threshold_opts.config));
    cfg.fill(thr_protocol, "protocol", threshold_args.protocol);
    cfg.fill(thr_channel, "channel", threshold_args.channel);
    cfg.fill(thr_signals, "signals", threshold_args.signals);
    cfg.fill(thr_eps, "eps_s", threshold_args.eps_s);
    cfg.fill(thr_cof, "ec_cofactor", threshold_args.ec_cofactor);
    return run_threshold(threshold_args, threshold_opts);
  }
  if (crossover_cmd->parsed()) {
    const ConfigMerge cfg(load_config(crossover_opts.config));
    cfg.fill(crs_a, "protocol_a", crossover_args.protocol_a);
    cfg.fill(crs_b, "protocol_b", crossover_args.protocol_b);
    cfg.fill(crs_channel, "channel", crossover_args.channel);
    cfg.fill(crs_signals, "signals", crossover_args.signals);
    cfg.fill(crs_eps, "eps_s", crossover_args.eps_s);
    cfg.fill(crs_cof, "ec_cofactor", crossover_args.ec_cofactor);
    return run_crossover(crossover_args, crossover_opts);
  }
  if (asymptotic_cmd->parsed()) {
    const ConfigMerge cfg(load_config(asymptotic_opts.config));
    cfg.fill(asy_protocol, "protocol", asymptotic_args.protocol);
    cfg.fill(asy_channel, "channel", asymptotic_args.channel);
    cfg.fill(asy_qhalf, "qhalf", asymptotic_args.qhalf);
    return run_asymptotic(asymptotic_args, asymptotic_opts);
  }
  if (simulate_cmd->parsed()) {
    const ConfigMerge cfg(load_config(simulate_opts.config));
    cfg.fill(sim_protocol, "protocol", simulate_args.protocol);
    cfg.fill(sim_channel, "channel", simulate_args.channel);
    cfg.fill(sim_rounds, "rounds", simulate_args.rounds);
    cfg.fill(sim_qhalf, "qhalf", simulate_args.qhalf);
    cfg.fill(sim_c, "em_probability", simulate_args.em_probability);
    cfg.fill(sim_seed, "seed", simulate_args.seed);
    cfg.fill(sim_sampling, "sampling", simulate_args.sampling);
    return run_simulate(simulate_args, simulate_opts);
  }
  throw UsageError("no subcommand given");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
