// Command line front end for the qpd library.
//
// Subcommands:
//   payoff       stage-game payoffs and outcome distribution for one profile
//   equilibrium  closed-form equilibria valid at a given entanglement angle
//   figure       CSV/JSON data tables for the standard curve/region figures
//   simulate     Monte-Carlo episodes of repeated-game trigger strategies
//   folk         minimax values, feasible/rational sets, folk-theorem checks
//
// Exit codes: 0 success, 2 usage or parse error, 3 domain-constraint
// violation, 4 numerical verification failure (--verify modes).

#include <CLI11.hpp>
#include <json.hpp>
#include <qpd/qpd.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace {

using nlohmann::ordered_json;
using namespace qpd;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitVerify = 4;

// Discounted value of n rounds of unit stage payoff: 1 + d + ... + d^(n-1).
double finite_geometric(double delta, int n) {
  return (1.0 - std::pow(delta, n)) / (1.0 - delta);
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VerifyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Run configuration: every flag that influences output lives here so that a
// --dump-config / --config round trip reproduces the run exactly.
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string command;  // payoff | equilibrium | figure | simulate | folk
  std::vector<double> params{5.0, 3.0, 1.0, 0.0};  // t,r,p,s
  double theta = half_pi;
  int theta_grid = 0;  // >0: grid of that many points (figure curves)
  double delta = 0.9;
  std::uint64_t seed = 1;
  std::string out;            // empty: stdout
  std::string format = "csv";  // csv | json
  bool verify = false;

  // payoff
  std::vector<double> pure_a, pure_b, mixed_a, mixed_b;
  bool normalize = false;

  // equilibrium
  bool pure_only = false;

  // figure
  std::string figure_id;
  bool default_params = true;  // cleared when --params given explicitly

  // simulate
  std::string strategy_a = "trigger1";
  std::string strategy_b = "trigger1";
  int horizon = 256;
  int episodes = 1;
  bool round_log = false;
};

ordered_json config_to_json(const RunConfig& c) {
  ordered_json j;
  j["command"] = c.command;
  j["params"] = c.params;
  j["theta"] = c.theta;
  j["theta_grid"] = c.theta_grid;
  j["delta"] = c.delta;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["format"] = c.format;
  j["verify"] = c.verify;
  j["pure_a"] = c.pure_a;
  j["pure_b"] = c.pure_b;
  j["mixed_a"] = c.mixed_a;
  j["mixed_b"] = c.mixed_b;
  j["normalize"] = c.normalize;
  j["pure_only"] = c.pure_only;
  j["figure_id"] = c.figure_id;
  j["default_params"] = c.default_params;
  j["strategy_a"] = c.strategy_a;
  j["strategy_b"] = c.strategy_b;
  j["horizon"] = c.horizon;
  j["episodes"] = c.episodes;
  j["round_log"] = c.round_log;
  return j;
}

RunConfig config_from_json(const ordered_json& j) {
  RunConfig c;
  c.command = j.at("command").get<std::string>();
  c.params = j.at("params").get<std::vector<double>>();
  c.theta = j.at("theta").get<double>();
  c.theta_grid = j.at("theta_grid").get<int>();
  c.delta = j.at("delta").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.out = j.at("out").get<std::string>();
  c.format = j.at("format").get<std::string>();
  c.verify = j.at("verify").get<bool>();
  c.pure_a = j.at("pure_a").get<std::vector<double>>();
  c.pure_b = j.at("pure_b").get<std::vector<double>>();
  c.mixed_a = j.at("mixed_a").get<std::vector<double>>();
  c.mixed_b = j.at("mixed_b").get<std::vector<double>>();
  c.normalize = j.at("normalize").get<bool>();
  c.pure_only = j.at("pure_only").get<bool>();
  c.figure_id = j.at("figure_id").get<std::string>();
  c.default_params = j.at("default_params").get<bool>();
  c.strategy_a = j.at("strategy_a").get<std::string>();
  c.strategy_b = j.at("strategy_b").get<std::string>();
  c.horizon = j.at("horizon").get<int>();
  c.episodes = j.at("episodes").get<int>();
  c.round_log = j.at("round_log").get<bool>();
  return c;
}

PayoffParams game_of(const RunConfig& c) {
  if (c.params.size() != 4)
    throw UsageError("--params expects exactly four values t,r,p,s");
  return PayoffParams{c.params[0], c.params[1], c.params[2], c.params[3]};
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

ordered_json table_to_json(const Table& t) {
  ordered_json rows = ordered_json::array();
  for (const std::vector<Cell>& row : t.rows) {
    ordered_json r = ordered_json::array();
    for (const Cell& c : row) {
      if (const double* d = std::get_if<double>(&c)) r.push_back(*d);
      else if (const long long* i = std::get_if<long long>(&c)) r.push_back(*i);
      else r.push_back(std::get<std::string>(c));
    }
    rows.push_back(std::move(r));
  }
  ordered_json j;
  j["header"] = t.header;
  j["rows"] = std::move(rows);
  return j;
}

std::string render(const std::vector<std::pair<std::string, Table>>& tables,
                   const RunConfig& cfg) {
  if (cfg.format == "json") {
    ordered_json j;
    j["command"] = cfg.command;
    j["config"] = config_to_json(cfg);
    for (const auto& [name, table] : tables) j[name] = table_to_json(table);
    return j.dump(2) + "\n";
  }
  std::string out;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) out += '\n';  // blank line between blocks
    out += to_csv(tables[i].second);
  }
  return out;
}

void emit(const std::string& text, const RunConfig& cfg) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + cfg.out);
  f << text;
}

std::string vec_label(const Vec4& v) {
  std::string s;
  for (int i = 0; i < 4; ++i) {
    if (i) s += ';';
    s += format_real(v[static_cast<std::size_t>(i)]);
  }
  return s;
}

std::string coeff_label(const PureStrategy& x) {
  return vec_label(Vec4{x.alpha, x.beta, x.gamma, x.delta});
}

// ---------------------------------------------------------------------------
// payoff
// ---------------------------------------------------------------------------

std::vector<double> parse_vec4(const std::vector<double>& raw,
                               const std::string& flag) {
  if (raw.size() != 4) {
    std::ostringstream os;
    os << flag << " expects four comma-separated numbers, got " << raw.size();
    throw UsageError(os.str());
  }
  return raw;
}

// One side of a profile as a classical mixture of unit-norm unitaries.
struct SideMixture {
  std::vector<std::pair<double, PureStrategy>> atoms;
  std::string label;
  bool pure = false;
};

SideMixture side_from_pure(const std::vector<double>& raw, bool normalize,
                           const std::string& flag) {
  std::vector<double> v = parse_vec4(raw, flag);
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (std::abs(norm - 1.0) > 1e-9) {
    if (!normalize) {
      std::ostringstream os;
      os << flag << ": vector is not normalized (|x| = " << format_real(norm)
         << "); pass --normalize to rescale it";
      throw UsageError(os.str());
    }
    if (norm < 1e-12) throw UsageError(flag + ": vector has zero norm");
    for (double& x : v) x /= norm;
  }
  SideMixture s;
  s.atoms.emplace_back(1.0, PureStrategy{v[0], v[1], v[2], v[3]});
  s.label = vec_label(Vec4{v[0], v[1], v[2], v[3]});
  s.pure = true;
  return s;
}

SideMixture side_from_mixed(const std::vector<double>& raw, bool normalize,
                            const std::string& flag) {
  std::vector<double> v = parse_vec4(raw, flag);
  double sum = 0.0;
  for (double x : v) {
    if (x < -1e-9) throw UsageError(flag + ": negative probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    if (!normalize) {
      std::ostringstream os;
      os << flag << ": probabilities sum to " << format_real(sum)
         << ", not 1; pass --normalize to rescale them";
      throw UsageError(os.str());
    }
    if (sum < 1e-12) throw UsageError(flag + ": probabilities sum to zero");
    for (double& x : v) x /= sum;
  }
  SideMixture s;
  for (int i = 0; i < 4; ++i)
    if (v[static_cast<std::size_t>(i)] > 0.0)
      s.atoms.emplace_back(v[static_cast<std::size_t>(i)],
                           PureStrategy::from_pauli(static_cast<Pauli>(i)));
  s.label = vec_label(Vec4{v[0], v[1], v[2], v[3]});
  return s;
}

int cmd_payoff(RunConfig& cfg) {
  const PayoffParams g = game_of(cfg);
  check_theta(cfg.theta);

  if (!cfg.pure_a.empty() && !cfg.mixed_a.empty())
    throw UsageError("give either --pure-a or --mixed-a, not both");
  if (!cfg.pure_b.empty() && !cfg.mixed_b.empty())
    throw UsageError("give either --pure-b or --mixed-b, not both");

  const SideMixture a =
      !cfg.mixed_a.empty()
          ? side_from_mixed(cfg.mixed_a, cfg.normalize, "--mixed-a")
          : side_from_pure(cfg.pure_a.empty() ? std::vector<double>{1, 0, 0, 0}
                                              : cfg.pure_a,
                           cfg.normalize, "--pure-a");
  const SideMixture b =
      !cfg.mixed_b.empty()
          ? side_from_mixed(cfg.mixed_b, cfg.normalize, "--mixed-b")
          : side_from_pure(cfg.pure_b.empty() ? std::vector<double>{1, 0, 0, 0}
                                              : cfg.pure_b,
                           cfg.normalize, "--pure-b");

  std::array<double, 4> dist{0.0, 0.0, 0.0, 0.0};
  for (const auto& [wa, xa] : a.atoms)
    for (const auto& [wb, xb] : b.atoms) {
      const std::array<double, 4> p =
          pure_outcome_probabilities(xa, xb, cfg.theta);
      for (int k = 0; k < 4; ++k)
        dist[static_cast<std::size_t>(k)] +=
            wa * wb * p[static_cast<std::size_t>(k)];
    }
  const std::array<double, 4> da = payoff_diagonal(g, Player::A);
  const std::array<double, 4> db = payoff_diagonal(g, Player::B);
  double pay_a = 0.0, pay_b = 0.0;
  for (int k = 0; k < 4; ++k) {
    pay_a += dist[static_cast<std::size_t>(k)] * da[static_cast<std::size_t>(k)];
    pay_b += dist[static_cast<std::size_t>(k)] * db[static_cast<std::size_t>(k)];
  }

  if (cfg.verify && a.pure && b.pure) {
    // Cross-check the closed-form path against full state evolution.
    const PureStrategy& xa = a.atoms[0].second;
    const PureStrategy& xb = b.atoms[0].second;
    const TwoQubitState psi = evolve(xa, xb, cfg.theta);
    const double ref_a = expected_payoff(psi, g, Player::A);
    const double ref_b = expected_payoff(psi, g, Player::B);
    if (std::abs(ref_a - pay_a) > 1e-9 || std::abs(ref_b - pay_b) > 1e-9)
      throw VerifyError("closed-form payoff disagrees with state evolution");
  }

  Table t;
  t.header = {"quantity", "value"};
  t.rows.push_back({std::string("payoff_a"), pay_a});
  t.rows.push_back({std::string("payoff_b"), pay_b});
  const char* names[4] = {"p_cc", "p_cd", "p_dc", "p_dd"};
  for (int k = 0; k < 4; ++k)
    t.rows.push_back({std::string(names[k]), dist[static_cast<std::size_t>(k)]});
  t.rows.push_back({std::string("strategy_a"), a.label});
  t.rows.push_back({std::string("strategy_b"), b.label});
  emit(render({{"table", t}}, cfg), cfg);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// equilibrium
// ---------------------------------------------------------------------------

void push_candidate(Table& t, const EquilibriumCandidate& cand, double theta,
                    const PayoffParams& g, bool* all_verified) {
  const bool ok = verify_candidate(cand, theta, g);
  if (all_verified && !ok) *all_verified = false;
  std::string sa, sb;
  if (cand.is_pure()) {
    const PureProfile& pp = std::get<PureProfile>(cand.profile);
    sa = coeff_label(pp.a);
    sb = coeff_label(pp.b);
  } else {
    const MixedProfile& mp = std::get<MixedProfile>(cand.profile);
    sa = vec_label(Vec4{mp.a.prob[0], mp.a.prob[1], mp.a.prob[2], mp.a.prob[3]});
    sb = vec_label(Vec4{mp.b.prob[0], mp.b.prob[1], mp.b.prob[2], mp.b.prob[3]});
  }
  std::string note = cand.note;
  for (char& ch : note)
    if (ch == ',') ch = ';';  // keep the CSV column count intact
  t.rows.push_back({std::string(to_string(cand.kind)), sa, sb, cand.payoff_a,
                    cand.payoff_b, static_cast<long long>(ok ? 1 : 0),
                    std::move(note)});
}

int cmd_equilibrium(RunConfig& cfg) {
  const PayoffParams g = game_of(cfg);
  check_theta(cfg.theta);

  std::vector<EquilibriumCandidate> found;
  try {
    found.push_back(classical_equilibrium(cfg.theta, g));
  } catch (const NoEquilibriumError&) {
  }
  for (double phi : {0.0, pi / 8.0, pi / 4.0}) {
    try {
      found.push_back(pure_equilibrium_family(phi, cfg.theta, g));
    } catch (const NoEquilibriumError&) {
      break;  // same validity threshold for every phi
    }
  }
  if (!cfg.pure_only) {
    if (std::optional<EquilibriumCandidate> c =
            interior_mixed_equilibrium(cfg.theta, g))
      found.push_back(*c);
    for (const EquilibriumCandidate& c : boundary_mixed_equilibria(cfg.theta, g))
      found.push_back(c);
  } else {
    std::erase_if(found,
                  [](const EquilibriumCandidate& c) { return !c.is_pure(); });
  }

  Table t;
  t.header = {"kind", "strategy_a", "strategy_b",
              "payoff_a", "payoff_b", "verified", "note"};
  bool all_verified = true;
  for (const EquilibriumCandidate& c : found)
    push_candidate(t, c, cfg.theta, g, &all_verified);

  std::vector<std::pair<std::string, Table>> tables{{"equilibria", t}};

  if (cfg.pure_only && found.empty()) {
    // No pure equilibrium at this angle: exhibit an improving deviation
    // against a representative pure profile as a witness.
    const PureStrategy x = PureStrategy::from_pauli(Pauli::X);
    const double stay = pure_payoff(x, x, cfg.theta, g, Player::A);
    const BestResponse br = best_response_pure(x, cfg.theta, g);
    Table w;
    w.header = {"quantity", "value"};
    w.rows.push_back({std::string("pure_equilibrium_exists"), 0LL});
    w.rows.push_back({std::string("witness_profile_a"), coeff_label(x)});
    w.rows.push_back({std::string("witness_profile_b"), coeff_label(x)});
    w.rows.push_back({std::string("witness_payoff"), stay});
    w.rows.push_back({std::string("deviation_a"), coeff_label(br.argmax)});
    w.rows.push_back({std::string("deviation_payoff"), br.value});
    w.rows.push_back({std::string("deviation_gain"), br.value - stay});
    tables.emplace_back("no_pure_equilibrium", w);
  }

  if (cfg.verify && !all_verified)
    throw VerifyError("a listed equilibrium candidate failed verification");

  emit(render(tables, cfg), cfg);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// figure
// ---------------------------------------------------------------------------

int cmd_figure(RunConfig& cfg) {
  const std::optional<FigureId> id = parse_figure_id(cfg.figure_id);
  if (!id) {
    std::ostringstream os;
    os << "unknown figure id '" << cfg.figure_id << "'; valid ids:";
    for (const auto& [fid, name] : figure_id_names()) os << ' ' << name;
    throw UsageError(os.str());
  }
  FigureConfig fc;
  if (!cfg.default_params) fc.params = game_of(cfg);
  fc.grid = cfg.theta_grid > 0 ? cfg.theta_grid : 100;
  fc.theta = cfg.theta;
  fc.seed = cfg.seed;

  const Table t = figure_table(*id, fc);
  if (cfg.verify) {
    // Determinism check: a second evaluation must be byte-identical.
    const Table t2 = figure_table(*id, fc);
    if (to_csv(t) != to_csv(t2))
      throw VerifyError("figure table is not deterministic");
  }
  emit(render({{"figure", t}}, cfg), cfg);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct StrategySpec {
  enum class Kind { trigger1, trigger2, always_i, deviate_at } kind;
  int round = 0;        // deviate_at
  Pauli op = Pauli::I;  // deviate_at
  std::string name;
};

StrategySpec parse_strategy(const std::string& name) {
  StrategySpec s;
  s.name = name;
  if (name == "trigger1") {
    s.kind = StrategySpec::Kind::trigger1;
    return s;
  }
  if (name == "trigger2") {
    s.kind = StrategySpec::Kind::trigger2;
    return s;
  }
  if (name == "always-I") {
    s.kind = StrategySpec::Kind::always_i;
    return s;
  }
  const std::string prefix = "deviate-at(";
  if (name.rfind(prefix, 0) == 0 && name.back() == ')') {
    const std::string body = name.substr(prefix.size(),
                                         name.size() - prefix.size() - 1);
    const std::size_t comma = body.find(',');
    if (comma != std::string::npos) {
      const std::string round_text = body.substr(0, comma);
      std::string op_text = body.substr(comma + 1);
      while (!op_text.empty() && op_text.front() == ' ') op_text.erase(0, 1);
      std::size_t used = 0;
      int round = -1;
      try {
        round = std::stoi(round_text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      std::optional<Pauli> op;
      if (op_text == "I") op = Pauli::I;
      else if (op_text == "X") op = Pauli::X;
      else if (op_text == "Y") op = Pauli::Y;
      else if (op_text == "Z") op = Pauli::Z;
      if (used == round_text.size() && round >= 0 && op) {
        s.kind = StrategySpec::Kind::deviate_at;
        s.round = round;
        s.op = *op;
        return s;
      }
    }
  }
  throw UsageError("unknown strategy '" + name +
                   "'; valid names: trigger1, trigger2, always-I, "
                   "deviate-at(<round>,<I|X|Y|Z>)");
}

TriggerVariant base_variant(const StrategySpec& self, const StrategySpec& other) {
  if (self.kind == StrategySpec::Kind::trigger2) return TriggerVariant::trigger2;
  if (self.kind == StrategySpec::Kind::trigger1) return TriggerVariant::trigger1;
  // always-I and deviate-at ride on top of a trigger automaton; follow the
  // opponent's variant so punished deviations are scored by the right scheme.
  if (other.kind == StrategySpec::Kind::trigger2) return TriggerVariant::trigger2;
  return TriggerVariant::trigger1;
}

std::vector<ForcedMove> forced_moves(const StrategySpec& s, int horizon) {
  std::vector<ForcedMove> f;
  if (s.kind == StrategySpec::Kind::always_i) {
    f.reserve(static_cast<std::size_t>(horizon));
    for (int r = 0; r < horizon; ++r) f.push_back({r, Pauli::I});
  } else if (s.kind == StrategySpec::Kind::deviate_at) {
    f.push_back({s.round, s.op});
  }
  return f;
}

// Infinite-horizon reference value for the configurations that have one.
// Returns nullopt when no analytic comparison applies.
struct Reference {
  double value_a = 0.0, value_b = 0.0;
  bool has_a = false, has_b = false;
};

double punish_value(TriggerVariant v, double theta, double delta,
                    const PayoffParams& g) {
  if (v == TriggerVariant::trigger1)
    return delta / (1.0 - delta) * trigger1_punish_stage(theta, g);
  return delta * trigger2_values(theta, delta, g).v_punish;
}

std::optional<Reference> analytic_reference(const StrategySpec& a,
                                            const StrategySpec& b,
                                            const RunConfig& cfg,
                                            const PayoffParams& g) {
  using K = StrategySpec::Kind;
  const bool a_coop = a.kind == K::trigger1 || a.kind == K::trigger2 ||
                      a.kind == K::always_i;
  const bool b_coop = b.kind == K::trigger1 || b.kind == K::trigger2 ||
                      b.kind == K::always_i;
  Reference ref;
  if (a_coop && b_coop) {
    // Cooperation path: the stage payoff is r every round.
    const double v = g.r * finite_geometric(cfg.delta, cfg.horizon);
    ref.value_a = ref.value_b = v;
    ref.has_a = ref.has_b = true;
    return ref;
  }
  const bool a_dev = a.kind == K::deviate_at;
  const bool b_dev = b.kind == K::deviate_at;
  if (a_dev == b_dev) return std::nullopt;  // both deviate: no closed form
  const StrategySpec& dev = a_dev ? a : b;
  const StrategySpec& opp = a_dev ? b : a;
  if (opp.kind != K::trigger1 && opp.kind != K::trigger2) return std::nullopt;
  // r, r, ..., r (k rounds), one-shot deviation payoff, then punishment.
  const double dk = std::pow(cfg.delta, dev.round);
  const PureStrategy dev_op = PureStrategy::from_pauli(dev.op);
  const PureStrategy identity = PureStrategy::from_pauli(Pauli::I);
  const double one_shot =
      a_dev ? pure_payoff(dev_op, identity, cfg.theta, g, Player::A)
            : pure_payoff(identity, dev_op, cfg.theta, g, Player::B);
  const TriggerVariant v = opp.kind == K::trigger2 ? TriggerVariant::trigger2
                                                   : TriggerVariant::trigger1;
  double value = g.r * finite_geometric(cfg.delta, dev.round) +
                 dk * (one_shot + punish_value(v, cfg.theta, cfg.delta, g));
  if (dev.op == Pauli::I)
    value = g.r * finite_geometric(cfg.delta, cfg.horizon);  // no actual deviation
  if (a_dev) {
    ref.value_a = value;
    ref.has_a = true;
  } else {
    ref.value_b = value;
    ref.has_b = true;
  }
  return ref;
}

int cmd_simulate(RunConfig& cfg) {
  const PayoffParams g = game_of(cfg);
  check_theta(cfg.theta);
  check_delta(cfg.delta);
  if (cfg.horizon <= 0) throw std::domain_error("horizon must be positive");
  if (cfg.episodes <= 0) throw std::domain_error("episodes must be positive");

  const StrategySpec spec_a = parse_strategy(cfg.strategy_a);
  const StrategySpec spec_b = parse_strategy(cfg.strategy_b);

  const TriggerAutomaton auto_a(base_variant(spec_a, spec_b));
  const TriggerAutomaton auto_b(base_variant(spec_b, spec_a));

  SimulationOptions opt;
  opt.delta = cfg.delta;
  opt.horizon = cfg.horizon;
  opt.forced_a = forced_moves(spec_a, cfg.horizon);
  opt.forced_b = forced_moves(spec_b, cfg.horizon);
  opt.record_rounds = cfg.round_log && cfg.episodes == 1;

  const StageGameTable table(cfg.theta, g);
  const BatchSummary batch =
      run_batch(auto_a, auto_b, table, opt, cfg.seed, cfg.episodes);

  Table t;
  t.header = {"quantity", "value"};
  t.rows.push_back({std::string("strategy_a"), spec_a.name});
  t.rows.push_back({std::string("strategy_b"), spec_b.name});
  t.rows.push_back({std::string("episodes"),
                    static_cast<long long>(batch.episodes)});
  t.rows.push_back({std::string("mean_a"), batch.mean_a});
  t.rows.push_back({std::string("mean_b"), batch.mean_b});
  t.rows.push_back({std::string("stddev_a"), batch.stddev_a});
  t.rows.push_back({std::string("stddev_b"), batch.stddev_b});

  const std::optional<Reference> ref = analytic_reference(spec_a, spec_b, cfg, g);
  bool within = true;
  if (ref) {
    // Slack: 3 standard errors plus the truncated geometric tail.
    const double tail =
        std::pow(cfg.delta, cfg.horizon) * g.t / (1.0 - cfg.delta) + 1e-9;
    if (ref->has_a) {
      t.rows.push_back({std::string("reference_a"), ref->value_a});
      within = within &&
               std::abs(batch.mean_a - ref->value_a) <=
                   3.0 * batch.stderr_a() + tail;
    }
    if (ref->has_b) {
      t.rows.push_back({std::string("reference_b"), ref->value_b});
      within = within &&
               std::abs(batch.mean_b - ref->value_b) <=
                   3.0 * batch.stderr_b() + tail;
    }
    t.rows.push_back({std::string("within_3_sigma"),
                      static_cast<long long>(within ? 1 : 0)});
  }

  std::vector<std::pair<std::string, Table>> tables{{"summary", t}};

  if (opt.record_rounds) {
    const RepeatedGameResult one =
        run_episode(auto_a, auto_b, table, opt, cfg.seed);
    Table rl;
    rl.header = {"round", "op_a", "op_b", "outcome", "payoff_a", "payoff_b"};
    for (std::size_t i = 0; i < one.rounds.size(); ++i) {
      const RoundRecord& r = one.rounds[i];
      rl.rows.push_back({static_cast<long long>(i),
                         std::string(to_string(r.op_a)),
                         std::string(to_string(r.op_b)),
                         std::string(to_string(r.outcome)), r.payoff_a,
                         r.payoff_b});
    }
    tables.emplace_back("rounds", rl);
  }

  if (cfg.verify && ref && !within)
    throw VerifyError("simulated mean deviates from the analytic value "
                      "by more than 3 standard errors");

  emit(render(tables, cfg), cfg);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// folk
// ---------------------------------------------------------------------------

int cmd_folk(RunConfig& cfg) {
  const PayoffParams g = game_of(cfg);
  check_theta(cfg.theta);

  const MinimaxPureSolution mp = minimax_pure(cfg.theta, g);
  const MinimaxMixedSolution mm = minimax_mixed(cfg.theta, g);
  const IndividuallyRationalSet vstar = individually_rational_set(cfg.theta, g);
  const AntiFolkReport af = anti_folk_check(g);
  const bool spe = pure_spe_exists(cfg.theta, g);

  if (cfg.verify) {
    // Recheck the minimax LP duality certificate from scratch.
    const Mat4 m = mixed_payoff_matrix(g, cfg.theta);
    for (int i = 0; i < 4; ++i) {
      double row = 0.0, col = 0.0;
      for (int j = 0; j < 4; ++j) {
        row += m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
               mm.minimizer.prob[static_cast<std::size_t>(j)];
        col += mm.best_reply.prob[static_cast<std::size_t>(j)] *
               m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      }
      if (row > mm.value + 1e-9 || col < mm.value - 1e-9)
        throw VerifyError("minimax duality certificate failed");
    }
  }

  Table t;
  t.header = {"quantity", "value"};
  t.rows.push_back({std::string("minimax_pure"), mp.value});
  t.rows.push_back({std::string("minimax_mixed"), mm.value});
  t.rows.push_back({std::string("cutoff_a"), vstar.cutoff_a});
  t.rows.push_back({std::string("cutoff_b"), vstar.cutoff_b});
  t.rows.push_back({std::string("minimax_minimizer"),
                    vec_label(Vec4{mm.minimizer.prob[0], mm.minimizer.prob[1],
                                   mm.minimizer.prob[2], mm.minimizer.prob[3]})});
  t.rows.push_back({std::string("mutual_reward_in_vstar"),
                    static_cast<long long>(
                        vstar.contains(PayoffProfile{g.r, g.r}) ? 1 : 0)});
  t.rows.push_back({std::string("anti_folk_threshold_holds"),
                    static_cast<long long>(af.threshold_holds ? 1 : 0)});
  t.rows.push_back({std::string("vstar_contains_rr_at_max_entanglement"),
                    static_cast<long long>(af.vstar_contains_rr ? 1 : 0)});
  t.rows.push_back({std::string("mutual_reward_pareto_dominated"),
                    static_cast<long long>(af.pareto_dominated ? 1 : 0)});
  t.rows.push_back({std::string("pure_spe_exists"),
                    static_cast<long long>(spe ? 1 : 0)});

  // Shortest credible punishment spell supporting mutual cooperation.
  const MixedProfile punishment{mm.minimizer, mm.minimizer};
  const MixedProfile target{MixedStrategy::from_pauli(Pauli::I),
                            MixedStrategy::from_pauli(Pauli::I)};
  try {
    const int horizon = punishment_horizon(target, punishment, cfg.theta, g);
    t.rows.push_back({std::string("punishment_horizon"),
                      static_cast<long long>(horizon)});
  } catch (const NoPunishmentError& e) {
    t.rows.push_back({std::string("punishment_horizon"), std::string(e.what())});
  }

  Table poly;
  poly.header = {"vertex", "payoff_a", "payoff_b"};
  for (std::size_t i = 0; i < vstar.feasible.vertices.size(); ++i)
    poly.rows.push_back({static_cast<long long>(i),
                         vstar.feasible.vertices[i].nu_a,
                         vstar.feasible.vertices[i].nu_b});

  emit(render({{"summary", t}, {"feasible_polygon", poly}}, cfg), cfg);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// wiring
// ---------------------------------------------------------------------------

void add_common(CLI::App* sub, RunConfig& cfg, bool* params_given) {
  sub->fallthrough();  // let app-level --config/--dump-config follow the name
  sub->add_option("--params", cfg.params,
                  "payoff parameters t,r,p,s (require t > r > p > s >= 0)")
      ->delimiter(',')
      ->expected(4)
      ->each([params_given](const std::string&) { *params_given = true; });
  sub->add_option("--theta", cfg.theta, "entanglement angle in [0, pi/2]");
  sub->add_option("--theta-grid", cfg.theta_grid,
                  "number of theta samples for curve output");
  sub->add_option("--delta", cfg.delta, "discount factor in (0, 1)");
  sub->add_option("--seed", cfg.seed, "random seed");
  sub->add_option("--out", cfg.out, "output file (default: stdout)");
  sub->add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--verify", cfg.verify,
                "run the numerical self-check for this command");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  bool params_given = false;
  std::string config_path, dump_path;

  CLI::App app{"entangled prisoner's dilemma toolkit"};
  app.require_subcommand(0, 1);
  app.add_option("--config", config_path,
                 "load a JSON run configuration before parsing flags")
      ->expected(1);
  app.add_option("--dump-config", dump_path,
                 "write the effective configuration as JSON and exit "
                 "('-' for stdout)")
      ->expected(1);

  // --config is applied before the regular flags, so do a cheap manual scan
  // first; explicitly given flags then override the loaded values.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream f(argv[i + 1]);
      if (!f) {
        std::cerr << "error: cannot open config file " << argv[i + 1] << "\n";
        return kExitUsage;
      }
      try {
        cfg = config_from_json(ordered_json::parse(f));
        params_given = !cfg.default_params;
      } catch (const std::exception& e) {
        std::cerr << "error: bad config file: " << e.what() << "\n";
        return kExitUsage;
      }
      break;
    }
  }

  CLI::App* payoff =
      app.add_subcommand("payoff", "stage payoffs and outcome distribution");
  add_common(payoff, cfg, &params_given);
  payoff->add_option("--pure-a", cfg.pure_a,
                     "Alice unitary coefficients a,b,c,d (unit norm)")
      ->delimiter(',');
  payoff->add_option("--pure-b", cfg.pure_b,
                     "Bob unitary coefficients a,b,c,d (unit norm)")
      ->delimiter(',');
  payoff->add_option("--mixed-a", cfg.mixed_a,
                     "Alice mixture over I,X,Y,Z (sums to 1)")
      ->delimiter(',');
  payoff->add_option("--mixed-b", cfg.mixed_b,
                     "Bob mixture over I,X,Y,Z (sums to 1)")
      ->delimiter(',');
  payoff->add_flag("--normalize", cfg.normalize,
                   "rescale non-normalized strategy vectors");

  CLI::App* equilibrium = app.add_subcommand(
      "equilibrium", "closed-form equilibria valid at the given angle");
  add_common(equilibrium, cfg, &params_given);
  equilibrium->add_flag("--pure-only", cfg.pure_only,
                        "restrict to equilibria in pure unitary strategies");

  CLI::App* figure =
      app.add_subcommand("figure", "emit a figure data table (CSV/JSON)");
  add_common(figure, cfg, &params_given);
  figure->add_option("figure_id", cfg.figure_id, "figure identifier")
      ->required();
  figure->add_option("--grid", cfg.theta_grid,
                     "theta grid resolution for curve figures");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte-Carlo simulation of repeated-game strategies");
  add_common(simulate, cfg, &params_given);
  simulate->add_option("--a", cfg.strategy_a, "strategy for Alice");
  simulate->add_option("--b", cfg.strategy_b, "strategy for Bob");
  simulate->add_option("--horizon", cfg.horizon, "rounds per episode");
  simulate->add_option("--episodes", cfg.episodes, "number of episodes");
  simulate->add_flag("--round-log", cfg.round_log,
                     "emit a per-round record (single episode only)");

  CLI::App* folk = app.add_subcommand(
      "folk", "minimax values and folk-theorem region report");
  add_common(folk, cfg, &params_given);

  // Re-select the subcommand recorded in a loaded config when the command
  // line itself does not name one.
  std::vector<std::string> args(argv + 1, argv + argc);
  bool has_subcommand = false;
  for (const std::string& a : args)
    if (a == "payoff" || a == "equilibrium" || a == "figure" ||
        a == "simulate" || a == "folk")
      has_subcommand = true;
  if (!has_subcommand && !cfg.command.empty()) {
    args.insert(args.begin(), cfg.command);
    if (cfg.command == "figure") {
      // The positional figure id is part of the config; re-supply it.
      args.insert(args.begin() + 1, cfg.figure_id);
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (payoff->parsed()) cfg.command = "payoff";
  else if (equilibrium->parsed()) cfg.command = "equilibrium";
  else if (figure->parsed()) cfg.command = "figure";
  else if (simulate->parsed()) cfg.command = "simulate";
  else if (folk->parsed()) cfg.command = "folk";
  cfg.default_params = !params_given;

  if (!dump_path.empty()) {
    const std::string text = config_to_json(cfg).dump(2) + "\n";
    if (dump_path == "-") {
      std::cout << text;
    } else {
      std::ofstream f(dump_path, std::ios::binary);
      if (!f) {
        std::cerr << "error: cannot open " << dump_path << "\n";
        return kExitUsage;
      }
      f << text;
    }
    return kExitOk;
  }

  if (cfg.command.empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (cfg.command == "payoff") return cmd_payoff(cfg);
    if (cfg.command == "equilibrium") return cmd_equilibrium(cfg);
    if (cfg.command == "figure") return cmd_figure(cfg);
    if (cfg.command == "simulate") return cmd_simulate(cfg);
    if (cfg.command == "folk") return cmd_folk(cfg);
    std::cerr << "error: unknown command " << cfg.command << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const VerifyError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kExitVerify;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
