// End-to-end tests driving the command line binary as a subprocess.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(QPD_CLI_BIN) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
    r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

// Value of the row `name,<value>` in a two-column CSV block.
double csv_value(const std::string& csv, const std::string& name) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(name + ",", 0) == 0) return std::stod(line.substr(name.size() + 1));
  }
  FAIL("row not found: " << name);
  return 0.0;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

const char* kFigureIds[] = {
    "eq-payoff-gt",      "eq-payoff-lt-a",     "eq-payoff-lt-b",
    "trigger1-deltainf-gt", "trigger1-deltainf-lt", "trigger2-region",
    "minimax-pure",      "minimax-mixed-gt",   "minimax-mixed-lt",
    "feasible-gt",       "feasible-lt",        "vstar-gt", "vstar-lt",
};

}  // namespace

TEST_CASE("payoff command reproduces the classical and maximally entangled anchors") {
  const RunResult classical =
      run_cli("payoff --params 5,3,1,0 --theta 0 --pure-a 1,0,0,0 --pure-b 1,0,0,0");
  CHECK(classical.exit_code == 0);
  CHECK(csv_value(classical.output, "payoff_a") == Catch::Approx(3.0).margin(1e-12));
  CHECK(csv_value(classical.output, "payoff_b") == Catch::Approx(3.0).margin(1e-12));
  CHECK(csv_value(classical.output, "p_cc") == Catch::Approx(1.0).margin(1e-12));

  const RunResult uniform = run_cli(
      "payoff --params 5,3,1,0 --theta 1.5707963267948966 "
      "--mixed-a .25,.25,.25,.25 --mixed-b .25,.25,.25,.25");
  CHECK(uniform.exit_code == 0);
  CHECK(csv_value(uniform.output, "payoff_a") == Catch::Approx(2.25).margin(1e-12));
  CHECK(csv_value(uniform.output, "payoff_b") == Catch::Approx(2.25).margin(1e-12));
}

TEST_CASE("payoff command rejects a non-normalized vector and offers --normalize") {
  const RunResult bad = run_cli("payoff --pure-a 1,1,0,0");
  CHECK(bad.exit_code == 2);
  CHECK(contains(bad.output, "--pure-a"));
  CHECK(contains(bad.output, "not normalized"));
  CHECK(contains(bad.output, "--normalize"));

  const RunResult fixed = run_cli("payoff --theta 0 --pure-a 1,1,0,0 --normalize");
  CHECK(fixed.exit_code == 0);
  CHECK(csv_value(fixed.output, "payoff_a") == Catch::Approx(4.0).margin(1e-9));
}

TEST_CASE("payoff command cross-checks the closed form under --verify") {
  const RunResult r = run_cli(
      "payoff --theta 0.9 --pure-a 0.5,0.5,0.5,0.5 --pure-b 0.5,-0.5,0.5,-0.5 --verify");
  CHECK(r.exit_code == 0);
}

TEST_CASE("malformed inputs exit with the usage code and name the offender") {
  CHECK(run_cli("payoff --pure-a 1,0,0").exit_code == 2);
  CHECK(run_cli("payoff --pure-a one,zero,zero,zero").exit_code == 2);
  CHECK(run_cli("payoff --mixed-a .5,.5,.5,.5").exit_code == 2);  // sums to 2
  const RunResult both = run_cli("payoff --pure-a 1,0,0,0 --mixed-a 1,0,0,0");
  CHECK(both.exit_code == 2);
  CHECK(run_cli("nonsense-command").exit_code == 2);
}

TEST_CASE("domain violations exit with the domain code") {
  const RunResult order = run_cli("payoff --params 3,5,1,0");
  CHECK(order.exit_code == 3);
  CHECK(contains(order.output, "t > r > p > s"));
  CHECK(run_cli("folk --theta 7").exit_code == 3);
  CHECK(run_cli("simulate --delta 1.5").exit_code == 3);
}

TEST_CASE("equilibrium command lists verified candidates at both endpoints") {
  const RunResult max_ent =
      run_cli("equilibrium --params 5,3,1,0 --theta 1.5707963267948966");
  CHECK(max_ent.exit_code == 0);
  CHECK(contains(max_ent.output, "interior_mixed"));
  CHECK(contains(max_ent.output, "boundary_mixed"));
  CHECK(contains(max_ent.output, "0.25;0.25;0.25;0.25"));
  CHECK_FALSE(contains(max_ent.output, ",0,"));  // no unverified rows

  const RunResult classical = run_cli("equilibrium --params 5,3,1,0 --theta 0");
  CHECK(classical.exit_code == 0);
  CHECK(contains(classical.output, "classical_defect"));
  CHECK(contains(classical.output, "pure_family"));
}

TEST_CASE("equilibrium --pure-only reports a deviation witness when none exists") {
  const RunResult r = run_cli(
      "equilibrium --params 5,3,1,0 --theta 1.5707963267948966 --pure-only");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "pure_equilibrium_exists,0"));
  CHECK(csv_value(r.output, "deviation_gain") > 0.5);

  const RunResult low = run_cli("equilibrium --params 5,3,1,0 --theta 0.2 --pure-only");
  CHECK(low.exit_code == 0);
  CHECK(contains(low.output, "pure_family"));
  CHECK_FALSE(contains(low.output, "pure_equilibrium_exists"));
}

TEST_CASE("every figure id emits a byte-stable CSV table") {
  for (const char* id : kFigureIds) {
    const std::string cmd = std::string("figure ") + id + " --grid 12 --seed 7";
    const RunResult first = run_cli(cmd);
    INFO(id);
    CHECK(first.exit_code == 0);
    CHECK(contains(first.output, "\n"));
    const RunResult second = run_cli(cmd);
    CHECK(first.output == second.output);
  }
}

TEST_CASE("figure command rejects unknown ids with the full list") {
  const RunResult r = run_cli("figure no-such-figure");
  CHECK(r.exit_code == 2);
  for (const char* id : kFigureIds) CHECK(contains(r.output, id));
}

TEST_CASE("figure output goes to --out as LF-terminated bytes") {
  const std::string path = "/tmp/qpd_cli_test_figure.csv";
  std::remove(path.c_str());
  const RunResult r =
      run_cli(std::string("figure feasible-gt --out ") + path);
  CHECK(r.exit_code == 0);
  CHECK(r.output.empty());
  const std::string text = slurp(path);
  CHECK(contains(text, "vertex,3,3"));
  CHECK_FALSE(contains(text, "\r"));
  std::remove(path.c_str());
}

TEST_CASE("simulate command matches the cooperative closed form") {
  const RunResult r = run_cli(
      "simulate --a trigger1 --b trigger1 --theta 0 --delta 0.6 "
      "--horizon 200 --episodes 1 --verify");
  CHECK(r.exit_code == 0);
  CHECK(csv_value(r.output, "mean_a") == Catch::Approx(7.5).margin(1e-9));
  CHECK(csv_value(r.output, "within_3_sigma") == 1.0);
}

TEST_CASE("simulate command verifies a first-round deviation against its value") {
  const RunResult r = run_cli(
      "simulate --a 'deviate-at(0,Y)' --b trigger1 --theta 0 --delta 0.75 "
      "--episodes 2000 --seed 11 --verify");
  CHECK(r.exit_code == 0);
  // t + delta * p / (1 - delta) = 5 + 3 at theta = 0, deterministic.
  CHECK(csv_value(r.output, "mean_a") == Catch::Approx(8.0).margin(1e-9));
  CHECK(csv_value(r.output, "reference_a") == Catch::Approx(8.0).margin(1e-12));
  CHECK(csv_value(r.output, "within_3_sigma") == 1.0);
}

TEST_CASE("simulate command repeats byte-identically for a repeated seed") {
  const std::string cmd =
      "simulate --a trigger2 --b 'deviate-at(3,Z)' --theta 0.7 --delta 0.8 "
      "--episodes 300 --seed 99";
  const RunResult a = run_cli(cmd);
  const RunResult b = run_cli(cmd);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
  const RunResult c = run_cli(
      "simulate --a trigger2 --b 'deviate-at(3,Z)' --theta 0.7 --delta 0.8 "
      "--episodes 300 --seed 100");
  CHECK(a.output != c.output);
}

TEST_CASE("simulate command rejects unknown strategies with the valid list") {
  const RunResult r = run_cli("simulate --a nonsense");
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "trigger1"));
  CHECK(contains(r.output, "trigger2"));
  CHECK(contains(r.output, "always-I"));
  CHECK(contains(r.output, "deviate-at"));
  CHECK(run_cli("simulate --a 'deviate-at(x,Y)'").exit_code == 2);
  CHECK(run_cli("simulate --a 'deviate-at(1,Q)'").exit_code == 2);
}

TEST_CASE("simulate --round-log emits one record per round") {
  const RunResult r = run_cli(
      "simulate --a trigger1 --b 'deviate-at(2,X)' --theta 0 --delta 0.6 "
      "--horizon 6 --round-log");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "round,op_a,op_b,outcome,payoff_a,payoff_b"));
  CHECK(contains(r.output, "0,I,I,CC,3,3"));
  CHECK(contains(r.output, "2,I,X,CD,0,5"));
  std::size_t rows = 0;
  std::istringstream in(r.output.substr(r.output.find("round,op_a")));
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line.find(',') != std::string::npos) ++rows;
  CHECK(rows == 7);  // header plus six rounds
}

TEST_CASE("folk command reports the full region summary") {
  const RunResult max_ent =
      run_cli("folk --params 5,3,1,0 --theta 1.5707963267948966 --verify");
  CHECK(max_ent.exit_code == 0);
  CHECK(csv_value(max_ent.output, "minimax_mixed") == Catch::Approx(2.25).margin(1e-9));
  CHECK(csv_value(max_ent.output, "anti_folk_threshold_holds") == 1.0);
  CHECK(csv_value(max_ent.output, "vstar_contains_rr_at_max_entanglement") == 1.0);
  CHECK(csv_value(max_ent.output, "mutual_reward_pareto_dominated") == 0.0);
  CHECK(csv_value(max_ent.output, "pure_spe_exists") == 0.0);
  CHECK(csv_value(max_ent.output, "punishment_horizon") == 3.0);

  const RunResult classical = run_cli("folk --params 5,3,1,0 --theta 0 --verify");
  CHECK(classical.exit_code == 0);
  CHECK(csv_value(classical.output, "minimax_mixed") == Catch::Approx(1.0).margin(1e-9));
  CHECK(csv_value(classical.output, "pure_spe_exists") == 1.0);
  CHECK(csv_value(classical.output, "punishment_horizon") == 2.0);

  const RunResult weak = run_cli("folk --params 5,2,1,0 --theta 1.5707963267948966");
  CHECK(weak.exit_code == 0);
  CHECK(csv_value(weak.output, "anti_folk_threshold_holds") == 0.0);
  CHECK(csv_value(weak.output, "vstar_contains_rr_at_max_entanglement") == 0.0);
  CHECK(csv_value(weak.output, "mutual_reward_pareto_dominated") == 1.0);
}

TEST_CASE("dump-config round trip reproduces the configuration byte for byte") {
  const std::string c1 = "/tmp/qpd_cli_test_cfg1.json";
  const std::string c2 = "/tmp/qpd_cli_test_cfg2.json";
  std::remove(c1.c_str());
  std::remove(c2.c_str());
  const RunResult dump = run_cli(
      "simulate --a 'deviate-at(0,Y)' --b trigger2 --theta 0.3 --delta 0.7 "
      "--episodes 50 --seed 42 --dump-config " + c1);
  CHECK(dump.exit_code == 0);
  const RunResult redump = run_cli("--config " + c1 + " --dump-config " + c2);
  CHECK(redump.exit_code == 0);
  CHECK(slurp(c1) == slurp(c2));

  // Running from the config equals running from the original flags.
  const RunResult direct = run_cli(
      "simulate --a 'deviate-at(0,Y)' --b trigger2 --theta 0.3 --delta 0.7 "
      "--episodes 50 --seed 42");
  const RunResult loaded = run_cli("--config " + c1);
  CHECK(direct.exit_code == 0);
  CHECK(direct.output == loaded.output);

  // Explicit flags override loaded values.
  const RunResult overridden = run_cli("--config " + c1 + " --seed 43");
  CHECK(overridden.exit_code == 0);
  CHECK(overridden.output != direct.output);
  std::remove(c1.c_str());
  std::remove(c2.c_str());
}

TEST_CASE("figure configs round trip through dump-config as well") {
  const std::string c1 = "/tmp/qpd_cli_test_cfg3.json";
  std::remove(c1.c_str());
  const RunResult dump =
      run_cli("figure trigger2-region --grid 9 --dump-config " + c1);
  CHECK(dump.exit_code == 0);
  const RunResult direct = run_cli("figure trigger2-region --grid 9");
  const RunResult loaded = run_cli("--config " + c1);
  CHECK(direct.exit_code == 0);
  CHECK(loaded.exit_code == 0);
  CHECK(direct.output == loaded.output);
  std::remove(c1.c_str());
}

TEST_CASE("json output carries the configuration and the table") {
  const RunResult r = run_cli("payoff --theta 0 --format json");
  CHECK(r.exit_code == 0);
  CHECK(r.output.front() == '{');
  CHECK(contains(r.output, "\"command\": \"payoff\""));
  CHECK(contains(r.output, "\"header\""));
  CHECK(contains(r.output, "\"payoff_a\""));
  CHECK(contains(r.output, "\"rows\""));
}

TEST_CASE("csv reals carry enough digits to round-trip doubles") {
  const RunResult r = run_cli("folk --params 5,3,1,0 --theta 0.77");
  CHECK(r.exit_code == 0);
  // 17 significant digits shows up as long decimal expansions.
  CHECK(contains(r.output, "."));
  std::istringstream in(r.output);
  std::string line;
  bool long_real = false;
  while (std::getline(in, line))
    if (line.size() > 30 && line.find('.') != std::string::npos) long_real = true;
  CHECK(long_real);
  CHECK_FALSE(contains(r.output, "\r"));
}
