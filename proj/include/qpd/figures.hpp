#pragma once
// Data series behind each figure the CLI can emit: equilibrium payoff
// curves, trigger-region boundaries, mini-max sweeps, and payoff-set
// polygons, all as small string/number tables with a CSV serializer.

#include <cstdio>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "equilibria.hpp"
#include "folk.hpp"
#include "payoff.hpp"
#include "repeated.hpp"

namespace qpd {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

// 17 significant digits: enough to round-trip an IEEE double exactly.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_real(*d);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out += ',';
    out += t.header[i];
  }
  out += '\n';
  for (const std::vector<Cell>& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += cell_text(row[i]);
    }
    out += '\n';
  }
  return out;
}

enum class FigureId {
  eq_payoff_gt,
  eq_payoff_lt_a,
  eq_payoff_lt_b,
  trigger1_deltainf_gt,
  trigger1_deltainf_lt,
  trigger2_region,
  minimax_pure,
  minimax_mixed_gt,
  minimax_mixed_lt,
  feasible_gt,
  feasible_lt,
  vstar_gt,
  vstar_lt,
};

inline const std::vector<std::pair<FigureId, const char*>>& figure_id_names() {
  static const std::vector<std::pair<FigureId, const char*>> names = {
      {FigureId::eq_payoff_gt, "eq-payoff-gt"},
      {FigureId::eq_payoff_lt_a, "eq-payoff-lt-a"},
      {FigureId::eq_payoff_lt_b, "eq-payoff-lt-b"},
      {FigureId::trigger1_deltainf_gt, "trigger1-deltainf-gt"},
      {FigureId::trigger1_deltainf_lt, "trigger1-deltainf-lt"},
      {FigureId::trigger2_region, "trigger2-region"},
      {FigureId::minimax_pure, "minimax-pure"},
      {FigureId::minimax_mixed_gt, "minimax-mixed-gt"},
      {FigureId::minimax_mixed_lt, "minimax-mixed-lt"},
      {FigureId::feasible_gt, "feasible-gt"},
      {FigureId::feasible_lt, "feasible-lt"},
      {FigureId::vstar_gt, "vstar-gt"},
      {FigureId::vstar_lt, "vstar-lt"},
  };
  return names;
}

inline const char* to_string(FigureId id) {
  for (const auto& [fid, name] : figure_id_names())
    if (fid == id) return name;
  return "?";
}

inline std::optional<FigureId> parse_figure_id(const std::string& name) {
  for (const auto& [fid, fname] : figure_id_names())
    if (name == fname) return fid;
  return std::nullopt;
}

// Canonical parameter set for each figure; the suffix encodes the payoff
// regime the figure illustrates (gt/lt compare t+s with r+p for the curve
// figures and r with (t+s)/2 for the payoff-set figures).
inline PayoffParams default_figure_params(FigureId id) {
  switch (id) {
    case FigureId::eq_payoff_gt:
    case FigureId::trigger1_deltainf_gt:
    case FigureId::minimax_pure:
    case FigureId::minimax_mixed_gt:
    case FigureId::feasible_gt:
    case FigureId::vstar_gt:
      return PayoffParams{5.0, 3.0, 1.0, 0.0};
    case FigureId::eq_payoff_lt_a:
      return PayoffParams{5.0, 4.0, 1.5, 0.0};  // 2(t-r) > p-s
    case FigureId::eq_payoff_lt_b:
      return PayoffParams{5.0, 4.0, 2.5, 0.0};  // 2(t-r) < p-s
    case FigureId::trigger1_deltainf_lt:
    case FigureId::trigger2_region:
    case FigureId::minimax_mixed_lt:
      return PayoffParams{5.0, 4.0, 2.0, 0.0};
    case FigureId::feasible_lt:
    case FigureId::vstar_lt:
      return PayoffParams{5.0, 2.0, 1.0, 0.0};  // r < (t+s)/2
  }
  return PayoffParams{5.0, 3.0, 1.0, 0.0};
}

struct FigureConfig {
  std::optional<PayoffParams> params;  // figure default when absent
  int grid = 100;                      // theta samples for curve figures
  double theta = half_pi;              // used by the payoff-set figures
  std::uint64_t seed = 1;
};

namespace detail {

inline std::vector<double> theta_grid(int n) {
  if (n < 2) throw std::domain_error("theta grid needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    grid[static_cast<std::size_t>(i)] =
        half_pi * static_cast<double>(i) / static_cast<double>(n - 1);
  return grid;
}

inline std::string half_label(const MixedStrategy& m) {
  return m.prob[0] > 0.25 ? "half_iz" : "half_xy";
}

}  // namespace detail

inline Table figure_table(FigureId id, const FigureConfig& cfg) {
  const PayoffParams g = cfg.params ? *cfg.params : default_figure_params(id);
  Table t;
  switch (id) {
    case FigureId::eq_payoff_gt:
    case FigureId::eq_payoff_lt_a:
    case FigureId::eq_payoff_lt_b: {
      t.header = {"theta", "branch", "payoff_a", "payoff_b"};
      for (const double theta : detail::theta_grid(cfg.grid)) {
        if (const auto interior = interior_mixed_equilibrium(theta, g))
          t.rows.push_back({theta, std::string("interior"), interior->payoff_a,
                            interior->payoff_b});
        for (const EquilibriumCandidate& c : boundary_mixed_equilibria(theta, g)) {
          const MixedProfile& mp = std::get<MixedProfile>(c.profile);
          t.rows.push_back({theta,
                            detail::half_label(mp.a) + "_vs_" +
                                detail::half_label(mp.b),
                            c.payoff_a, c.payoff_b});
        }
      }
      break;
    }
    case FigureId::trigger1_deltainf_gt:
    case FigureId::trigger1_deltainf_lt: {
      t.header = {"theta", "delta_inf", "trigger1_valid"};
      for (const double theta : detail::theta_grid(cfg.grid))
        t.rows.push_back({theta, trigger1_delta_inf(theta, g),
                          static_cast<long long>(
                              trigger1_punishment_credible(theta, g) ? 1 : 0)});
      break;
    }
    case FigureId::trigger2_region: {
      t.header = {"theta", "delta_min"};
      for (const double theta : detail::theta_grid(cfg.grid)) {
        const std::optional<double> d =
            trigger_delta_min(TriggerVariant::trigger2, theta, g);
        t.rows.push_back(
            {theta, d ? *d : std::numeric_limits<double>::quiet_NaN()});
      }
      break;
    }
    case FigureId::minimax_pure: {
      t.header = {"theta", "value"};
      for (const double theta : detail::theta_grid(cfg.grid))
        t.rows.push_back({theta, qpd::minimax_pure(theta, g).value});
      break;
    }
    case FigureId::minimax_mixed_gt:
    case FigureId::minimax_mixed_lt: {
      t.header = {"theta", "value"};
      for (const double theta : detail::theta_grid(cfg.grid))
        t.rows.push_back({theta, minimax_mixed(theta, g).value});
      break;
    }
    case FigureId::feasible_gt:
    case FigureId::feasible_lt: {
      t.header = {"kind", "x", "y"};
      for (const PayoffProfile& v : feasible_set(cfg.theta, g).vertices)
        t.rows.push_back({std::string("vertex"), v.nu_a, v.nu_b});
      break;
    }
    case FigureId::vstar_gt:
    case FigureId::vstar_lt: {
      t.header = {"kind", "x", "y"};
      const IndividuallyRationalSet vstar =
          individually_rational_set(cfg.theta, g);
      for (const PayoffProfile& v : vstar.feasible.vertices)
        t.rows.push_back({std::string("vertex"), v.nu_a, v.nu_b});
      t.rows.push_back({std::string("cutoff"), vstar.cutoff_a, vstar.cutoff_b});
      t.rows.push_back({std::string("rr"), g.r, g.r});
      const long long member = vstar.contains({g.r, g.r}) ? 1 : 0;
      t.rows.push_back({std::string("rr_member"), member, member});
      break;
    }
  }
  return t;
}

}  // namespace qpd
