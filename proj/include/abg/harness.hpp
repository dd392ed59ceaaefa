#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abg/bounds.hpp"
#include "abg/funcs.hpp"
#include "abg/growth.hpp"
#include "abg/ode.hpp"
#include "abg/scale.hpp"

namespace abg {

using Section = std::map<std::string, std::string>;

/// Flat `key = value` configuration. Keys before any [section] are global;
/// each [name] section holds overrides and parameters for one scenario.
struct HarnessConfig {
  std::string triple = "iterlog:1,id,id";
  RadialGrid grid;
  double tol_order = 0.1;
  double tol_type = 0.1;
  GrowthOptions opts;
  std::string outdir = "abg-report";
  bool plot = false;
  std::map<std::string, Section> sections;
};

HarnessConfig parse_config(std::string_view text);
HarnessConfig load_config(const std::string& path);

const std::vector<std::string>& scenario_names();

struct Check {
  std::string relation;
  double measured = 0.0;
  bool pass = false;
  std::string detail;
};

struct Table {
  std::string file;  // CSV file name inside the bundle
  std::string csv;
  // Optional plot of ratio against the denominator.
  std::vector<double> x, y;
};

struct ScenarioReport {
  std::string name;
  std::string triple;
  std::vector<std::string> params;    // "key = value" echo
  std::vector<std::string> measured;  // "quantity = value"
  std::vector<Check> checks;
  std::vector<std::string> notes;
  std::vector<Table> tables;
  bool setup_failure = false;
  std::string error;  // measurement error that aborted the scenario

  bool pass() const;
  std::string text() const;
};

struct Scenario {
  std::string name;
  ScaleTriple triple = parse_triple("iterlog:1,id,id");
  RadialGrid grid;
  double tol_order = 0.1;
  double tol_type = 0.1;
  GrowthOptions opts;
  std::vector<std::string> params;
  std::vector<std::string> notes;
  std::function<void(const Scenario&, ScenarioReport&)> measure;
};

/// Dominant-order setup: f = tower(3, c0, mu0), A_1..A_{k-1} = `lower`, A_0
/// manufactured. Every tower among `lower` must have exponent below mu0.
Scenario build_thm21(const ScaleTriple& t, int k, double mu0, double c0,
                     const std::vector<Expr>& lower, const RadialGrid& g);
/// Dominant-type setup: f = tower(3, c0, mu), A_j = tower(2, c_j, mu) (c_j = 0
/// gives A_j = 0), all c_j < c0.
Scenario build_thm22(const ScaleTriple& t, int k, double mu, double c0,
                     const std::vector<double>& cj, const RadialGrid& g);

/// Builds a named scenario from the config (sections override globals).
Scenario build_scenario(const std::string& name, const HarnessConfig& cfg);

ScenarioReport run(const Scenario& s);
/// build + run; setup errors become a failing setup verdict.
ScenarioReport run_named(const std::string& name, const HarnessConfig& cfg);

/// report.txt, the CSV tables, and with `plot` one SVG per plotted table.
void write_bundle(const ScenarioReport& rep, const std::string& dir, bool plot);

std::string svg_plot(const std::string& title, const std::vector<double>& x,
                     const std::vector<double>& y, const std::string& xlabel,
                     const std::string& ylabel);

/// Recognizes expressions built by build_tower.
std::optional<TowerSpec> as_tower(const Expr& e);

}  // namespace abg
