#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncvar/ncvar.hpp"

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kInputError = 2, kUnconverged = 3 };

struct Args {
  std::string spec_path;
  std::optional<int> cutoff;
  int delta = 8;
  std::uint64_t seed = 1;
  int restarts = 8;
  int num_extra = 0;
  std::string budget = "auto";
  std::string figure = "2a";
  std::string grid;
  std::string r_grid;
  std::string param;
  std::string csv_path;
  bool json = false;
  std::string suite = "all";
  std::string inject_fault;
  double theta = 0.3;
  long shots = 100000;
  int trials = 200;
  int max_iters = 1500;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ncvar::SpecError("cannot read spec file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ncvar::StateSpec load_spec(const Args& a, bool required = true) {
  if (a.spec_path.empty()) {
    if (required) throw ncvar::SpecError("--spec is required");
    return {};
  }
  ncvar::StateSpec s = ncvar::spec_from_string(read_file(a.spec_path));
  if (a.cutoff) {
    if (*a.cutoff < 1) throw ncvar::SpecError("--cutoff must be positive");
    s = s.with_cutoff(*a.cutoff);
    s.validate();
  }
  return s;
}

std::vector<double> parse_grid(const std::string& text, const char* flag) {
  std::vector<double> g;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      g.push_back(v);
    } catch (const std::exception&) {
      throw ncvar::InvalidArgument(std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  if (g.empty()) throw ncvar::InvalidArgument(std::string(flag) + ": grid is empty");
  return g;
}

ncvar::RunSettings settings(const Args& a) {
  if (a.delta < 1) throw ncvar::InvalidArgument("--delta must be positive");
  if (a.restarts < 1) throw ncvar::InvalidArgument("--restarts must be positive");
  if (a.num_extra < 0 || a.num_extra > 3) throw ncvar::InvalidArgument("--extra must be in 0..3");
  return {a.delta, a.seed, a.restarts, a.num_extra};
}

int emit(const ncvar::Outcome& o) {
  std::cout << o.report.dump(2) << "\n";
  return o.converged ? kOk : kUnconverged;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ncvar::InvalidArgument("cannot write '" + path + "'");
  out << text;
}

int run_sweep(const Args& a) {
  std::vector<ncvar::SweepRow> rows;
  ncvar::json meta = {{"tool", {{"name", "ncvar"}, {"version", ncvar::kVersion}}},
                      {"command", "sweep"},
                      {"figure", a.figure},
                      {"delta", a.delta}};
  if (a.figure == "2a") {
    auto g = a.grid.empty() ? ncvar::default_grid_2a() : parse_grid(a.grid, "--grid");
    auto r = a.r_grid.empty() ? ncvar::default_grid_2a_r() : parse_grid(a.r_grid, "--r-grid");
    rows = ncvar::sweep_2a(g, r, a.delta);
  } else if (a.figure == "2b") {
    auto g = a.grid.empty() ? ncvar::default_grid_2b_alpha() : parse_grid(a.grid, "--grid");
    auto r = a.r_grid.empty() ? ncvar::default_grid_2b_r() : parse_grid(a.r_grid, "--r-grid");
    rows = ncvar::sweep_2b(g, r, a.delta);
  } else if (a.figure == "custom") {
    if (a.param.empty()) throw ncvar::InvalidArgument("--figure custom needs --param");
    ncvar::StateSpec s = load_spec(a);
    rows = ncvar::sweep_custom(s, a.param, parse_grid(a.grid, "--grid"), a.delta);
    meta["spec_hash"] = ncvar::spec_hash(s);
    meta["spec"] = ncvar::spec_to_json(s);
  } else {
    throw ncvar::InvalidArgument("--figure must be 2a, 2b or custom");
  }
  bool converged = true;
  for (const auto& r : rows) converged = converged && r.converged;
  std::string csv = ncvar::sweep_csv(rows);
  if (a.json) {
    ncvar::json arr = ncvar::json::array();
    for (const auto& r : rows) {
      ncvar::json j = {{"family", r.family},   {"parameter", r.parameter}, {"measure", r.measure},
                       {"nbar", r.nbar},       {"value", r.value},         {"bound", r.bound},
                       {"saturated", r.saturated}, {"converged", r.converged}};
      if (r.closed_form) {
        j["closed_form"] = *r.closed_form;
        j["abs_delta"] = std::abs(r.value - *r.closed_form);
      }
      arr.push_back(j);
    }
    meta["rows"] = arr;
    meta["converged"] = converged;
    if (!a.csv_path.empty()) write_text(a.csv_path, csv);
    std::cout << meta.dump(2) << "\n";
  } else {
    write_text(a.csv_path, csv);
  }
  return converged ? kOk : kUnconverged;
}

int run_verify(const Args& a) {
  ncvar::VerifyOptions vo;
  vo.seed = a.seed;
  if (!a.inject_fault.empty()) {
    if (a.inject_fault != "qfi-prefactor") throw ncvar::InvalidArgument("unknown fault '" + a.inject_fault + "'");
    vo.inject_qfi_prefactor = true;
  }
  std::vector<ncvar::Check> checks;
  ncvar::json crit = ncvar::json::array();
  if (a.suite == "acceptance" || a.suite.rfind("acceptance:", 0) == 0) {
    std::vector<int> ids;
    if (a.suite == "acceptance") {
      for (int i = 1; i <= 10; ++i) ids.push_back(i);
    } else {
      ids.push_back(std::stoi(a.suite.substr(11)));
    }
    for (int id : ids) {
      ncvar::CriterionResult r = ncvar::run_criterion(id, vo);
      crit.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}});
      checks.insert(checks.end(), r.checks.begin(), r.checks.end());
    }
  } else {
    checks = ncvar::run_suite(a.suite, vo);
  }
  ncvar::json out = {{"tool", {{"name", "ncvar"}, {"version", ncvar::kVersion}}},
                     {"command", "verify"},
                     {"suite", a.suite},
                     {"seed", a.seed}};
  if (vo.inject_qfi_prefactor) out["injected_fault"] = a.inject_fault;
  ncvar::json arr = ncvar::json::array();
  int failed = 0;
  for (const auto& c : checks) {
    ncvar::json j = {{"suite", c.suite},       {"name", c.name}, {"passed", c.passed},
                     {"observed", c.observed}, {"expected", c.expected}, {"tol", c.tol}};
    if (!c.passed) j["delta"] = c.observed - c.expected;
    if (!c.note.empty()) j["note"] = c.note;
    arr.push_back(j);
    failed += !c.passed;
  }
  if (!crit.empty()) out["criteria"] = crit;
  out["checks"] = arr;
  out["failed"] = failed;
  out["passed"] = failed == 0;
  std::cout << out.dump(2) << "\n";
  return failed == 0 ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonclassicality and metrological power of bosonic states"};
  app.set_version_flag("--version", std::string(ncvar::kVersion));
  app.require_subcommand(1);
  Args a;

  auto add_common = [&](CLI::App* c, bool spec) {
    if (spec) c->add_option("--spec", a.spec_path, "state spec JSON file");
    if (spec) c->add_option("--cutoff", a.cutoff, "override every mode's Fock cutoff");
    c->add_option("--delta", a.delta, "cutoff increment for the truncation check")->capture_default_str();
    c->add_option("--seed", a.seed, "random seed")->capture_default_str();
    c->add_option("--restarts", a.restarts, "optimizer restarts")->capture_default_str();
    c->add_flag("--json", a.json, "JSON output");
  };

  auto* measure = app.add_subcommand("measure", "M, I_opt, I_mean, Q and the photon-number bound");
  add_common(measure, true);
  measure->add_option("--extra", a.num_extra, "extra decomposition components for mixed-state Q (0..3)");
  auto* gaussian = app.add_subcommand("gaussian", "covariance-matrix analysis of a Gaussian spec");
  add_common(gaussian, true);
  auto* phase = app.add_subcommand("phase", "displacement-assisted phase sensing");
  add_common(phase, true);
  phase->add_option("--budget", a.budget, "displacement amplitude |alpha| or 'auto'")->capture_default_str();
  phase->add_option("--max-iters", a.max_iters, "simplex iterations per start")->capture_default_str();
  auto* sweep = app.add_subcommand("sweep", "figure sweeps as CSV");
  add_common(sweep, true);
  sweep->add_option("--figure", a.figure, "2a, 2b or custom")->capture_default_str();
  sweep->add_option("--grid", a.grid, "comma-separated grid (alpha, r, or the custom parameter)");
  sweep->add_option("--r-grid", a.r_grid, "squeezing grid (figure 2a squeezed vacuum, figure 2b squeezed thermal)");
  sweep->add_option("--param", a.param, "custom sweep field: alpha, r, theta, gamma, nbar, n");
  sweep->add_option("--csv", a.csv_path, "CSV output path (default stdout)");
  auto* crb = app.add_subcommand("crb", "homodyne Monte Carlo against the Cramer-Rao bound");
  add_common(crb, true);
  crb->add_option("--theta", a.theta, "true parameter value")->capture_default_str();
  crb->add_option("--shots", a.shots, "samples per trial")->capture_default_str();
  crb->add_option("--trials", a.trials, "independent trials")->capture_default_str();
  auto* verify = app.add_subcommand("verify", "run check suites");
  add_common(verify, false);
  verify->add_option("--suite", a.suite, "fock, linopt, qfi, gaussian, measures, phase, estimation, all, acceptance[:N]")
      ->capture_default_str();
  verify->add_option("--inject-fault", a.inject_fault)->group("");
  auto* state = app.add_subcommand("state", "truncation and leakage report");
  add_common(state, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    ncvar::RunSettings rs = settings(a);
    if (measure->parsed()) return emit(ncvar::measure_report(load_spec(a), rs));
    if (gaussian->parsed()) return emit(ncvar::gaussian_report(load_spec(a), rs));
    if (state->parsed()) return emit(ncvar::state_report(load_spec(a), rs));
    if (phase->parsed()) {
      ncvar::PhaseSettings ps;
      ps.max_iters = a.max_iters;
      if (a.budget != "auto") {
        std::size_t used = 0;
        double b = 0.0;
        try {
          b = std::stod(a.budget, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != a.budget.size() || !(b >= 0.0)) throw ncvar::InvalidArgument("--budget must be >= 0 or 'auto'");
        ps.budget = b;
      }
      return emit(ncvar::phase_report(load_spec(a), rs, ps));
    }
    if (crb->parsed()) {
      ncvar::CrbSettings cs;
      if (!a.spec_path.empty()) cs.spec = load_spec(a);
      cs.theta = a.theta;
      cs.shots = a.shots;
      cs.trials = a.trials;
      return emit(ncvar::crb_report(rs, cs));
    }
    if (sweep->parsed()) return run_sweep(a);
    if (verify->parsed()) return run_verify(a);
  } catch (const std::exception& e) {
    // spec errors, inadmissible cutoffs, missing guarantees and size caps
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
