#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "dephasim/entangle.hpp"
#include "dephasim/json_io.hpp"
#include "dephasim/oracle.hpp"
#include "dephasim/verify.hpp"
#include "dephasim/witness.hpp"

using namespace dephasim;

namespace {

#ifndef DEPHASIM_PRESET_DIR
#define DEPHASIM_PRESET_DIR "presets"
#endif

struct Options {
  std::string config;
  std::string out;
  int threads = 1;  // reserved: pipelines are deterministic and serial
  double tolerance = 1.0;
};

std::string provenance(const nlohmann::json& cfg) {
  return std::string("dephasim ") + kVersion + " config=" + config_hash(cfg);
}

std::filesystem::path out_path(const RunConfig& cfg, const Options& opt,
                               const std::string& name) {
  const std::string dir = opt.out.empty() ? cfg.out_dir : opt.out;
  return std::filesystem::path(dir) / name;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

RunConfig load_run_config(const Options& opt) {
  if (opt.config.empty()) throw ConfigParseError("missing --config");
  return run_config_from_json(load_json_file(opt.config));
}

Matrix full_initial(const RunConfig& cfg) {
  if (cfg.initial) {
    if (cfg.initial->rows() != cfg.model.total_dimension())
      throw ConfigParseError("initial: dimension does not match the model");
    return *cfg.initial;
  }
  if (cfg.initial_system && cfg.split && cfg.env)
    return compose_initial(cfg.model, *cfg.split, *cfg.initial_system, *cfg.env);
  throw ConfigParseError("evolve: needs initial, or initial_system with split and env");
}

Matrix system_initial(const RunConfig& cfg, long ds) {
  if (!cfg.initial_system)
    return Matrix::Identity(ds, ds) / static_cast<double>(ds);
  if (cfg.initial_system->rows() != ds)
    throw ConfigParseError("initial_system: dimension does not match the split");
  return *cfg.initial_system;
}

void require_split_env(const RunConfig& cfg, const char* cmd) {
  if (!cfg.split || !cfg.env)
    throw ConfigParseError(std::string(cmd) + ": needs split and env");
}

int cmd_evolve(const Options& opt) {
  const RunConfig cfg = load_run_config(opt);
  const Matrix rho0 = full_initial(cfg);
  validate_density_matrix(rho0);
  nlohmann::json out;
  out["version"] = kVersion;
  out["config"] = config_hash(cfg.raw);
  out["basis"] = "product basis, lexicographic, subsystem 1 slowest";
  out["times"] = cfg.grid.times();
  nlohmann::json states = nlohmann::json::array();
  for (const double t : cfg.grid.times())
    states.push_back(matrix_to_json(evolve(cfg.model, rho0, t)));
  out["states"] = std::move(states);
  write_json_file(out_path(cfg, opt, "evolve.json"), out);
  return 0;
}

int cmd_system(const Options& opt) {
  const RunConfig cfg = load_run_config(opt);
  require_split_env(cfg, "system");
  const long ds = dims_product(system_dims(cfg.model, *cfg.split));
  const Matrix rho0_s = system_initial(cfg, ds);
  const auto sdims = system_dims(cfg.model, *cfg.split);
  std::vector<std::vector<std::string>> rows;
  for (const double t : cfg.grid.times()) {
    const Matrix rho_t = system_state(cfg.model, *cfg.split, rho0_s, *cfg.env, t);
    for (long r = 0; r < ds; ++r)
      for (long c = 0; c < ds; ++c) {
        const Complex f = coherence_factor(cfg.model, *cfg.split, *cfg.env,
                                           unflatten_index(r, sdims),
                                           unflatten_index(c, sdims), t);
        rows.push_back({fmt_g17(t), std::to_string(r), std::to_string(c),
                        fmt_g17(f.real()), fmt_g17(f.imag()),
                        fmt_g17(rho_t(r, c).real()), fmt_g17(rho_t(r, c).imag())});
      }
  }
  write_csv(out_path(cfg, opt, "system.csv"), provenance(cfg.raw),
            {"t", "row", "col", "f_re", "f_im", "rho_re", "rho_im"}, rows);
  return 0;
}

int cmd_rates(const Options& opt) {
  const RunConfig cfg = load_run_config(opt);
  require_split_env(cfg, "rates");
  std::vector<std::vector<std::string>> rows;
  for (const double t : cfg.grid.times()) {
    const RatePoint p = qubit_rates_from_model(cfg.model, *cfg.split, *cfg.env, t);
    rows.push_back({fmt_g17(t), fmt_g17(p.omega), fmt_g17(p.gamma_rate),
                    p.diverged ? "1" : "0"});
  }
  write_csv(out_path(cfg, opt, "rates.csv"), provenance(cfg.raw),
            {"t", "omega", "gamma_rate", "diverged"}, rows);
  return 0;
}

nlohmann::json table_to_json(const OutcomeTable& table) {
  nlohmann::json j;
  j["t"] = table.t;
  j["tau"] = table.tau;
  j["z_values"] = table.z_values;
  j["y_values"] = table.y_values;
  j["x_values"] = table.x_values;
  j["p"] = table.p;
  j["dropped_branches"] = table.dropped_branches;
  return j;
}

int cmd_cpf(const Options& opt) {
  const RunConfig cfg = load_run_config(opt);
  require_split_env(cfg, "cpf");
  if (!cfg.scheme) throw ConfigParseError("cpf: needs a scheme");
  const long ds = dims_product(system_dims(cfg.model, *cfg.split));
  const Matrix rho0_s = system_initial(cfg, ds);

  std::vector<std::pair<double, double>> points;
  if (cfg.tau_grid) {
    for (const double t : cfg.grid.times())
      for (const double tau : cfg.tau_grid->times()) points.emplace_back(t, tau);
  } else {
    for (const double t : cfg.grid.times()) points.emplace_back(t, t);
  }

  std::vector<std::vector<std::string>> rows;
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& [t, tau] : points) {
    const OutcomeTable table =
        joint_probability(cfg.model, *cfg.split, *cfg.env, rho0_s, *cfg.scheme, t, tau);
    for (size_t y = 0; y < table.y_values.size(); ++y)
      rows.push_back({fmt_g17(t), fmt_g17(tau), fmt_g17(table.y_values[y]),
                      fmt_g17(cpf_correlation(table, static_cast<int>(y)))});
    if (points.size() <= 2048) tables.push_back(table_to_json(table));
  }
  write_csv(out_path(cfg, opt, "cpf.csv"), provenance(cfg.raw),
            {"t", "tau", "y", "cpf"}, rows);
  if (points.size() <= 2048) {
    nlohmann::json out;
    out["version"] = kVersion;
    out["config"] = config_hash(cfg.raw);
    out["tables"] = std::move(tables);
    write_json_file(out_path(cfg, opt, "cpf_tables.json"), out);
  }
  return 0;
}

std::vector<std::vector<std::string>> scan_rows(const std::vector<RegionScanRow>& scan) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : scan)
    rows.push_back({std::to_string(row.n),
                    row.chi_star_over_gamma ? fmt_g17(*row.chi_star_over_gamma) : "nan",
                    fmt_g17(row.lower_bound), fmt_g17(row.upper_bound)});
  return rows;
}

int cmd_entangle_scan(const Options& opt) {
  if (opt.config.empty()) throw ConfigParseError("missing --config");
  const nlohmann::json j = load_json_file(opt.config);
  if (!j.contains("ns") || !j["ns"].is_array())
    throw ConfigParseError("ns: expected an array of ring sizes");
  const std::vector<int> ns = j["ns"].get<std::vector<int>>();
  const double gamma = j.value("gamma", 1.0);
  const double tol = j.value("tol", 1e-4);
  const auto scan = entanglement_region_scan(ns, gamma, tol);
  const std::string dir = opt.out.empty() ? j.value("out_dir", ".") : opt.out;
  write_csv(std::filesystem::path(dir) / "entangle_scan.csv", provenance(j),
            {"n", "chi_star_over_gamma", "lower_bound", "upper_bound"}, scan_rows(scan));
  return 0;
}

ModelSpec two_qubit_dephasing(double gamma, double beta, double chi_imag) {
  ModelSpec m;
  m.subsystems = {{1.0, -1.0}, {1.0, -1.0}};
  m.h = RealMatrix::Zero(2, 2);
  m.gamma = Matrix::Zero(2, 2);
  m.gamma(0, 0) = gamma;
  m.gamma(1, 1) = beta;
  m.gamma(0, 1) = Complex(0.0, chi_imag);
  m.gamma(1, 0) = Complex(0.0, -chi_imag);
  return validate_model(m);
}

std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

double as_fig_num(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigParseError(std::string(key) + ": expected a number");
  return j[key].get<double>();
}

std::string preset_path(const Options& opt, const char* name) {
  if (!opt.config.empty()) return opt.config;
  return std::string(DEPHASIM_PRESET_DIR) + "/" + name;
}

int cmd_fig1(const Options& opt) {
  const nlohmann::json j = load_json_file(preset_path(opt, "fig1.json"));
  const double gamma = as_fig_num(j, "gamma"), beta = as_fig_num(j, "beta");
  const double q_plus = as_fig_num(j, "q_plus"), q_minus = as_fig_num(j, "q_minus");
  const double phi = as_fig_num(j, "phi");
  const TimeGrid grid = grid_from_json(j.at("grid"), "grid");
  const TimeGrid cpf_grid = grid_from_json(j.at("cpf_grid"), "cpf_grid");
  const std::string dir = opt.out.empty() ? j.value("out_dir", ".") : opt.out;

  const SplitSpec sp{{0}, {1}};
  EnvPopulations env;
  env.product = {{{q_plus, q_minus}}};
  const MeasurementScheme sch = xnx_scheme(phi);
  const Matrix half = 0.5 * Matrix::Identity(2, 2);

  for (const double ratio : j.at("chi_over_gamma").get<std::vector<double>>()) {
    const ModelSpec m = two_qubit_dephasing(gamma, beta, ratio * gamma);
    std::vector<std::vector<std::string>> rate_rows;
    for (const double t : grid.times()) {
      const RatePoint p = qubit_rates_from_model(m, sp, env, t);
      rate_rows.push_back({fmt_g17(t), fmt_g17(p.omega), fmt_g17(p.gamma_rate),
                           p.diverged ? "1" : "0"});
    }
    write_csv(std::filesystem::path(dir) /
                  ("fig1_rates_chi" + short_num(ratio) + ".csv"),
              provenance(j), {"t", "omega", "gamma_rate", "diverged"}, rate_rows);

    std::vector<std::vector<std::string>> cpf_rows;
    for (const double t : cpf_grid.times()) {
      const OutcomeTable table = joint_probability(m, sp, env, half, sch, t, t);
      for (size_t y = 0; y < table.y_values.size(); ++y)
        cpf_rows.push_back({fmt_g17(t), fmt_g17(t), fmt_g17(table.y_values[y]),
                            fmt_g17(cpf_correlation(table, static_cast<int>(y)))});
    }
    write_csv(std::filesystem::path(dir) / ("fig1_cpf_chi" + short_num(ratio) + ".csv"),
              provenance(j), {"t", "tau", "y", "cpf"}, cpf_rows);
  }
  return 0;
}

int cmd_fig2(const Options& opt) {
  const nlohmann::json j = load_json_file(preset_path(opt, "fig2.json"));
  const std::vector<int> ns = j.at("ns").get<std::vector<int>>();
  const auto scan = entanglement_region_scan(ns, j.value("gamma", 1.0),
                                             j.value("tol", 1e-4));
  const std::string dir = opt.out.empty() ? j.value("out_dir", ".") : opt.out;
  write_csv(std::filesystem::path(dir) / "fig2_entanglement_region.csv", provenance(j),
            {"n", "chi_star_over_gamma", "lower_bound", "upper_bound"},
            scan_rows(scan));
  return 0;
}

int cmd_fig3(const Options& opt) {
  const nlohmann::json j = load_json_file(preset_path(opt, "fig3.json"));
  const double gamma = as_fig_num(j, "gamma");
  const double phi = as_fig_num(j, "phi");
  const TimeGrid grid = grid_from_json(j.at("grid"), "grid");
  const TimeGrid cpf_grid = grid_from_json(j.at("cpf_grid"), "cpf_grid");
  const std::string dir = opt.out.empty() ? j.value("out_dir", ".") : opt.out;

  std::vector<std::pair<int, double>> combos;
  const nlohmann::json& fn = j.at("fixed_n");
  for (const double ratio : fn.at("chi_over_gamma").get<std::vector<double>>())
    combos.emplace_back(fn.at("n").get<int>(), ratio);
  const nlohmann::json& fc = j.at("fixed_chi");
  for (const int n : fc.at("ns").get<std::vector<int>>()) {
    const double ratio = fc.at("chi_over_gamma").get<double>();
    if (std::find(combos.begin(), combos.end(), std::make_pair(n, ratio)) ==
        combos.end())
      combos.emplace_back(n, ratio);
  }

  const MeasurementScheme sch = xnx_scheme(phi);
  const Matrix half = 0.5 * Matrix::Identity(2, 2);
  for (const auto& [n, ratio] : combos) {
    const ModelSpec m = ring_model({n, gamma, ratio * gamma, n / 4.0});
    SplitSpec sp;
    sp.system = {0};
    for (int i = 1; i < n; ++i) sp.bath.push_back(i);
    EnvPopulations env;
    env.product.emplace(n - 1, std::vector<double>{0.5, 0.5});
    const std::string tag = "_n" + std::to_string(n) + "_chi" + short_num(ratio);

    std::vector<std::vector<std::string>> f_rows;
    for (const double t : grid.times()) {
      const Complex f = coherence_factor(m, sp, env, {0}, {1}, t);
      f_rows.push_back({fmt_g17(t), fmt_g17(f.real()), fmt_g17(f.imag())});
    }
    write_csv(std::filesystem::path(dir) / ("fig3_f" + tag + ".csv"), provenance(j),
              {"t", "f_re", "f_im"}, f_rows);

    std::vector<std::vector<std::string>> cpf_rows;
    for (const double t : cpf_grid.times()) {
      const OutcomeTable table = joint_probability(m, sp, env, half, sch, t, t);
      for (size_t y = 0; y < table.y_values.size(); ++y)
        cpf_rows.push_back({fmt_g17(t), fmt_g17(t), fmt_g17(table.y_values[y]),
                            fmt_g17(cpf_correlation(table, static_cast<int>(y)))});
    }
    write_csv(std::filesystem::path(dir) / ("fig3_cpf" + tag + ".csv"), provenance(j),
              {"t", "tau", "y", "cpf"}, cpf_rows);
  }
  return 0;
}

int cmd_verify(const Options& opt) {
  const auto results = run_verification(opt.tolerance);
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    all_pass = all_pass && r.pass;
  }
  std::cout << (all_pass ? "verification OK" : "verification FAILED") << "\n";
  return all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact multipartite dephasing dynamics, memory witnesses, "
               "entanglement scans"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config, "JSON config path")->capture_default_str();
  app.add_option("--out", opt.out, "output directory (overrides config out_dir)");
  app.add_option("--threads", opt.threads, "reserved; pipelines run serially")
      ->check(CLI::PositiveNumber);

  auto* evolve_cmd = app.add_subcommand("evolve", "full-space state snapshots");
  auto* system_cmd = app.add_subcommand("system", "coherence factors and reduced state");
  auto* rates_cmd = app.add_subcommand("rates", "time-local frequency and decay rate");
  auto* cpf_cmd = app.add_subcommand("cpf", "conditional past-future correlations");
  auto* scan_cmd = app.add_subcommand("entangle-scan", "transposed-generator scan");
  auto* fig1_cmd = app.add_subcommand("fig1", "two-qubit rate and correlation curves");
  auto* fig2_cmd = app.add_subcommand("fig2", "entanglement region table");
  auto* fig3_cmd = app.add_subcommand("fig3", "coherence decay and correlation curves");
  auto* verify_cmd = app.add_subcommand("verify", "full equivalence suite");
  verify_cmd->add_option("--tolerance", opt.tolerance,
                         "threshold multiplier for every criterion")
      ->check(CLI::PositiveNumber);
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (evolve_cmd->parsed()) return cmd_evolve(opt);
    if (system_cmd->parsed()) return cmd_system(opt);
    if (rates_cmd->parsed()) return cmd_rates(opt);
    if (cpf_cmd->parsed()) return cmd_cpf(opt);
    if (scan_cmd->parsed()) return cmd_entangle_scan(opt);
    if (fig1_cmd->parsed()) return cmd_fig1(opt);
    if (fig2_cmd->parsed()) return cmd_fig2(opt);
    if (fig3_cmd->parsed()) return cmd_fig3(opt);
    if (verify_cmd->parsed()) return cmd_verify(opt);
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
