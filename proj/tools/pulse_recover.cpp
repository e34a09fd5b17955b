// pulse-recover: command-line harness for pulse-stream recovery experiments.
//
// Usage: pulse-recover <subcommand> --config <file.json> [--seed S] [--out DIR]
// Subcommands: sweep_nu, cond_number, noisy_demo, ls_vs_l1, instability_demo,
// certify, recover. Flags override config file fields. Exit codes: 0 on
// completion, 2 on config errors, 3 on solver failures.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pulse/certificate.hpp"
#include "pulse/experiments.hpp"
#include "pulse/l1_solver.hpp"
#include "pulse/stability.hpp"

using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  return j;
}

pulse::Range parse_range(const json& j, const char* name, pulse::Range fallback) {
  if (!j.contains(name)) return fallback;
  const json& r = j.at(name);
  if (!r.is_object() || !r.contains("start") || !r.contains("stop") || !r.contains("step"))
    throw ConfigError(std::string(name) + " must be {start, stop, step}");
  return pulse::Range{r.at("start").get<double>(), r.at("stop").get<double>(),
                      r.at("step").get<double>()};
}

pulse::ExperimentConfig parse_config(const json& j) {
  pulse::ExperimentConfig cfg;
  try {
    cfg.experiment = j.value("experiment", cfg.experiment);
    cfg.kernel = j.value("kernel", cfg.kernel);
    cfg.sigma = j.value("sigma", cfg.sigma);
    cfg.n_grid = j.value("n_grid", cfg.n_grid);
    if (j.contains("interval")) {
      const auto& iv = j.at("interval");
      if (!iv.is_array() || iv.size() != 2) throw ConfigError("interval must be [a, b]");
      cfg.interval_a = iv[0].get<double>();
      cfg.interval_b = iv[1].get<double>();
    }
    cfg.nu_range = parse_range(j, "nu_range", cfg.nu_range);
    cfg.dt_range = parse_range(j, "dt_range", cfg.dt_range);
    cfg.t_eps_range = parse_range(j, "t_eps_range", cfg.t_eps_range);
    cfg.trials_per_point = j.value("trials_per_point", cfg.trials_per_point);
    cfg.spikes_per_trial = j.value("spikes_per_trial", cfg.spikes_per_trial);
    cfg.amplitude_std = j.value("amplitude_std", cfg.amplitude_std);
    cfg.delta = j.value("delta", cfg.delta);
    cfg.nu = j.value("nu", cfg.nu);
    cfg.support_step = j.value("support_step", cfg.support_step);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  if (cfg.sigma <= 0) throw ConfigError("sigma must be positive");
  if (cfg.n_grid <= 0) throw ConfigError("n_grid must be positive");
  if (cfg.trials_per_point < 1) throw ConfigError("trials_per_point must be >= 1");
  if (cfg.nu_range.step <= 0 || cfg.dt_range.step <= 0 || cfg.t_eps_range.step <= 0)
    throw ConfigError("range steps must be positive");
  if (cfg.kernel != "gaussian" && cfg.kernel != "cauchy")
    throw ConfigError("kernel must be gaussian or cauchy");
  return cfg;
}

int run_certify(const json& j, const std::string& out_dir) {
  const std::string kernel_name = j.value("kernel", std::string("gaussian"));
  if (kernel_name != "gaussian" && kernel_name != "cauchy")
    throw ConfigError("kernel must be gaussian or cauchy");
  if (!j.contains("support")) throw ConfigError("certify needs a support array");
  std::vector<double> support, signs;
  try {
    support = j.at("support").get<std::vector<double>>();
    if (j.contains("signs")) signs = j.at("signs").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  if (signs.empty()) signs.assign(support.size(), 1.0);
  if (signs.size() != support.size()) throw ConfigError("signs/support length mismatch");
  for (double s : signs)
    if (s != 1.0 && s != -1.0) throw ConfigError("signs must be +-1");

  const pulse::Kernel kernel = pulse::kernel_by_name(kernel_name);
  pulse::detail::ensure_dir(out_dir);
  pulse::Certificate1D cert;
  try {
    cert = pulse::solve_certificate_1d(kernel, support, signs);
  } catch (const std::exception& e) {
    std::cerr << "certificate solve failed: " << e.what() << "\n";
    return 3;
  }
  const pulse::CertificateVerification v = pulse::verify_certificate(cert);
  pulse::detail::write_json(
      out_dir + "/metrics.json",
      {{"experiment", "\"certify\""},
       {"kernel", "\"" + kernel_name + "\""},
       {"max_interp_residual", pulse::detail::json_num(v.max_interp_residual)},
       {"max_gradient_residual", pulse::detail::json_num(v.max_gradient_residual)},
       {"max_abs_q_off_support", pulse::detail::json_num(v.max_abs_q_off_support)},
       {"near_region_margin", pulse::detail::json_num(v.near_region_margin)},
       {"valid", v.valid ? "true" : "false"}});
  // Certificate trace (t, q(t)) for plotting.
  pulse::CsvTable table{{"t", "q"}, {}};
  const double lo = *std::min_element(support.begin(), support.end()) - 2.0;
  const double hi = *std::max_element(support.begin(), support.end()) + 2.0;
  pulse::SvgSeries series;
  for (double t = lo; t <= hi; t += 1e-2) {
    const double q = pulse::eval_q(cert, t, 0);
    table.rows.push_back({t, q});
    series.x.push_back(t);
    series.y.push_back(q);
  }
  pulse::write_csv(out_dir + "/results.csv", table);
  pulse::SvgPlot plot("dual certificate q(t)", "t", "q");
  series.color = "purple";
  plot.add(series);
  plot.write(out_dir + "/plot.svg");
  std::cout << (v.valid ? "certificate valid" : "certificate INVALID") << "\n";
  return 0;
}

int run_recover(const json& j, const pulse::ExperimentConfig& cfg, bool with_bound) {
  if (!j.contains("signal")) throw ConfigError("recover needs a signal csv path");
  const std::string signal_path = j.at("signal").get<std::string>();
  const pulse::CsvTable in = pulse::read_csv(signal_path);
  const pulse::SampleGrid grid = pulse::make_grid(cfg.n_grid, cfg.interval_a, cfg.interval_b);
  if (static_cast<long>(in.rows.size()) != grid.size())
    throw ConfigError("signal csv length does not match the configured grid");
  Eigen::VectorXd y(grid.size());
  const std::size_t ycol = in.header.size() >= 3 ? 2 : in.header.size() - 1;
  for (long i = 0; i < grid.size(); ++i) y[i] = in.rows[i].at(ycol);

  const pulse::Kernel kernel = pulse::kernel_by_name(cfg.kernel);
  const Eigen::MatrixXd k = pulse::convolution_matrix(kernel, cfg.sigma, grid);
  const pulse::L1Solution sol = pulse::solve_l1(pulse::L1Problem{k, y, cfg.delta});
  if (sol.status != pulse::SolveStatus::optimal) {
    std::cerr << "l1 solve did not reach optimality\n";
    return 3;
  }
  pulse::detail::ensure_dir(cfg.output_dir);
  pulse::CsvTable table{{"k", "t", "x_hat"}, {}};
  for (long i = 0; i < grid.size(); ++i)
    table.rows.push_back({double(grid.k_min() + i), grid.time(i), sol.x_hat[i]});
  pulse::write_csv(cfg.output_dir + "/results.csv", table);

  const double threshold = j.value("threshold", pulse::default_threshold(sol.x_hat));
  const pulse::SpikeTrain spikes = pulse::extract_support(sol.x_hat, grid, threshold);
  std::vector<std::pair<std::string, std::string>> fields = {
      {"experiment", "\"recover\""},
      {"kernel", "\"" + cfg.kernel + "\""},
      {"delta", pulse::detail::json_num(cfg.delta)},
      {"objective", pulse::detail::json_num(sol.objective)},
      {"residual_l1", pulse::detail::json_num(sol.residual_l1)},
      {"spikes_detected", std::to_string(spikes.size())},
      {"threshold", pulse::detail::json_num(threshold)}};
  if (with_bound) {
    const pulse::BoundReport b = pulse::theorem2_bound(
        pulse::default_admissibility(kernel), cfg.nu, cfg.n_grid, cfg.sigma, cfg.delta);
    fields.push_back({"bound_valid", b.valid ? "true" : "false"});
    fields.push_back({"bound", pulse::detail::json_num(b.bound)});
    fields.push_back({"simplified_bound", pulse::detail::json_num(b.simplified_bound)});
  }
  pulse::detail::write_json(cfg.output_dir + "/metrics.json", fields);

  pulse::SvgSeries line, rec;
  for (long i = 0; i < grid.size(); ++i) {
    line.x.push_back(grid.time(i));
    line.y.push_back(y[i]);
  }
  for (std::size_t m = 0; m < spikes.size(); ++m) {
    rec.x.push_back(spikes.positions[m]);
    rec.y.push_back(spikes.amplitudes[m]);
  }
  pulse::SvgPlot plot("recovered spikes", "t", "amplitude");
  line.color = "black";
  rec.color = "red";
  rec.markers_only = true;
  plot.add(line);
  plot.add(rec);
  plot.write(cfg.output_dir + "/plot.svg");
  std::cout << "recovered " << spikes.size() << " spikes\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulse stream recovery experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> delta, sigma, nu;
  bool with_bound = false;
  app.add_option("--config", config_path, "JSON config file")->capture_default_str();
  app.add_option("--seed", seed, "RNG seed (overrides config)");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--delta", delta, "noise budget (overrides config)");
  app.add_option("--sigma", sigma, "kernel scale (overrides config)");
  app.add_option("--nu", nu, "separation constant (overrides config)");
  app.add_flag("--bound", with_bound, "include the stability bound audit (recover)");

  const char* names[] = {"sweep_nu", "cond_number", "noisy_demo", "ls_vs_l1",
                         "instability_demo", "certify", "recover"};
  for (const char* n : names) app.add_subcommand(n)->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    const json j = load_config(config_path);
    pulse::ExperimentConfig cfg = parse_config(j);
    cfg.experiment = cmd;
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (delta) cfg.delta = *delta;
    if (sigma) cfg.sigma = *sigma;
    if (nu) cfg.nu = *nu;
    if (cfg.sigma <= 0) throw ConfigError("sigma must be positive");
    if (cfg.delta < 0) throw ConfigError("delta must be nonnegative");

    if (cmd == "certify") return run_certify(j, out_dir.empty() ? cfg.output_dir : out_dir);
    if (cmd == "recover") return run_recover(j, cfg, with_bound);
    if (cmd == "sweep_nu") {
      const pulse::SweepResult r = pulse::run_sweep_nu(cfg);
      std::cout << "transition nu: " << pulse::format_number(r.transition_nu) << "\n";
    } else if (cmd == "cond_number") {
      pulse::run_cond_number(cfg);
    } else if (cmd == "noisy_demo") {
      const pulse::DemoResult r = pulse::run_noisy_demo(cfg);
      std::cout << "l1 error: " << pulse::format_number(r.metrics.l1_error) << "\n";
    } else if (cmd == "ls_vs_l1") {
      const pulse::LsVsL1Result r = pulse::run_ls_vs_l1(cfg);
      std::cout << "l1: " << pulse::format_number(r.l1_error_l1)
                << "  ls: " << pulse::format_number(r.l1_error_ls) << "\n";
    } else if (cmd == "instability_demo") {
      pulse::run_instability_demo(cfg);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
}
