#pragma once

// Seeded experiment harness: separation sweeps, conditioning sweeps, the
// noisy decomposition demo, the least-squares comparison and the
// non-separated instability demo. Every run is a pure function of
// (config, seed) and writes results.csv / metrics.json / plot.svg into the
// configured output directory.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "pulse/csv.hpp"
#include "pulse/kernels.hpp"
#include "pulse/l1_solver.hpp"
#include "pulse/signal_model.hpp"
#include "pulse/stability.hpp"
#include "pulse/svg.hpp"

namespace pulse {

struct Range {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::vector<double> values() const {
    if (step <= 0) throw std::invalid_argument("range step must be positive");
    std::vector<double> out;
    for (int i = 0;; ++i) {
      const double v = start + i * step;
      if (v > stop + 1e-9) break;
      out.push_back(v);
    }
    return out;
  }
};

struct ExperimentConfig {
  std::string experiment;
  std::string kernel = "gaussian";
  double sigma = 0.1;
  int n_grid = 100;  // sampling density N, step 1/N
  double interval_a = -1.0;
  double interval_b = 1.0;
  Range nu_range{0.8, 1.5, 0.1};
  Range dt_range{0.01, 0.2, 0.01};
  Range t_eps_range{0.0, 0.1, 0.005};
  int trials_per_point = 10;
  int spikes_per_trial = 5;
  double amplitude_std = 1.0;
  double delta = 0.0;
  double nu = 1.2;  // fixed separation for single-instance experiments
  double support_step = 0.01;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
};

namespace detail {

inline std::uint64_t trial_seed(std::uint64_t seed, int point, int trial, int stream) {
  return seed + 1000003ULL * static_cast<std::uint64_t>(point) +
         101ULL * static_cast<std::uint64_t>(trial) + 50000017ULL * stream;
}

inline void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

inline long grid_index(const SampleGrid& grid, double t) {
  return std::llround(t * grid.n) - grid.k_min();
}

// Indicator amplitude vector of grid-aligned spikes.
inline Eigen::VectorXd spikes_to_grid(const SpikeTrain& s, const SampleGrid& grid) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(grid.size());
  for (std::size_t m = 0; m < s.size(); ++m) {
    const long i = grid_index(grid, s.positions[m]);
    if (i < 0 || i >= grid.size()) throw std::invalid_argument("spike off the sample grid");
    x[i] += s.amplitudes[m];
  }
  return x;
}

inline void write_json(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& fields) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "{\n";
  for (std::size_t i = 0; i < fields.size(); ++i)
    out << "  \"" << fields[i].first << "\": " << fields[i].second
        << (i + 1 < fields.size() ? ",\n" : "\n");
  out << "}\n";
}

inline std::string json_num(double v) {
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  if (std::isnan(v)) return "\"nan\"";
  return format_number(v);
}

}  // namespace detail

struct SweepRow {
  double nu = 0.0;
  double success_rate = 0.0;
  double mean_l1_error = 0.0;
  int trials = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double transition_nu = std::numeric_limits<double>::quiet_NaN();
};

// Noise-free separation sweep: at each nu, generate random separated
// supports with min gap nu*sigma, solve the delta = 0 program, and score
// exact support detection.
inline SweepResult run_sweep_nu(const ExperimentConfig& cfg) {
  detail::ensure_dir(cfg.output_dir);
  const Kernel kernel = kernel_by_name(cfg.kernel);
  const SampleGrid grid = make_grid(cfg.n_grid, cfg.interval_a, cfg.interval_b);
  const Eigen::MatrixXd k = convolution_matrix(kernel, cfg.sigma, grid);
  SweepResult result;
  const std::vector<double> nus = cfg.nu_range.values();
  for (int pi = 0; pi < static_cast<int>(nus.size()); ++pi) {
    const double nu = nus[pi];
    int successes = 0;
    double err_sum = 0.0;
    for (int trial = 0; trial < cfg.trials_per_point; ++trial) {
      const auto pos = random_separated_support(cfg.spikes_per_trial, cfg.interval_a,
                                                cfg.interval_b, cfg.support_step, nu * cfg.sigma,
                                                detail::trial_seed(cfg.seed, pi, trial, 0));
      const auto amp = random_amplitudes(static_cast<int>(pos.size()), cfg.amplitude_std,
                                         detail::trial_seed(cfg.seed, pi, trial, 1));
      const SpikeTrain spikes = make_spike_train(pos, amp);
      const Eigen::VectorXd x_true = detail::spikes_to_grid(spikes, grid);
      const L1Solution sol = solve_l1(L1Problem{k, k * x_true, 0.0});
      const RecoveryMetrics m =
          recovery_metrics(sol.x_hat, x_true, grid, default_threshold(sol.x_hat));
      successes += (sol.status == SolveStatus::optimal && m.exact_support);
      err_sum += m.l1_error;
    }
    result.rows.push_back(SweepRow{nu, static_cast<double>(successes) / cfg.trials_per_point,
                                   err_sum / cfg.trials_per_point, cfg.trials_per_point});
  }
  // Transition: smallest swept nu with rate 1 such that every larger nu is 1.
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    bool all_one = true;
    for (std::size_t j = i; j < result.rows.size(); ++j)
      if (result.rows[j].success_rate < 1.0) all_one = false;
    if (all_one) {
      result.transition_nu = result.rows[i].nu;
      break;
    }
  }

  CsvTable table{{"nu", "success_rate", "mean_l1_error", "trials"}, {}};
  SvgSeries series;
  for (const auto& r : result.rows) {
    table.rows.push_back({r.nu, r.success_rate, r.mean_l1_error, double(r.trials)});
    series.x.push_back(r.nu);
    series.y.push_back(r.success_rate);
  }
  write_csv(cfg.output_dir + "/results.csv", table);
  SvgPlot plot("support detection rate vs separation (" + cfg.kernel + ")", "nu", "success rate");
  series.color = "steelblue";
  plot.add(series);
  plot.write(cfg.output_dir + "/plot.svg");
  detail::write_json(cfg.output_dir + "/metrics.json",
                     {{"experiment", "\"sweep_nu\""},
                      {"kernel", "\"" + cfg.kernel + "\""},
                      {"sigma", detail::json_num(cfg.sigma)},
                      {"transition_nu", detail::json_num(result.transition_nu)}});
  return result;
}

struct CondRow {
  double dt = 0.0;
  double cond = 0.0;
};

// Conditioning sweep of the convolution matrix over the discretization step.
inline std::vector<CondRow> run_cond_number(const ExperimentConfig& cfg) {
  detail::ensure_dir(cfg.output_dir);
  const Kernel kernel = kernel_by_name(cfg.kernel);
  std::vector<CondRow> rows;
  for (double dt : cfg.dt_range.values()) {
    const long n = std::lround((cfg.interval_b - cfg.interval_a) / dt) + 1;
    Eigen::MatrixXd m(n, n);
    for (long j = 0; j < n; ++j)
      for (long k = 0; k < n; ++k) m(j, k) = eval(kernel, (j - k) * dt / cfg.sigma, 0);
    rows.push_back(CondRow{dt, condition_number(m)});
  }
  CsvTable table{{"dt", "cond"}, {}};
  SvgSeries series;
  for (const auto& r : rows) {
    table.rows.push_back({r.dt, r.cond});
    series.x.push_back(r.dt);
    series.y.push_back(r.cond);
  }
  write_csv(cfg.output_dir + "/results.csv", table);
  SvgPlot plot("condition number of the convolution matrix (" + cfg.kernel + ")", "dt", "cond",
               /*log_y=*/true);
  series.color = "firebrick";
  plot.add(series);
  plot.write(cfg.output_dir + "/plot.svg");
  return rows;
}

struct DemoResult {
  SampledSignal noisy;
  Eigen::VectorXd x_true;
  Eigen::VectorXd x_hat;
  RecoveryMetrics metrics;
  double achieved_delta = 0.0;
  double achieved_snr_db = 0.0;
  BoundReport bound;
};

// Noisy atomic decomposition demo at a fixed separation constant.
inline DemoResult run_noisy_demo(const ExperimentConfig& cfg) {
  detail::ensure_dir(cfg.output_dir);
  const Kernel kernel = kernel_by_name(cfg.kernel);
  const SampleGrid grid = make_grid(cfg.n_grid, cfg.interval_a, cfg.interval_b);
  const Eigen::MatrixXd k = convolution_matrix(kernel, cfg.sigma, grid);
  const auto pos =
      random_separated_support(cfg.spikes_per_trial, cfg.interval_a, cfg.interval_b,
                               cfg.support_step, cfg.nu * cfg.sigma, cfg.seed);
  const auto amp =
      random_amplitudes(static_cast<int>(pos.size()), cfg.amplitude_std, cfg.seed + 1);
  const SpikeTrain spikes = make_spike_train(pos, amp);
  DemoResult out;
  out.x_true = detail::spikes_to_grid(spikes, grid);
  SampledSignal clean{grid, k * out.x_true};
  const NoiseResult noise =
      add_noise(clean, NoiseSpec{NoiseMode::l1_budget, cfg.delta, cfg.seed + 2});
  out.noisy = noise.noisy;
  out.achieved_delta = noise.achieved_delta;
  out.achieved_snr_db = noise.achieved_snr_db;
  const L1Solution sol = solve_l1(L1Problem{k, out.noisy.values, cfg.delta});
  out.x_hat = sol.x_hat;
  out.metrics = recovery_metrics(out.x_hat, out.x_true, grid, default_threshold(out.x_hat));
  out.bound = theorem2_bound(default_admissibility(kernel), cfg.nu, cfg.n_grid, cfg.sigma,
                             cfg.delta);

  CsvTable table{{"k", "t", "y_noisy", "x_true", "x_hat"}, {}};
  SvgSeries line, truth, rec;
  for (long i = 0; i < grid.size(); ++i) {
    const double t = grid.time(i);
    table.rows.push_back(
        {double(grid.k_min() + i), t, out.noisy.values[i], out.x_true[i], out.x_hat[i]});
    line.x.push_back(t);
    line.y.push_back(out.noisy.values[i]);
    if (out.x_true[i] != 0.0) {
      truth.x.push_back(t);
      truth.y.push_back(out.x_true[i]);
    }
    if (std::abs(out.x_hat[i]) > default_threshold(out.x_hat)) {
      rec.x.push_back(t);
      rec.y.push_back(out.x_hat[i]);
    }
  }
  write_csv(cfg.output_dir + "/results.csv", table);
  SvgPlot plot("noisy decomposition (" + cfg.kernel + ")", "t", "amplitude");
  line.color = "black";
  truth.color = "blue";
  truth.markers_only = true;
  rec.color = "red";
  rec.markers_only = true;
  plot.add(line);
  plot.add(truth);
  plot.add(rec);
  plot.write(cfg.output_dir + "/plot.svg");
  std::vector<std::pair<std::string, std::string>> fields = {
      {"experiment", "\"noisy_demo\""},
      {"kernel", "\"" + cfg.kernel + "\""},
      {"delta", detail::json_num(cfg.delta)},
      {"achieved_delta", detail::json_num(out.achieved_delta)},
      {"achieved_snr_db", detail::json_num(out.achieved_snr_db)},
      {"l1_error", detail::json_num(out.metrics.l1_error)},
      {"exact_support", out.metrics.exact_support ? "true" : "false"},
      {"support_precision", detail::json_num(out.metrics.support_precision)},
      {"support_recall", detail::json_num(out.metrics.support_recall)},
      {"bound_valid", out.bound.valid ? "true" : "false"},
      {"bound", detail::json_num(out.bound.bound)},
      {"simplified_bound", detail::json_num(out.bound.simplified_bound)}};
  detail::write_json(cfg.output_dir + "/metrics.json", fields);
  return out;
}

struct LsVsL1Result {
  double l1_error_l1 = 0.0;
  double l1_error_ls = 0.0;
  bool l1_exact_support = false;
  double cond = 0.0;
};

// Noise-free comparison of the l1 program against the direct linear solve.
inline LsVsL1Result run_ls_vs_l1(const ExperimentConfig& cfg) {
  detail::ensure_dir(cfg.output_dir);
  const Kernel kernel = kernel_by_name(cfg.kernel);
  const SampleGrid grid = make_grid(cfg.n_grid, cfg.interval_a, cfg.interval_b);
  const Eigen::MatrixXd k = convolution_matrix(kernel, cfg.sigma, grid);
  const auto pos =
      random_separated_support(cfg.spikes_per_trial, cfg.interval_a, cfg.interval_b,
                               cfg.support_step, cfg.nu * cfg.sigma, cfg.seed);
  const auto amp =
      random_amplitudes(static_cast<int>(pos.size()), cfg.amplitude_std, cfg.seed + 1);
  const SpikeTrain spikes = make_spike_train(pos, amp);
  const Eigen::VectorXd x_true = detail::spikes_to_grid(spikes, grid);
  const Eigen::VectorXd y = k * x_true;

  const L1Solution sol = solve_l1(L1Problem{k, y, 0.0});
  const LeastSquaresSolution ls = solve_least_squares(k, y);
  const RecoveryMetrics m_l1 =
      recovery_metrics(sol.x_hat, x_true, grid, default_threshold(sol.x_hat));
  LsVsL1Result out;
  out.l1_error_l1 = m_l1.l1_error;
  out.l1_exact_support = m_l1.exact_support;
  out.l1_error_ls = (ls.x - x_true).lpNorm<1>();
  out.cond = condition_number(k);

  CsvTable table{{"k", "t", "y", "x_true", "x_l1", "x_ls"}, {}};
  SvgSeries truth, l1s, lss;
  for (long i = 0; i < grid.size(); ++i) {
    const double t = grid.time(i);
    table.rows.push_back({double(grid.k_min() + i), t, y[i], x_true[i], sol.x_hat[i], ls.x[i]});
    if (x_true[i] != 0.0) {
      truth.x.push_back(t);
      truth.y.push_back(x_true[i]);
    }
    l1s.x.push_back(t);
    l1s.y.push_back(sol.x_hat[i]);
    lss.x.push_back(t);
    lss.y.push_back(ls.x[i]);
  }
  write_csv(cfg.output_dir + "/results.csv", table);
  SvgPlot plot("l1 vs least-squares recovery (" + cfg.kernel + ")", "t", "amplitude");
  lss.color = "orange";
  l1s.color = "red";
  truth.color = "blue";
  truth.markers_only = true;
  plot.add(lss);
  plot.add(l1s);
  plot.add(truth);
  plot.write(cfg.output_dir + "/plot.svg");
  detail::write_json(cfg.output_dir + "/metrics.json",
                     {{"experiment", "\"ls_vs_l1\""},
                      {"l1_error_l1", detail::json_num(out.l1_error_l1)},
                      {"l1_error_ls", detail::json_num(out.l1_error_ls)},
                      {"l1_exact_support", out.l1_exact_support ? "true" : "false"},
                      {"condition_number", detail::json_num(out.cond)}});
  return out;
}

struct InstabilityRow {
  double t_eps = 0.0;
  double max_abs_y = 0.0;
};

// Difference of two nearby pulses: ||y||_inf of g(t0 - t) - g(t0 + t_eps - t)
// collapses as t_eps -> 0, which is why separation is required under noise.
inline std::vector<InstabilityRow> run_instability_demo(const ExperimentConfig& cfg) {
  detail::ensure_dir(cfg.output_dir);
  const Kernel kernel = kernel_by_name(cfg.kernel);
  const double t0 = 0.0;
  std::vector<InstabilityRow> rows;
  for (double te : cfg.t_eps_range.values()) {
    double best = 0.0;
    const double lo = t0 - 5.0 * cfg.sigma, hi = t0 + te + 5.0 * cfg.sigma;
    for (double t = lo; t <= hi; t += 1e-4) {
      const double y = eval(kernel, (t0 - t) / cfg.sigma, 0) -
                       eval(kernel, (t0 + te - t) / cfg.sigma, 0);
      best = std::max(best, std::abs(y));
    }
    rows.push_back(InstabilityRow{te, best});
  }
  CsvTable table{{"t_eps", "max_abs_y"}, {}};
  SvgSeries series;
  for (const auto& r : rows) {
    table.rows.push_back({r.t_eps, r.max_abs_y});
    series.x.push_back(r.t_eps);
    series.y.push_back(r.max_abs_y);
  }
  write_csv(cfg.output_dir + "/results.csv", table);
  SvgPlot plot("peak amplitude of a pulse difference", "t_eps", "max |y|");
  series.color = "seagreen";
  plot.add(series);
  plot.write(cfg.output_dir + "/plot.svg");
  return rows;
}

}  // namespace pulse
