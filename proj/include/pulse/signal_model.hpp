#pragma once

// Spike trains, uniform sampling of their convolution with a scaled kernel,
// the explicit convolution matrix, calibrated noise injection, and random
// separated support generation.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pulse/kernels.hpp"
#include "pulse/rng.hpp"

namespace pulse {

struct SpikeTrain {
  std::vector<double> positions;   // strictly increasing
  std::vector<double> amplitudes;  // signed, nonzero, same length

  std::size_t size() const { return positions.size(); }
};

inline SpikeTrain make_spike_train(std::vector<double> positions, std::vector<double> amplitudes) {
  if (positions.size() != amplitudes.size())
    throw std::invalid_argument("spike train: positions/amplitudes length mismatch");
  std::vector<std::size_t> order(positions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });
  SpikeTrain s;
  for (std::size_t i : order) {
    if (amplitudes[i] == 0.0) continue;  // zero-mass spikes are not stored
    if (!s.positions.empty() && positions[i] == s.positions.back())
      throw std::invalid_argument("spike train: duplicate positions");
    s.positions.push_back(positions[i]);
    s.amplitudes.push_back(amplitudes[i]);
  }
  return s;
}

// Uniform grid of points k/N, a <= k/N <= b, endpoints included.
struct SampleGrid {
  int n = 1;          // grid density N; step is exactly 1/N
  double a = 0.0;
  double b = 0.0;

  long k_min() const { return static_cast<long>(std::ceil(a * n - 1e-9)); }
  long k_max() const { return static_cast<long>(std::floor(b * n + 1e-9)); }
  long size() const { return k_max() - k_min() + 1; }
  double time(long index) const { return static_cast<double>(k_min() + index) / n; }
};

inline SampleGrid make_grid(int n, double a, double b) {
  if (n <= 0) throw std::invalid_argument("grid density must be positive");
  if (b <= a) throw std::invalid_argument("grid interval must have b > a");
  return SampleGrid{n, a, b};
}

struct SampledSignal {
  SampleGrid grid;
  Eigen::VectorXd values;
};

// y[k] = sum_m c_m K((k/N - t_m) / sigma); exact summation over all spikes.
inline SampledSignal sample_signal(const Kernel& kernel, double sigma, const SpikeTrain& spikes,
                                   const SampleGrid& grid) {
  if (sigma <= 0) throw std::invalid_argument("sigma must be positive");
  SampledSignal out{grid, Eigen::VectorXd::Zero(grid.size())};
  for (long i = 0; i < grid.size(); ++i) {
    const double t = grid.time(i);
    double acc = 0.0;
    for (std::size_t m = 0; m < spikes.size(); ++m)
      acc += spikes.amplitudes[m] * eval(kernel, (t - spikes.positions[m]) / sigma, 0);
    out.values[i] = acc;
  }
  return out;
}

// Square symmetric Toeplitz matrix with entry (j, k) = K((j - k) / (N sigma)).
inline Eigen::MatrixXd convolution_matrix(const Kernel& kernel, double sigma,
                                          const SampleGrid& grid) {
  if (sigma <= 0) throw std::invalid_argument("sigma must be positive");
  const long n = grid.size();
  Eigen::VectorXd first(n);
  for (long d = 0; d < n; ++d) first[d] = eval(kernel, static_cast<double>(d) / (grid.n * sigma), 0);
  Eigen::MatrixXd m(n, n);
  for (long j = 0; j < n; ++j)
    for (long k = 0; k < n; ++k) m(j, k) = first[std::abs(j - k)];
  return m;
}

// Ratio of extreme singular values; +inf sentinel when the smallest one
// underflows to zero.
inline double condition_number(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("condition_number: matrix must be square");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv[0] / smin;
}

enum class NoiseMode { l1_budget, snr_db };

struct NoiseSpec {
  NoiseMode mode = NoiseMode::l1_budget;
  double level = 0.0;  // delta in l1 units, or target SNR in dB
  std::uint64_t seed = 0;
};

struct NoiseResult {
  SampledSignal noisy;
  double achieved_delta = 0.0;   // ||e||_1
  double achieved_snr_db = 0.0;  // 10 log10(||y||_2^2 / ||e||_2^2)
};

// Draws an i.i.d. standard normal perturbation and rescales it to hit the
// requested l1 budget or SNR exactly.
inline NoiseResult add_noise(const SampledSignal& y, const NoiseSpec& spec) {
  NoiseResult out{y, 0.0, std::numeric_limits<double>::infinity()};
  if (spec.mode == NoiseMode::l1_budget && spec.level == 0.0) return out;
  if (spec.mode == NoiseMode::snr_db && y.values.norm() == 0.0)
    throw std::invalid_argument("add_noise: snr mode requires a nonzero signal");
  if (spec.level < 0.0) throw std::invalid_argument("add_noise: noise level must be nonnegative");
  Rng rng(spec.seed);
  Eigen::VectorXd e(y.values.size());
  for (long i = 0; i < e.size(); ++i) e[i] = rng.normal();
  double scale;
  if (spec.mode == NoiseMode::l1_budget) {
    scale = spec.level / e.lpNorm<1>();
  } else {
    // 10 log10(||y||^2 / ||e||^2) = target  =>  ||e|| = ||y|| 10^(-target/20)
    scale = y.values.norm() * std::pow(10.0, -spec.level / 20.0) / e.norm();
  }
  e *= scale;
  out.noisy.values = y.values + e;
  out.achieved_delta = e.lpNorm<1>();
  out.achieved_snr_db = 10.0 * std::log10(y.values.squaredNorm() / e.squaredNorm());
  return out;
}

// Sequentially draws positions uniformly on the step-grid of [a, b],
// accepting only those at distance >= min_gap from all accepted positions.
// Stops at count_target or after 10,000 consecutive rejections; may return
// fewer positions than requested.
inline std::vector<double> random_separated_support(int count_target, double a, double b,
                                                    double step, double min_gap,
                                                    std::uint64_t seed) {
  if (step <= 0) throw std::invalid_argument("step must be positive");
  if (min_gap < step) throw std::invalid_argument("min_gap must be at least step");
  Rng rng(seed);
  const std::uint64_t slots = static_cast<std::uint64_t>(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> placed;
  int rejections = 0;
  while (static_cast<int>(placed.size()) < count_target && rejections < 10000) {
    const double cand = a + static_cast<double>(rng.below(slots)) * step;
    bool ok = true;
    for (double p : placed)
      if (std::abs(p - cand) < min_gap - 1e-12) {
        ok = false;
        break;
      }
    if (ok) {
      placed.push_back(cand);
      rejections = 0;
    } else {
      ++rejections;
    }
  }
  std::sort(placed.begin(), placed.end());
  return placed;
}

// i.i.d. normal(0, std^2) amplitudes; exact zeros are resampled.
inline std::vector<double> random_amplitudes(int count, double std_dev, std::uint64_t seed) {
  if (std_dev <= 0) throw std::invalid_argument("std must be positive");
  Rng rng(seed);
  std::vector<double> out(count);
  for (double& v : out) {
    do {
      v = std_dev * rng.normal();
    } while (v == 0.0);
  }
  return out;
}

}  // namespace pulse
