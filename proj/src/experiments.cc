// src/experiments.cc

// Copyright 2026  Dereverb Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "dereverb/experiments.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "dereverb/metrics.h"
#include "dereverb/rng.h"

namespace dereverb {

namespace {

// Runs fn(0..n) over a small pool; each job owns its output slot, so the
// schedule cannot affect results.
void parallel_for(int n, int threads, const std::function<void(int)> &fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto &t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double peak(const std::vector<double> &v) {
  double p = 0.0;
  for (double x : v) p = std::max(p, std::abs(x));
  return p;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double> &v) {
  MeanStd r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(acc / static_cast<double>(v.size()));
  return r;
}

}  // namespace

double rir_envelope(double t_s, double t60_s) {
  return std::exp(-3.0 * std::numbers::ln10 * t_s / t60_s);
}

SyntheticRir synth_rir(double t60_s, double length_s, int sample_rate,
                       uint64_t seed) {
  if (t60_s <= 0.0) throw InvalidParameter("synth_rir: t60 must be > 0");
  if (length_s <= 0.0) throw InvalidParameter("synth_rir: length must be > 0");
  const size_t n =
      std::max<size_t>(1, static_cast<size_t>(std::lround(length_s *
                                                          sample_rate)));
  SyntheticRir rir;
  rir.sample_rate = sample_rate;
  rir.t60_s = t60_s;
  rir.taps.resize(n);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.7);
  rir.taps[0] = 1.5;  // direct path dominates the diffuse tail
  for (size_t i = 1; i < n; ++i)
    rir.taps[i] =
        gauss(rng) * rir_envelope(static_cast<double>(i) / sample_rate, t60_s);
  const double p = peak(rir.taps);
  for (double &t : rir.taps) t /= p;
  return rir;
}

SyntheticRir identity_rir(int sample_rate) {
  SyntheticRir rir;
  rir.sample_rate = sample_rate;
  rir.t60_s = 0.0;
  rir.taps = {1.0};
  return rir;
}

AudioSignal apply_reverb(const AudioSignal &clean, const SyntheticRir &rir) {
  if (clean.sample_rate != rir.sample_rate)
    throw InvalidParameter("apply_reverb: sample rates differ");
  if (clean.samples.empty()) return clean;

  std::vector<double> conv = fft_convolve(clean.samples, rir.taps);
  conv.resize(clean.samples.size());

  const double clean_peak = peak(clean.samples);
  const double conv_peak = peak(conv);
  if (conv_peak > 0.0 && clean_peak > 0.0) {
    const double scale = clean_peak / conv_peak;
    for (double &x : conv) x *= scale;
  }
  AudioSignal out;
  out.sample_rate = clean.sample_rate;
  out.samples = std::move(conv);
  return out;
}

AudioSignal make_speech_like(double duration_s, int sample_rate,
                             uint64_t seed) {
  const size_t total =
      static_cast<size_t>(std::lround(duration_s * sample_rate));
  AudioSignal sig;
  sig.sample_rate = sample_rate;
  sig.samples.assign(total, 0.0);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double formants[3] = {500.0, 1500.0, 2500.0};
  const double widths[3] = {250.0, 350.0, 450.0};

  size_t t = 0;
  while (t < total) {
    const size_t syllable =
        static_cast<size_t>((0.12 + 0.16 * uni(rng)) * sample_rate);
    const size_t gap =
        static_cast<size_t>((0.03 + 0.06 * uni(rng)) * sample_rate);
    const double f0a = 105.0 + 125.0 * uni(rng);
    const double f0b = f0a * (0.85 + 0.40 * uni(rng));

    const int harmonics = 12;
    std::vector<double> amp(harmonics), phase(harmonics);
    const double f0_mid = 0.5 * (f0a + f0b);
    for (int h = 0; h < harmonics; ++h) {
      const double f = (h + 1) * f0_mid;
      double formant_gain = 0.1;
      for (int i = 0; i < 3; ++i) {
        const double d = (f - formants[i]) / widths[i];
        formant_gain += std::exp(-0.5 * d * d);
      }
      amp[static_cast<size_t>(h)] =
          formant_gain / std::pow(h + 1.0, 0.8);
      phase[static_cast<size_t>(h)] = 2.0 * std::numbers::pi * uni(rng);
    }

    const size_t end = std::min(total, t + syllable);
    const double len = static_cast<double>(syllable);
    for (size_t i = t; i < end; ++i) {
      const double frac = static_cast<double>(i - t) / len;
      const double f0 = f0a + (f0b - f0a) * frac;
      const double env = std::sin(std::numbers::pi * frac);
      double s = 0.0;
      for (int h = 0; h < harmonics; ++h) {
        const double f = (h + 1) * f0;
        if (f >= 0.45 * sample_rate) break;
        phase[static_cast<size_t>(h)] +=
            2.0 * std::numbers::pi * f / sample_rate;
        s += amp[static_cast<size_t>(h)] *
             std::sin(phase[static_cast<size_t>(h)]);
      }
      sig.samples[i] = env * env * s;
    }
    t = end + gap;
  }

  const double p = peak(sig.samples);
  if (p > 0.0)
    for (double &x : sig.samples) x *= 0.5 / p;
  return sig;
}

GridResult beta_grid(const std::vector<AudioSignal> &clean_signals,
                     const SyntheticRir &rir,
                     const std::vector<double> &beta1_grid,
                     const std::vector<double> &beta_star_grid, int trials,
                     uint64_t seed, const GridOptions &options) {
  if (clean_signals.empty())
    throw InvalidParameter("beta_grid: no clean signals");
  if (beta1_grid.empty() || beta_star_grid.empty())
    throw InvalidParameter("beta_grid: empty grid");
  if (trials < 1) throw InvalidParameter("beta_grid: trials < 1");

  const int rows = static_cast<int>(beta1_grid.size());
  const int cols = static_cast<int>(beta_star_grid.size());
  const int per_cell = static_cast<int>(clean_signals.size()) * trials;
  const int n_jobs = rows * cols * per_cell;

  // Precompute the spectrogram pairs shared by all grid cells.
  struct SignalData {
    ComplexSpectrogram clean_spec;
    PowerSpectrogram clean_power;
    Matrix reverb_power;
    AudioSignal clean_ref;  // clean-phase resynthesis, the scoring reference
  };
  std::vector<SignalData> data(clean_signals.size());
  for (size_t s = 0; s < clean_signals.size(); ++s) {
    data[s].clean_spec = stft_forward(clean_signals[s], options.stft);
    data[s].clean_power = power_spectrogram(data[s].clean_spec);
    const AudioSignal reverb = apply_reverb(clean_signals[s], rir);
    data[s].reverb_power =
        power_spectrogram(stft_forward(reverb, options.stft)).values;
    data[s].clean_ref = istft(data[s].clean_power, data[s].clean_spec);
  }

  std::vector<double> cd(static_cast<size_t>(n_jobs), 0.0);
  parallel_for(n_jobs, options.threads, [&](int job) {
    const int cell = job / per_cell;
    const int within = job % per_cell;
    const int sig = within / trials;
    const int row = cell / cols;
    const int col = cell % cols;
    const SignalData &d = data[static_cast<size_t>(sig)];

    DereverbConfig learn;
    learn.stft = options.stft;
    learn.atoms = options.atoms;
    learn.kernel_frames = 1;
    learn.beta1 = Beta(beta1_grid[static_cast<size_t>(row)]);
    learn.max_iters_stage1 = options.max_iters;
    learn.delta_coeff = options.delta_coeff;
    learn.rng_seed = mix_seed(seed, static_cast<uint64_t>(job) * 2);
    const Stage1Result s1 = stage1_learn_dictionary(d.reverb_power, learn);

    const Matrix &S = d.clean_power.values;
    const double delta = std::sqrt(S.square().sum()) * options.delta_coeff;
    const Activations u_hat = fit_activations(
        S, s1.dictionary, Beta(beta_star_grid[static_cast<size_t>(col)]),
        options.max_iters, delta,
        mix_seed(seed, static_cast<uint64_t>(job) * 2 + 1));

    PowerSpectrogram s_hat = d.clean_power;
    s_hat.values =
        (s1.dictionary.w.matrix() * u_hat.u.matrix()).array();
    const AudioSignal rec = istft(s_hat, d.clean_spec);
    cd[static_cast<size_t>(job)] = cepstral_distance(d.clean_ref, rec);
  });

  GridResult grid;
  grid.beta1_grid = beta1_grid;
  grid.beta_star_grid = beta_star_grid;
  grid.trials = trials;
  grid.seed = seed;
  grid.mean_cd = Matrix::Zero(rows, cols);
  for (int job = 0; job < n_jobs; ++job) {
    const int cell = job / per_cell;
    grid.mean_cd(cell / cols, cell % cols) += cd[static_cast<size_t>(job)];
  }
  grid.mean_cd /= static_cast<double>(per_cell);
  return grid;
}

std::string grid_to_json(const GridResult &grid) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["beta1_grid"] = grid.beta1_grid;
  j["beta_star_grid"] = grid.beta_star_grid;
  j["trials"] = grid.trials;
  j["seed"] = grid.seed;
  std::vector<std::vector<double>> rows;
  for (Eigen::Index r = 0; r < grid.mean_cd.rows(); ++r) {
    std::vector<double> row;
    for (Eigen::Index c = 0; c < grid.mean_cd.cols(); ++c)
      row.push_back(grid.mean_cd(r, c));
    rows.push_back(std::move(row));
  }
  j["mean_cepstral_distance"] = rows;
  return j.dump(2);
}

void grid_to_csv(const GridResult &grid, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "beta1,beta_star,mean_cepstral_distance\n";
  for (Eigen::Index r = 0; r < grid.mean_cd.rows(); ++r)
    for (Eigen::Index c = 0; c < grid.mean_cd.cols(); ++c)
      out << grid.beta1_grid[static_cast<size_t>(r)] << ','
          << grid.beta_star_grid[static_cast<size_t>(c)] << ','
          << grid.mean_cd(r, c) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

BenchmarkReport benchmark(const std::vector<AudioSignal> &clean_set,
                          const std::vector<double> &t60_list,
                          const DereverbConfig &config, int threads) {
  if (clean_set.empty()) throw InvalidParameter("benchmark: no signals");
  if (t60_list.empty()) throw InvalidParameter("benchmark: no conditions");

  const int per_cond = static_cast<int>(clean_set.size());
  const int n_jobs = static_cast<int>(t60_list.size()) * per_cond;
  struct Outcome {
    double fw_rev, fw_res, cd_rev, cd_res;
  };
  std::vector<Outcome> outcomes(static_cast<size_t>(n_jobs));

  parallel_for(n_jobs, threads, [&](int job) {
    const int cond = job / per_cond;
    const int sig = job % per_cond;
    const AudioSignal &clean = clean_set[static_cast<size_t>(sig)];
    const double t60 = t60_list[static_cast<size_t>(cond)];

    const SyntheticRir rir =
        t60 > 0.0
            ? synth_rir(t60, t60, clean.sample_rate,
                        mix_seed(config.rng_seed, static_cast<uint64_t>(job)))
            : identity_rir(clean.sample_rate);
    const AudioSignal reverberant = apply_reverb(clean, rir);

    DereverbConfig run = config;
    run.rng_seed =
        mix_seed(config.rng_seed, 0x5eed0000ULL + static_cast<uint64_t>(job));
    const DereverbResult res = dereverberate(reverberant, run);

    Outcome &o = outcomes[static_cast<size_t>(job)];
    o.fw_rev = fwssnr(clean, reverberant);
    o.fw_res = fwssnr(clean, res.restored_signal);
    o.cd_rev = cepstral_distance(clean, reverberant);
    o.cd_res = cepstral_distance(clean, res.restored_signal);
  });

  BenchmarkReport report;
  report.seed = config.rng_seed;
  for (size_t cond = 0; cond < t60_list.size(); ++cond) {
    std::vector<double> fw_rev, fw_res, cd_rev, cd_res;
    int improved = 0;
    for (int sig = 0; sig < per_cond; ++sig) {
      const Outcome &o =
          outcomes[cond * static_cast<size_t>(per_cond) +
                   static_cast<size_t>(sig)];
      fw_rev.push_back(o.fw_rev);
      fw_res.push_back(o.fw_res);
      cd_rev.push_back(o.cd_rev);
      cd_res.push_back(o.cd_res);
      if (o.fw_res > o.fw_rev) ++improved;
    }
    BenchmarkRow row;
    row.t60_s = t60_list[cond];
    row.trials = per_cond;
    row.fwssnr_improved = improved;
    const MeanStd a = mean_std(fw_rev), b = mean_std(fw_res),
                  c = mean_std(cd_rev), d = mean_std(cd_res);
    row.fwssnr_reverberant_mean = a.mean;
    row.fwssnr_reverberant_std = a.std;
    row.fwssnr_restored_mean = b.mean;
    row.fwssnr_restored_std = b.std;
    row.cd_reverberant_mean = c.mean;
    row.cd_reverberant_std = c.std;
    row.cd_restored_mean = d.mean;
    row.cd_restored_std = d.std;
    report.rows.push_back(row);
  }
  return report;
}

std::string benchmark_to_json(const BenchmarkReport &report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["seed"] = report.seed;
  j["rows"] = nlohmann::json::array();
  for (const BenchmarkRow &r : report.rows) {
    j["rows"].push_back({{"t60_s", r.t60_s},
                         {"trials", r.trials},
                         {"fwssnr_improved", r.fwssnr_improved},
                         {"fwssnr_reverberant_mean", r.fwssnr_reverberant_mean},
                         {"fwssnr_reverberant_std", r.fwssnr_reverberant_std},
                         {"fwssnr_restored_mean", r.fwssnr_restored_mean},
                         {"fwssnr_restored_std", r.fwssnr_restored_std},
                         {"cd_reverberant_mean", r.cd_reverberant_mean},
                         {"cd_reverberant_std", r.cd_reverberant_std},
                         {"cd_restored_mean", r.cd_restored_mean},
                         {"cd_restored_std", r.cd_restored_std}});
  }
  return j.dump(2);
}

BenchmarkReport benchmark_from_json(const std::string &json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(std::string("benchmark report: ") + e.what());
  }
  BenchmarkReport report;
  report.seed = j.at("seed").get<uint64_t>();
  for (const auto &row : j.at("rows")) {
    BenchmarkRow r;
    r.t60_s = row.at("t60_s").get<double>();
    r.trials = row.at("trials").get<int>();
    r.fwssnr_improved = row.at("fwssnr_improved").get<int>();
    r.fwssnr_reverberant_mean = row.at("fwssnr_reverberant_mean").get<double>();
    r.fwssnr_reverberant_std = row.at("fwssnr_reverberant_std").get<double>();
    r.fwssnr_restored_mean = row.at("fwssnr_restored_mean").get<double>();
    r.fwssnr_restored_std = row.at("fwssnr_restored_std").get<double>();
    r.cd_reverberant_mean = row.at("cd_reverberant_mean").get<double>();
    r.cd_reverberant_std = row.at("cd_reverberant_std").get<double>();
    r.cd_restored_mean = row.at("cd_restored_mean").get<double>();
    r.cd_restored_std = row.at("cd_restored_std").get<double>();
    report.rows.push_back(r);
  }
  return report;
}

void benchmark_to_csv(const BenchmarkReport &report, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "t60_s,trials,fwssnr_improved,fwssnr_reverberant_mean,"
         "fwssnr_reverberant_std,fwssnr_restored_mean,fwssnr_restored_std,"
         "cd_reverberant_mean,cd_reverberant_std,cd_restored_mean,"
         "cd_restored_std\n";
  for (const BenchmarkRow &r : report.rows)
    out << r.t60_s << ',' << r.trials << ',' << r.fwssnr_improved << ','
        << r.fwssnr_reverberant_mean << ',' << r.fwssnr_reverberant_std << ','
        << r.fwssnr_restored_mean << ',' << r.fwssnr_restored_std << ','
        << r.cd_reverberant_mean << ',' << r.cd_reverberant_std << ','
        << r.cd_restored_mean << ',' << r.cd_restored_std << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace dereverb
