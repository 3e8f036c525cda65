// src/cli.cc

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

#include "dereverb/cli.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dereverb/audio.h"
#include "dereverb/experiments.h"
#include "dereverb/metrics.h"
#include "dereverb/model.h"
#include "dereverb/pipeline.h"
#include "dereverb/png_image.h"
#include "dereverb/rng.h"

namespace dereverb {

namespace {

struct ModelFlags {
  double beta1 = 0.75;
  double beta2 = 2.0;
  Eigen::Index atoms = 64;
  Eigen::Index kernel_frames = 20;
  Eigen::Index window = 512;
  Eigen::Index hop = 256;
  std::string mode = "simulated";
  uint64_t seed = 0;
  int max_iters1 = 500;
  int max_iters2 = 300;
  double lambda_u_coeff = 1e-3;
  double lambda_h_coeff = 0.3;
  double delta_coeff = 1e-3;

  DereverbConfig to_config() const {
    DereverbConfig c;
    c.stft.window_len = window;
    c.stft.hop = hop;
    c.beta1 = Beta(beta1);
    c.beta2 = Beta(beta2);
    c.atoms = atoms;
    c.kernel_frames = kernel_frames;
    c.lambda_u_rule = mode == "recording" ? LambdaURule::kRecording
                                          : LambdaURule::kSimulated;
    c.lambda_u_coeff = lambda_u_coeff;
    c.lambda_h_coeff = lambda_h_coeff;
    c.delta_coeff = delta_coeff;
    c.max_iters_stage1 = max_iters1;
    c.max_iters_stage2 = max_iters2;
    c.rng_seed = seed;
    return c;
  }
};

void add_model_flags(CLI::App *cmd, ModelFlags &f) {
  cmd->add_option("--beta1", f.beta1, "Stage-1 divergence parameter")
      ->capture_default_str();
  cmd->add_option("--beta2", f.beta2, "Stage-2 divergence parameter")
      ->capture_default_str();
  cmd->add_option("--atoms", f.atoms, "Dictionary atom count J")
      ->capture_default_str();
  cmd->add_option("--kernel-frames", f.kernel_frames,
                  "Reverberation kernel length M in frames")
      ->capture_default_str();
  cmd->add_option("--window", f.window, "STFT window length in samples")
      ->capture_default_str();
  cmd->add_option("--hop", f.hop, "STFT hop in samples")
      ->capture_default_str();
  cmd->add_option("--mode", f.mode,
                  "Sparsity weight rule for stage 2")
      ->check(CLI::IsMember({"simulated", "recording"}))
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  cmd->add_option("--max-iters1", f.max_iters1, "Stage-1 iteration cap")
      ->capture_default_str();
  cmd->add_option("--max-iters2", f.max_iters2, "Stage-2 iteration cap")
      ->capture_default_str();
  cmd->add_option("--lambda-u-coeff", f.lambda_u_coeff,
                  "Sparsity weight scale: lambda_u = mean(Y) * coeff")
      ->capture_default_str();
  cmd->add_option("--lambda-h-coeff", f.lambda_h_coeff,
                  "Smoothness weight scale: lambda_h(k) = coeff * ||Y_k||^2")
      ->capture_default_str();
  cmd->add_option("--delta-coeff", f.delta_coeff,
                  "Stopping threshold scale: delta = ||Y||_F * coeff")
      ->capture_default_str();
}

void write_trace_csv(const DereverbResult &res, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "stage,iteration,cost\n";
  for (size_t i = 0; i < res.cost_trace_stage1.size(); ++i)
    out << "1," << i + 1 << ',' << res.cost_trace_stage1[i] << '\n';
  for (size_t i = 0; i < res.cost_trace_stage2.size(); ++i)
    out << "2," << i + 1 << ',' << res.cost_trace_stage2[i] << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::vector<AudioSignal> load_or_make_clean_set(const std::string &wav_dir,
                                                int count, double duration_s,
                                                uint64_t seed) {
  std::vector<AudioSignal> set;
  if (!wav_dir.empty()) {
    std::vector<std::filesystem::path> paths;
    for (const auto &entry : std::filesystem::directory_iterator(wav_dir))
      if (entry.path().extension() == ".wav") paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    for (const auto &p : paths) set.push_back(read_wav(p.string()));
    if (set.empty())
      throw InvalidParameter("no .wav files found in " + wav_dir);
    return set;
  }
  for (int i = 0; i < count; ++i)
    set.push_back(
        make_speech_like(duration_s, 16000, mix_seed(seed, 1000 + i)));
  return set;
}

int run_dereverb(const std::string &input, const std::string &output,
                 const ModelFlags &flags, bool highpass, int highpass_taps,
                 double highpass_cutoff, const std::string &dump_dir,
                 const std::string &trace_path) {
  AudioSignal sig = read_wav(input);
  if (sig.sample_rate != 16000)
    std::cerr << "warning: sample rate " << sig.sample_rate
              << " Hz differs from the 16 kHz the default parameters "
                 "assume\n";
  if (highpass) sig = highpass_filter(sig, highpass_taps, highpass_cutoff);

  const DereverbResult res = dereverberate(sig, flags.to_config());
  write_wav(res.restored_signal, output);

  if (!dump_dir.empty()) {
    std::filesystem::create_directories(dump_dir);
    dump_factors(res.factors,
                 (std::filesystem::path(dump_dir) / "factors.json").string());
  }
  if (!trace_path.empty()) write_trace_csv(res, trace_path);
  return 0;
}

}  // namespace

int cli_run(const std::vector<std::string> &args) {
  CLI::App app{
      "Blind single-channel speech dereverberation by two-stage "
      "variable beta-divergence convolutive NMF"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file");

  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;

  // --- dereverb ---
  auto *dv = app.add_subcommand("dereverb", "Restore a reverberant WAV file");
  std::string dv_in, dv_out, dv_dump, dv_trace;
  ModelFlags dv_flags;
  bool dv_highpass = false;
  int dv_hp_taps = 5000;
  double dv_hp_cutoff = 30.0;
  dv->add_option("input", dv_in, "Reverberant input WAV")->required();
  dv->add_option("output", dv_out, "Restored output WAV")->required();
  add_model_flags(dv, dv_flags);
  dv->add_flag("--highpass", dv_highpass,
               "Apply the FIR high-pass pre-filter before restoration");
  dv->add_option("--highpass-taps", dv_hp_taps, "High-pass tap count")
      ->capture_default_str();
  dv->add_option("--highpass-cutoff", dv_hp_cutoff,
                 "High-pass cutoff frequency in Hz")
      ->capture_default_str();
  dv->add_option("--dump-factors", dv_dump,
                 "Directory for the factors.json checkpoint");
  dv->add_option("--trace", dv_trace, "CSV path for per-iteration costs");
  dv->add_option("--threads", threads, "Worker thread count")
      ->capture_default_str();

  // --- metrics ---
  auto *mt = app.add_subcommand(
      "metrics", "Intrusive quality metrics of a test WAV against a clean one");
  std::string mt_clean, mt_test, mt_json;
  mt->add_option("clean", mt_clean, "Clean reference WAV")->required();
  mt->add_option("test", mt_test, "Signal under test WAV")->required();
  mt->add_option("--json", mt_json, "Write the JSON report here");

  // --- beta-grid ---
  auto *bg = app.add_subcommand(
      "beta-grid",
      "Dictionary-quality map over (beta1, beta*) pairs, scored by cepstral "
      "distance against the clean spectrogram");
  std::vector<double> bg_beta1, bg_beta_star;
  int bg_signals = 3, bg_trials = 2, bg_max_iters = 200;
  double bg_duration = 2.0, bg_t60 = 0.45;
  Eigen::Index bg_atoms = 24;
  uint64_t bg_seed = 0;
  bool bg_quick = false;
  std::string bg_csv, bg_json, bg_heatmap, bg_wav_dir;
  bg->add_option("--betas1", bg_beta1,
                 "Stage-1 beta grid (default 0.25..2.5 step 0.25)");
  bg->add_option("--betas-star", bg_beta_star,
                 "Representation beta grid (default 0.25..2.5 step 0.25)");
  bg->add_flag("--quick", bg_quick,
               "Small preset grid {0.5,1,1.5,2} with short signals");
  bg->add_option("--signals", bg_signals, "Bundled clean signal count")
      ->capture_default_str();
  bg->add_option("--trials", bg_trials, "Trials per (pair, signal)")
      ->capture_default_str();
  bg->add_option("--duration", bg_duration, "Bundled signal length, seconds")
      ->capture_default_str();
  bg->add_option("--t60", bg_t60, "Synthetic reverberation time, seconds")
      ->capture_default_str();
  bg->add_option("--atoms", bg_atoms, "Dictionary atoms for the grid")
      ->capture_default_str();
  bg->add_option("--max-iters", bg_max_iters, "Learning iteration cap")
      ->capture_default_str();
  bg->add_option("--seed", bg_seed, "Random seed")->capture_default_str();
  bg->add_option("--wav-dir", bg_wav_dir,
                 "Use the .wav files in this directory as the clean set");
  bg->add_option("--csv", bg_csv, "CSV output path")->capture_default_str();
  bg->add_option("--json", bg_json, "JSON output path");
  bg->add_option("--heatmap", bg_heatmap, "PNG heatmap output path");
  bg->add_option("--threads", threads, "Worker thread count")
      ->capture_default_str();

  // --- benchmark ---
  auto *bm = app.add_subcommand(
      "benchmark", "Restoration benchmark over synthetic reverberation");
  std::vector<double> bm_t60{0.45};
  int bm_signals = 10;
  double bm_duration = 2.0;
  std::string bm_csv, bm_json, bm_plot, bm_wav_dir;
  ModelFlags bm_flags;
  bm->add_option("--t60", bm_t60,
                 "Reverberation times in seconds (0 = identity response)")
      ->capture_default_str();
  bm->add_option("--signals", bm_signals, "Bundled clean signal count")
      ->capture_default_str();
  bm->add_option("--duration", bm_duration, "Bundled signal length, seconds")
      ->capture_default_str();
  add_model_flags(bm, bm_flags);
  bm->add_option("--wav-dir", bm_wav_dir,
                 "Use the .wav files in this directory as the clean set");
  bm->add_option("--csv", bm_csv, "CSV output path");
  bm->add_option("--json", bm_json, "JSON output path");
  bm->add_option("--plot", bm_plot, "PNG bar-chart output path");
  bm->add_option("--threads", threads, "Worker thread count")
      ->capture_default_str();

  // --- spectrogram ---
  auto *sp = app.add_subcommand("spectrogram",
                                "Export the power spectrogram of a WAV file");
  std::string sp_in, sp_csv, sp_png;
  Eigen::Index sp_window = 512, sp_hop = 256;
  sp->add_option("input", sp_in, "Input WAV")->required();
  sp->add_option("--csv", sp_csv, "CSV output path (row k, column n)");
  sp->add_option("--png", sp_png, "PNG log-magnitude output path");
  sp->add_option("--window", sp_window, "STFT window length")
      ->capture_default_str();
  sp->add_option("--hop", sp_hop, "STFT hop")->capture_default_str();

  std::vector<const char *> argv;
  argv.reserve(args.size());
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  try {
    if (dv->parsed())
      return run_dereverb(dv_in, dv_out, dv_flags, dv_highpass, dv_hp_taps,
                          dv_hp_cutoff, dv_dump, dv_trace);

    if (mt->parsed()) {
      const AudioSignal clean = read_wav(mt_clean);
      const AudioSignal test = read_wav(mt_test);
      const MetricReport report = compute_metrics(clean, test);
      nlohmann::json j;
      j["schema_version"] = 1;
      j["fwssnr"] = report.fwssnr_db;
      j["cepstral_distance"] = report.cepstral_distance;
      if (!mt_json.empty()) {
        std::ofstream out(mt_json);
        if (!out) throw IoError("cannot open for writing: " + mt_json);
        out << j.dump(2) << '\n';
      } else {
        std::cout << j.dump(2) << '\n';
      }
      return 0;
    }

    if (bg->parsed()) {
      if (bg_beta1.empty()) {
        for (double b = 0.25; b <= 2.51; b += 0.25) bg_beta1.push_back(b);
        if (bg_quick) bg_beta1 = {0.5, 1.0, 1.5, 2.0};
      }
      if (bg_beta_star.empty()) bg_beta_star = bg_beta1;
      if (bg_quick) {
        bg_signals = std::min(bg_signals, 2);
        bg_trials = 1;
        bg_duration = std::min(bg_duration, 1.5);
        bg_max_iters = std::min(bg_max_iters, 120);
      }
      const auto clean_set =
          load_or_make_clean_set(bg_wav_dir, bg_signals, bg_duration, bg_seed);
      const SyntheticRir rir =
          synth_rir(bg_t60, bg_t60, clean_set.front().sample_rate,
                    mix_seed(bg_seed, 0xA11CE));
      GridOptions opts;
      opts.atoms = bg_atoms;
      opts.max_iters = bg_max_iters;
      opts.threads = threads;
      const GridResult grid = beta_grid(clean_set, rir, bg_beta1,
                                        bg_beta_star, bg_trials, bg_seed,
                                        opts);
      if (bg_csv.empty() && bg_json.empty()) bg_csv = "beta_grid.csv";
      if (!bg_csv.empty()) grid_to_csv(grid, bg_csv);
      if (!bg_json.empty()) {
        std::ofstream out(bg_json);
        if (!out) throw IoError("cannot open for writing: " + bg_json);
        out << grid_to_json(grid) << '\n';
      }
      if (!bg_heatmap.empty())
        write_matrix_heatmap(bg_heatmap, grid.mean_cd, false, false);
      return 0;
    }

    if (bm->parsed()) {
      const auto clean_set = load_or_make_clean_set(
          bm_wav_dir, bm_signals, bm_duration, bm_flags.seed);
      const BenchmarkReport report =
          benchmark(clean_set, bm_t60, bm_flags.to_config(), threads);
      if (bm_csv.empty() && bm_json.empty()) bm_csv = "benchmark.csv";
      if (!bm_csv.empty()) benchmark_to_csv(report, bm_csv);
      if (!bm_json.empty()) {
        std::ofstream out(bm_json);
        if (!out) throw IoError("cannot open for writing: " + bm_json);
        out << benchmark_to_json(report) << '\n';
      }
      if (!bm_plot.empty()) {
        std::vector<std::string> labels;
        std::vector<std::vector<double>> series(2);
        for (const BenchmarkRow &r : report.rows) {
          labels.push_back("t60=" + std::to_string(r.t60_s));
          series[0].push_back(r.fwssnr_reverberant_mean);
          series[1].push_back(r.fwssnr_restored_mean);
        }
        write_bar_chart(bm_plot, labels, series);
      }
      return 0;
    }

    if (sp->parsed()) {
      const AudioSignal sig = read_wav(sp_in);
      StftConfig cfg;
      cfg.window_len = sp_window;
      cfg.hop = sp_hop;
      const PowerSpectrogram p = power_spectrogram(stft_forward(sig, cfg));
      if (sp_csv.empty() && sp_png.empty())
        throw InvalidParameter("spectrogram: give --csv and/or --png");
      if (!sp_csv.empty()) export_csv(p, sp_csv);
      if (!sp_png.empty()) write_matrix_heatmap(sp_png, p.values, true, true);
      return 0;
    }
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace dereverb
