#include "commands.hpp"

#include <filesystem>
#include <ostream>

#include "json.hpp"
#include "rppg/cli.hpp"
#include "rppg/clips.hpp"
#include "rppg/common.hpp"
#include "rppg/error.hpp"
#include "rppg/eval.hpp"
#include "rppg/frames.hpp"
#include "rppg/hr.hpp"
#include "rppg/parallel.hpp"
#include "rppg/pulse.hpp"
#include "rppg/synth.hpp"

namespace rppg::cli {

namespace fs = std::filesystem;

int cmd_preprocess(const PreprocessArgs& args, std::ostream& out, std::ostream&) {
  const auto meta = frames::read_meta(args.input);
  if (args.white_balance != "grayworld" && args.white_balance != "none") {
    throw Error(ErrorCode::kArgument, "--white-balance must be grayworld|none");
  }
  if (args.downsample < 1) throw Error(ErrorCode::kArgument, "--downsample must be >= 1");

  frames::FrameSequence seq;
  if (meta.color == frames::ColorFormat::kBayer) {
    auto raw = frames::load_raw_sequence(args.input);
    const auto layout = args.cfa_explicit ? frames::parse_cfa(args.cfa) : *raw.meta.cfa;
    seq.fps = raw.meta.fps;
    seq.source_id = raw.meta.source_id;
    seq.frames.resize(raw.frames.size());
    parallel_for(raw.frames.size(), [&](std::size_t i) {
      raw.frames[i].layout = layout;
      seq.frames[i] = frames::demosaic_bilinear(raw.frames[i]);
    });
  } else {
    seq = frames::load_sequence(args.input);
  }

  const bool balance = args.white_balance == "grayworld";
  parallel_for(seq.size(), [&](std::size_t i) {
    auto f = frames::downsample(seq.frames[i], args.downsample);
    seq.frames[i] = balance ? frames::gray_world_balance(f) : std::move(f);
  });
  frames::write_sequence(args.output, seq);
  out << "preprocessed " << seq.size() << " frames -> " << seq.width() << "x" << seq.height() << " "
      << (seq.monochrome ? "gray" : "rgb") << " at " << args.output << "\n";
  return kOk;
}

int cmd_sgt(const SgtArgs& args, std::ostream& out, std::ostream& err) {
  pulse::SgtConfig config;
  config.method = pulse::parse_method(args.method);
  config.band = {args.band_lo, args.band_hi};
  config.filter_order = args.order;
  config.projection.window_s = args.window;
  config.projection.overlap = args.overlap;
  const auto roi = frames::parse_roi(args.roi);
  const auto seq = frames::load_sequence(args.input);

  pulse::ProjectionDiagnostics diag;
  const auto labels = pulse::generate_sgt(seq, roi, config, &diag);
  pulse::write_sgt(args.output, labels);
  if (!diag.degenerate_windows.empty()) {
    err << "warning: " << diag.degenerate_windows.size() << " of " << diag.window_count
        << " projection windows were flat and contributed zero\n";
  }
  out << "wrote " << labels.pulse.size() << " " << pulse::to_string(config.method) << " labels to " << args.output
      << "\n";
  return kOk;
}

int cmd_hr(const HrArgs& args, std::ostream& out, std::ostream& err) {
  auto signal = pulse::read_pulse_csv(args.input);
  if (args.fps > 0.0) signal.fps = args.fps;

  hr::HrConfig config{args.window, args.stride, args.band_lo_bpm, args.band_hi_bpm};
  if (!args.band_explicit) {
    // SGT labels are searched over their own label band.
    const auto side = pulse::sidecar_path(args.input);
    if (fs::exists(side)) {
      const auto j = nlohmann::json::parse(read_file(side), nullptr, false);
      if (!j.is_discarded() && j.contains("band_hz")) {
        config.low_bpm = 60.0 * j["band_hz"].at(0).get<double>();
        config.high_bpm = 60.0 * j["band_hz"].at(1).get<double>();
      }
    }
  }
  auto series = hr::estimate_hr(signal, config);
  if (!args.no_filter) {
    hr::AmplitudeFilterReport report;
    series = hr::amplitude_filter(series, signal, {args.context, args.z_max, args.min_snr_db}, &report);
    if (report.all_invalid) err << "warning: amplitude filter rejected every window\n";
    out << "amplitude filter invalidated " << report.invalidated << " of " << series.size() << " windows\n";
  }
  hr::write_hr_csv(args.output, series);
  out << "wrote " << series.size() << " HR windows to " << args.output << "\n";
  return kOk;
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream&) {
  if (args.pred.size() != args.ref.size() || args.pred.empty()) {
    throw Error(ErrorCode::kArgument, "--pred and --ref must be given the same number of times");
  }
  std::vector<eval::HrPair> pooled;
  std::vector<eval::NamedReport> sources;
  for (std::size_t s = 0; s < args.pred.size(); ++s) {
    const auto pred = hr::read_hr_csv(args.pred[s]);
    auto ref = hr::read_hr_csv(args.ref[s]);
    if (args.ref_window > 0.0) ref = eval::resample_reference(ref, pred.t_s, args.ref_window);
    const auto pairs = eval::align(pred, ref, args.tol);
    if (args.pred.size() > 1) {
      sources.push_back({args.pred[s], eval::compute_metrics(pairs, args.allow_constant)});
    }
    pooled.insert(pooled.end(), pairs.begin(), pairs.end());
  }
  const auto report = eval::compute_metrics(pooled, args.allow_constant);
  const fs::path dir = args.output;
  write_file_atomic(dir / "report.json", eval::report_json(report, sources));
  write_file_atomic(dir / "bland_altman.csv", eval::bland_altman_csv(report.bland_altman));
  write_file_atomic(dir / "correlation.csv", eval::correlation_csv(pooled));
  out << "n=" << report.n << " mae=" << report.mae << " rmse=" << report.rmse << " r="
      << (report.pearson_r ? format_double(*report.pearson_r) : std::string("null")) << "\n";
  return kOk;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream&) {
  eval::SweepConfig config;
  config.increments_px = args.increments;
  config.sgt.method = pulse::parse_method(args.method);
  config.sgt.band = {args.band_lo, args.band_hi};
  config.hr = {args.window, args.stride, args.hr_band_lo_bpm, args.hr_band_hi_bpm};
  const auto seq = frames::load_sequence(args.input);
  const auto result = eval::roi_sweep(seq, frames::parse_roi(args.roi), config);
  write_file_atomic(args.output, eval::histogram_csv(result.histogram));
  if (!args.changes.empty()) {
    std::string csv = "increment_px,change_bpm\n";
    for (std::size_t i = 0; i < result.increments_px.size(); ++i) {
      for (double d : result.changes_per_increment[i]) {
        csv += std::to_string(result.increments_px[i]) + "," + format_double(d) + "\n";
      }
    }
    write_file_atomic(args.changes, csv);
  }
  out << "pooled " << result.relative_changes_bpm.size() << " HR changes over " << result.increments_px.size()
      << " increments -> " << args.output << "\n";
  return kOk;
}

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream&) {
  if (args.amp.size() != 3 || args.base.size() != 3) throw Error(ErrorCode::kArgument, "--amp/--base take r,g,b");
  synth::SynthConfig config;
  config.width = args.width;
  config.height = args.height;
  config.fps = args.fps;
  config.duration_s = args.duration;
  config.skin_region = frames::parse_roi(args.skin);
  config.pulse_bpm_start = args.bpm;
  config.pulse_bpm_end = args.bpm_end > 0.0 ? args.bpm_end : args.bpm;
  config.pulse_amp_rgb = {args.amp[0], args.amp[1], args.amp[2]};
  config.base_rgb = {args.base[0], args.base[1], args.base[2]};
  config.noise_sigma = args.noise;
  if (args.flicker_hz > 0.0) config.flicker = synth::Flicker{args.flicker_hz, args.flicker_amp};
  config.jitter_px = args.jitter;
  config.seed = args.seed;

  const auto generated = synth::generate(config, args.window, args.stride);
  const fs::path dir = args.output;
  if (args.color == "rgb") {
    frames::write_sequence(dir, generated.sequence);
  } else if (args.color == "bayer") {
    const auto layout = frames::parse_cfa(args.cfa);
    frames::RawSequence raw;
    raw.meta = {config.fps, frames::ColorFormat::kBayer, layout, generated.sequence.source_id};
    for (const auto& f : generated.sequence.frames) raw.frames.push_back(frames::mosaic(f, layout));
    frames::write_raw_sequence(dir, raw);
  } else {
    throw Error(ErrorCode::kArgument, "--color must be rgb|bayer");
  }
  pulse::write_pulse_csv(dir / "truth_pulse.csv", generated.truth.pulse);
  hr::write_hr_csv(dir / "truth_hr.csv", generated.truth.hr);
  out << "generated " << generated.sequence.size() << " frames at " << dir.string() << "\n";
  return kOk;
}

int cmd_clips(const ClipsArgs& args, std::ostream& out, std::ostream& err) {
  const auto labels = pulse::read_sgt(args.labels);
  const auto seq = frames::load_sequence(args.frames);
  const auto roi = args.roi.empty() ? labels.source_roi : frames::parse_roi(args.roi);
  clips::ClipOptions options;
  options.length = args.length;
  options.size = args.size;
  options.stride = args.stride;
  options.resize = clips::parse_resize_mode(args.resize);
  options.train_ratio = args.split;
  options.seed = args.seed;
  const auto result = clips::export_clips(seq, labels.pulse, roi, options, args.output);
  if (result.clips.empty()) {
    err << "warning: " << seq.size() << " frames is fewer than one " << args.length << "-frame clip; nothing exported\n";
    return kOk;
  }
  out << "exported " << result.clips.size() << " clips (" << result.train.size() << " train / " << result.val.size()
      << " val), " << result.unused_frames << " trailing frames unused\n";
  return kOk;
}

}  // namespace rppg::cli
