#include "rppg/cli.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json_config.hpp"

namespace rppg::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerate:
    case ErrorCode::kAlignment:
      return kData;
    case ErrorCode::kIo:
      return kInternal;
    case ErrorCode::kArgument:
    case ErrorCode::kDimension:
    case ErrorCode::kBounds:
    case ErrorCode::kFormat:
    case ErrorCode::kMissingMetadata:
      return kUsage;
  }
  return kInternal;
}

namespace {

// --config is registered only so --help lists it; expand_config consumes it.
CLI::App* subcommand(CLI::App& app, const std::string& name, const std::string& description, std::string& config) {
  auto* sub = app.add_subcommand(name, description);
  sub->add_option("--config", config, "JSON file of flag values; command-line flags take precedence");
  return sub;
}

// Splices the subcommand's --config file into the argument list.
std::vector<std::string> expand_config(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    std::size_t erase = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      erase = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      erase = 1;
    } else {
      continue;
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + erase));
    const auto tokens = config_tokens(path, args);
    args.insert(args.end(), tokens.begin(), tokens.end());
    break;
  }
  return args;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Camera-based pulse and heart-rate toolkit", "rppg"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  std::string config;

  PreprocessArgs pre;
  auto* c = subcommand(app, "preprocess", "Demosaic, downsample and white-balance a frame directory", config);
  c->add_option("--input", pre.input, "Input frame directory")->required();
  c->add_option("--output", pre.output, "Output frame directory")->required();
  auto* cfa = c->add_option("--cfa", pre.cfa, "Bayer layout (rggb|bggr|grbg|gbrg); overrides meta.json");
  c->add_option("--downsample", pre.downsample, "Box-filter factor");
  c->add_option("--white-balance", pre.white_balance, "grayworld|none");

  SgtArgs sgt;
  c = subcommand(app, "sgt", "Generate pulse labels from an ROI with CHROM or POS", config);
  c->add_option("--input", sgt.input, "RGB frame directory")->required();
  c->add_option("--roi", sgt.roi, "ROI as x,y,w,h")->required();
  c->add_option("--output", sgt.output, "Label CSV path (sidecar .json written next to it)")->required();
  c->add_option("--method", sgt.method, "chrom|pos");
  c->add_option("--band-lo", sgt.band_lo, "Band-pass low edge (Hz)");
  c->add_option("--band-hi", sgt.band_hi, "Band-pass high edge (Hz)");
  c->add_option("--order", sgt.order, "Butterworth prototype order");
  c->add_option("--window", sgt.window, "Projection window (s)");
  c->add_option("--overlap", sgt.overlap, "Projection window overlap fraction");

  HrArgs hr;
  c = subcommand(app, "hr", "Estimate heart rate from a pulse CSV", config);
  c->add_option("--input", hr.input, "Pulse CSV (frame_index,time_s,ppg)")->required();
  c->add_option("--output", hr.output, "HR CSV path")->required();
  c->add_option("--window", hr.window, "Window length (s)");
  c->add_option("--stride", hr.stride, "Window stride (s)");
  auto* hr_lo = c->add_option("--band-lo-bpm", hr.band_lo_bpm, "Peak search low edge (bpm); default follows the label sidecar band when present");
  auto* hr_hi = c->add_option("--band-hi-bpm", hr.band_hi_bpm, "Peak search high edge (bpm)");
  c->add_flag("--no-filter", hr.no_filter, "Skip the amplitude filter");
  c->add_option("--context", hr.context, "Amplitude filter context (s)");
  c->add_option("--z-max", hr.z_max, "Robust z-score threshold");
  c->add_option("--min-snr-db", hr.min_snr_db, "Minimum in-band spectral SNR (dB)");
  c->add_option("--fps", hr.fps, "Override the sampling rate (0: from file)");

  EvalArgs ev;
  c = subcommand(app, "eval", "Compare predicted HR against reference HR", config);
  c->add_option("--pred", ev.pred, "Predicted HR CSV (repeatable)")->required();
  c->add_option("--ref", ev.ref, "Reference HR CSV (repeatable, paired with --pred)")->required();
  c->add_option("--output", ev.output, "Output directory")->required();
  c->add_option("--tol", ev.tol, "Timestamp pairing tolerance (s)");
  c->add_option("--ref-window", ev.ref_window, "Average reference over this window around each prediction (0: off)");
  c->add_flag("--allow-constant", ev.allow_constant, "Report r as null for a constant series instead of failing");

  SweepArgs sw;
  c = subcommand(app, "sweep", "HR sensitivity to growing the ROI", config);
  c->add_option("--input", sw.input, "RGB frame directory")->required();
  c->add_option("--roi", sw.roi, "Base ROI as x,y,w,h")->required();
  c->add_option("--output", sw.output, "Histogram CSV path")->required();
  c->add_option("--increments", sw.increments, "ROI growth in pixels")->delimiter(',');
  c->add_option("--method", sw.method, "chrom|pos");
  c->add_option("--band-lo", sw.band_lo, "Label band-pass low edge (Hz)");
  c->add_option("--band-hi", sw.band_hi, "Label band-pass high edge (Hz)");
  c->add_option("--window", sw.window, "HR window (s)");
  c->add_option("--stride", sw.stride, "HR stride (s)");
  c->add_option("--hr-band-lo-bpm", sw.hr_band_lo_bpm, "HR search low edge (bpm)");
  c->add_option("--hr-band-hi-bpm", sw.hr_band_hi_bpm, "HR search high edge (bpm)");
  c->add_option("--changes", sw.changes, "Optional CSV of per-window HR changes");

  SynthArgs sy;
  c = subcommand(app, "synth", "Render a synthetic pulsing-skin sequence with ground truth", config);
  c->add_option("--output", sy.output, "Output frame directory")->required();
  c->add_option("--width", sy.width, "Frame width");
  c->add_option("--height", sy.height, "Frame height");
  c->add_option("--fps", sy.fps, "Frame rate");
  c->add_option("--duration", sy.duration, "Duration (s)");
  c->add_option("--skin", sy.skin, "Skin patch as x,y,w,h");
  c->add_option("--bpm", sy.bpm, "Pulse rate at t=0");
  c->add_option("--bpm-end", sy.bpm_end, "Pulse rate at the end (0: constant)");
  c->add_option("--amp", sy.amp, "Pulse amplitude r,g,b (levels)")->delimiter(',')->expected(3);
  c->add_option("--base", sy.base, "Skin base level r,g,b")->delimiter(',')->expected(3);
  c->add_option("--noise", sy.noise, "Gaussian noise sigma (levels)");
  c->add_option("--flicker-hz", sy.flicker_hz, "Illumination flicker frequency (0: off)");
  c->add_option("--flicker-amp", sy.flicker_amp, "Relative flicker amplitude");
  c->add_option("--jitter", sy.jitter, "Skin patch translation amplitude (px)");
  c->add_option("--seed", sy.seed, "Noise seed");
  c->add_option("--color", sy.color, "rgb|bayer");
  c->add_option("--cfa", sy.cfa, "Bayer layout when --color bayer");
  c->add_option("--window", sy.window, "truth_hr window (s)");
  c->add_option("--stride", sy.stride, "truth_hr stride (s)");

  ClipsArgs cl;
  c = subcommand(app, "clips", "Export fixed-length training clips with labels and a split manifest", config);
  c->add_option("--frames", cl.frames, "RGB frame directory")->required();
  c->add_option("--labels", cl.labels, "SGT label CSV (with sidecar)")->required();
  c->add_option("--output", cl.output, "Output directory")->required();
  c->add_option("--roi", cl.roi, "Crop ROI as x,y,w,h (default: the label sidecar ROI)");
  c->add_option("--length", cl.length, "Frames per clip");
  c->add_option("--size", cl.size, "Output clip side (px)");
  c->add_option("--stride", cl.stride, "Frames between clip starts");
  c->add_option("--resize", cl.resize, "bilinear|nearest");
  c->add_option("--split", cl.split, "Train fraction of clips");
  c->add_option("--seed", cl.seed, "Split shuffle seed");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes from the back

  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    return code;
  } catch (const CLI::CallForAllHelp& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    return code;
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    app.exit(e, o, e2);
    err << e2.str() << o.str();
    return kUsage;
  }

  pre.cfa_explicit = cfa->count() > 0;
  hr.band_explicit = hr_lo->count() > 0 || hr_hi->count() > 0;

  try {
    const auto& name = app.get_subcommands().front()->get_name();
    if (name == "preprocess") return cmd_preprocess(pre, out, err);
    if (name == "sgt") return cmd_sgt(sgt, out, err);
    if (name == "hr") return cmd_hr(hr, out, err);
    if (name == "eval") return cmd_eval(ev, out, err);
    if (name == "sweep") return cmd_sweep(sw, out, err);
    if (name == "synth") return cmd_synth(sy, out, err);
    if (name == "clips") return cmd_clips(cl, out, err);
    err << "error: unknown subcommand " << name << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace rppg::cli
