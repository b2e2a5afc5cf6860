#include "rppg/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "json.hpp"
#include "rppg/error.hpp"

namespace rppg::dsp {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

std::vector<double> poly_multiply(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> out(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
  }
  return out;
}

cplx bilinear(cplx s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

Biquad section_from_poles(cplx s1, cplx s2, double fs) {
  const cplx z1 = bilinear(s1, fs);
  const cplx z2 = bilinear(s2, fs);
  Biquad sec;
  sec.b = {1.0, 0.0, -1.0};  // zeros at z = 1 (s = 0) and z = -1 (s = inf)
  sec.a = {1.0, -(z1 + z2).real(), (z1 * z2).real()};
  return sec;
}

// Steady-state transposed-direct-form-II state for a unit step into each
// section, scaled by the DC gain of everything upstream.
std::vector<std::array<double, 2>> steady_state(const std::vector<Biquad>& sections) {
  std::vector<std::array<double, 2>> zi(sections.size());
  double scale = 1.0;
  for (std::size_t k = 0; k < sections.size(); ++k) {
    const auto& s = sections[k];
    const double gain = (s.b[0] + s.b[1] + s.b[2]) / (s.a[0] + s.a[1] + s.a[2]);
    const double z2 = s.b[2] - s.a[2] * gain;
    const double z1 = s.b[1] - s.a[1] * gain + z2;
    zi[k] = {scale * z1, scale * z2};
    scale *= gain;
  }
  return zi;
}

void run_cascade(std::vector<double>& x, const std::vector<Biquad>& sections,
                 std::vector<std::array<double, 2>> state) {
  for (std::size_t k = 0; k < sections.size(); ++k) {
    const auto& s = sections[k];
    double z1 = state[k][0];
    double z2 = state[k][1];
    for (double& v : x) {
      const double in = v;
      const double out = s.b[0] * in + z1;
      z1 = s.b[1] * in - s.a[1] * out + z2;
      z2 = s.b[2] * in - s.a[2] * out;
      v = out;
    }
  }
}

std::vector<double> forward_backward(std::span<const double> signal, const FilterSpec& spec, std::size_t pad) {
  const std::size_t n = signal.size();
  std::vector<double> ext(n + 2 * pad);
  const double first = signal.front();
  const double last = signal.back();
  for (std::size_t i = 0; i < pad; ++i) {
    ext[i] = 2.0 * first - signal[pad - i];
    ext[pad + n + i] = 2.0 * last - signal[n - 2 - i];
  }
  std::copy(signal.begin(), signal.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));

  const auto zi = steady_state(spec.sections);
  auto scaled = [&](double x0) {
    auto state = zi;
    for (auto& s : state) {
      s[0] *= x0;
      s[1] *= x0;
    }
    return state;
  };
  run_cascade(ext, spec.sections, scaled(ext.front()));
  std::reverse(ext.begin(), ext.end());
  run_cascade(ext, spec.sections, scaled(ext.front()));
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

// FFTW's planner is not thread-safe; plan creation and destruction are serialized.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void check_band(const Band& band, double fs) {
  if (!(fs > 0.0)) throw Error(ErrorCode::kArgument, "sampling rate must be > 0");
  if (!(band.low_hz > 0.0 && band.low_hz < band.high_hz && band.high_hz < fs / 2.0)) {
    throw Error(ErrorCode::kArgument, "band [" + std::to_string(band.low_hz) + ", " + std::to_string(band.high_hz) +
                                          "] Hz must satisfy 0 < low < high < fs/2 = " + std::to_string(fs / 2.0));
  }
}

FilterSpec butterworth_bandpass(int order, double low_hz, double high_hz, double fs) {
  if (order < 1) throw Error(ErrorCode::kArgument, "filter order must be >= 1");
  check_band({low_hz, high_hz}, fs);

  const double w1 = 2.0 * fs * std::tan(kPi * low_hz / fs);
  const double w2 = 2.0 * fs * std::tan(kPi * high_hz / fs);
  const double bw = w2 - w1;
  const double w0_sq = w1 * w2;

  FilterSpec spec;
  spec.order = order;
  spec.band = {low_hz, high_hz};
  spec.fs = fs;

  // Upper-half-plane prototype poles; conjugates are implied.
  for (int k = 0; k < order; ++k) {
    const double theta = kPi * (2.0 * k + order + 1) / (2.0 * order);
    const cplx p = std::polar(1.0, theta);
    if (p.imag() < -1e-12) continue;
    const cplx pb = p * bw;
    const cplx disc = std::sqrt(pb * pb - 4.0 * w0_sq);
    const cplx s1 = (pb + disc) / 2.0;
    const cplx s2 = (pb - disc) / 2.0;
    if (std::abs(p.imag()) <= 1e-12) {
      spec.sections.push_back(section_from_poles(s1, s2, fs));
    } else {
      spec.sections.push_back(section_from_poles(s1, std::conj(s1), fs));
      spec.sections.push_back(section_from_poles(s2, std::conj(s2), fs));
    }
  }

  // Normalize to unity gain at the digital image of the analog centre frequency.
  const double f_center = fs / kPi * std::atan(std::sqrt(w0_sq) / (2.0 * fs));
  const double gain = 1.0 / std::abs(frequency_response(spec, f_center));
  const double per_section = std::pow(gain, 1.0 / static_cast<double>(spec.sections.size()));
  for (auto& s : spec.sections) {
    for (double& c : s.b) c *= per_section;
  }

  spec.b = {1.0};
  spec.a = {1.0};
  for (const auto& s : spec.sections) {
    spec.b = poly_multiply(spec.b, {s.b.begin(), s.b.end()});
    spec.a = poly_multiply(spec.a, {s.a.begin(), s.a.end()});
  }
  return spec;
}

std::complex<double> frequency_response(const FilterSpec& spec, double freq_hz) {
  const cplx zinv = std::polar(1.0, -2.0 * kPi * freq_hz / spec.fs);
  cplx h = 1.0;
  for (const auto& s : spec.sections) {
    h *= (s.b[0] + zinv * (s.b[1] + zinv * s.b[2])) / (s.a[0] + zinv * (s.a[1] + zinv * s.a[2]));
  }
  return h;
}

std::vector<std::complex<double>> poles(const FilterSpec& spec) {
  std::vector<cplx> out;
  for (const auto& s : spec.sections) {
    const cplx disc = std::sqrt(cplx(s.a[1] * s.a[1] - 4.0 * s.a[2], 0.0));
    out.push_back((-s.a[1] + disc) / 2.0);
    out.push_back((-s.a[1] - disc) / 2.0);
  }
  return out;
}

bool is_stable(const FilterSpec& spec) {
  const auto ps = poles(spec);
  return std::all_of(ps.begin(), ps.end(), [](cplx p) { return std::abs(p) < 1.0; });
}

std::vector<double> filter_forward(std::span<const double> signal, const FilterSpec& spec) {
  if (signal.empty()) throw Error(ErrorCode::kArgument, "cannot filter an empty signal");
  std::vector<double> out(signal.begin(), signal.end());
  run_cascade(out, spec.sections, std::vector<std::array<double, 2>>(spec.sections.size(), {0.0, 0.0}));
  return out;
}

std::size_t zero_phase_padding(const FilterSpec& spec) { return 3 * spec.transfer_order(); }

std::vector<double> filter_zero_phase(std::span<const double> signal, const FilterSpec& spec) {
  const std::size_t pad = zero_phase_padding(spec);
  if (signal.size() <= pad) {
    throw Error(ErrorCode::kArgument, "signal of " + std::to_string(signal.size()) +
                                          " samples too short for zero-phase filtering (needs > " +
                                          std::to_string(pad) + ")");
  }
  auto fb = forward_backward(signal, spec, pad);
  std::vector<double> reversed(signal.rbegin(), signal.rend());
  auto bf = forward_backward(reversed, spec, pad);
  const std::size_t n = signal.size();
  for (std::size_t i = 0; i < n; ++i) fb[i] = 0.5 * (fb[i] + bf[n - 1 - i]);
  return fb;
}

std::vector<double> hann_window(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::kArgument, "Hann window needs n >= 2");
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n - 1)));
  }
  // Force exact symmetry; cos() is not symmetric to the last ulp.
  for (std::size_t k = 0; k < n / 2; ++k) w[n - 1 - k] = w[k];
  return w;
}

Spectrum magnitude_spectrum(std::span<const double> signal, double fs, std::size_t nfft) {
  if (signal.empty()) throw Error(ErrorCode::kArgument, "empty signal");
  if (nfft < signal.size()) throw Error(ErrorCode::kArgument, "nfft smaller than signal length");
  if (!std::has_single_bit(nfft)) throw Error(ErrorCode::kArgument, "nfft must be a power of two");

  const std::size_t bins = nfft / 2 + 1;
  std::unique_ptr<double, FftwDeleter> in(static_cast<double*>(fftw_malloc(sizeof(double) * nfft)));
  std::unique_ptr<fftw_complex, FftwDeleter> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.get(), out.get(), FFTW_ESTIMATE);
  }
  std::fill(in.get(), in.get() + nfft, 0.0);
  std::copy(signal.begin(), signal.end(), in.get());
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  Spectrum spec;
  spec.nfft = nfft;
  spec.freqs_hz.resize(bins);
  spec.magnitudes.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    spec.freqs_hz[k] = static_cast<double>(k) * fs / static_cast<double>(nfft);
    spec.magnitudes[k] = std::hypot(out.get()[k][0], out.get()[k][1]);
  }
  return spec;
}

std::size_t default_nfft(std::size_t window_len) { return std::bit_ceil(std::max<std::size_t>(4096, window_len)); }

std::string filter_to_json(const FilterSpec& spec) {
  nlohmann::ordered_json j;
  j["order"] = spec.order;
  j["band_hz"] = {spec.band.low_hz, spec.band.high_hz};
  j["fs"] = spec.fs;
  j["b"] = spec.b;
  j["a"] = spec.a;
  return j.dump();
}

}  // namespace rppg::dsp
