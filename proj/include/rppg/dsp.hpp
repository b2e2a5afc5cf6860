#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rppg::dsp {

struct Band {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

// Throws kArgument unless 0 < low < high < fs/2.
void check_band(const Band& band, double fs);

// One second-order section, a[0] == 1.
struct Biquad {
  std::array<double, 3> b{};
  std::array<double, 3> a{1.0, 0.0, 0.0};
};

struct FilterSpec {
  int order = 0;  // low-pass prototype order; the band-pass has 2 * order poles
  Band band;
  double fs = 0.0;
  std::vector<Biquad> sections;  // what the filtering routines run
  std::vector<double> b, a;      // expanded transfer function, for inspection only

  std::size_t transfer_order() const { return a.empty() ? 0 : a.size() - 1; }
};

// Analog Butterworth prototype, low-pass to band-pass transform, bilinear
// transform with both edges pre-warped. Unity gain at the geometric centre.
FilterSpec butterworth_bandpass(int order, double low_hz, double high_hz, double fs);

std::complex<double> frequency_response(const FilterSpec& spec, double freq_hz);
std::vector<std::complex<double>> poles(const FilterSpec& spec);
bool is_stable(const FilterSpec& spec);

// Causal cascade, zero initial state.
std::vector<double> filter_forward(std::span<const double> signal, const FilterSpec& spec);

// Samples of odd-reflection padding used at each edge by filter_zero_phase.
std::size_t zero_phase_padding(const FilterSpec& spec);

// Zero-phase forward-backward filtering (squared magnitude response). Edges are
// padded by odd reflection and each pass starts from the steady-state section
// state. The forward-backward and backward-forward results are averaged, so the
// operation commutes exactly with time reversal.
std::vector<double> filter_zero_phase(std::span<const double> signal, const FilterSpec& spec);

// Symmetric Hann: w[k] = 0.5 (1 - cos(2 pi k / (n - 1))).
std::vector<double> hann_window(std::size_t n);

struct Spectrum {
  std::vector<double> freqs_hz;
  std::vector<double> magnitudes;
  std::size_t nfft = 0;
};

// Zero-padded real FFT; bins 0 .. nfft/2.
Spectrum magnitude_spectrum(std::span<const double> signal, double fs, std::size_t nfft);

// Smallest power of two >= max(4096, window_len).
std::size_t default_nfft(std::size_t window_len);

// {order, band_hz, fs, b, a}
std::string filter_to_json(const FilterSpec& spec);

}  // namespace rppg::dsp
