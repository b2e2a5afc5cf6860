#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "rppg/pulse.hpp"

namespace rppg::hr {

struct HrSeries {
  std::vector<double> t_s;  // window centres
  std::vector<double> bpm;
  std::vector<std::uint8_t> valid;
  double window_s = 10.0;
  double stride_s = 1.0;
  double low_bpm = 90.0;  // peak-search band the estimates came from
  double high_bpm = 240.0;

  std::size_t size() const { return t_s.size(); }
};

struct HrConfig {
  double window_s = 10.0;
  double stride_s = 1.0;
  double low_bpm = 90.0;  // 1.5-4 Hz post-processing band
  double high_bpm = 240.0;
};

// SGT signals are searched over their own label band.
inline constexpr HrConfig kSgtHrConfig{10.0, 1.0, 78.0, 240.0};

// Number of full windows: floor((n - window) / stride) + 1.
std::size_t window_count(std::size_t n, std::size_t window, std::size_t stride);

// Mean-removed, Hann-weighted, zero-padded FFT per window; HR = 60 x peak
// frequency within the band.
HrSeries estimate_hr(const pulse::PulseSignal& pulse, const HrConfig& config = {});

struct AmplitudeFilterParams {
  double context_s = 30.0;
  double z_max = 3.0;
  double min_snr_db = 2.0;
  // Floor on the robust spread, as a fraction of the context median. Keeps
  // near-identical clean windows from producing huge z-scores.
  double min_rel_spread = 0.05;
};

struct AmplitudeFilterReport {
  std::vector<double> peak_to_peak;
  std::vector<double> robust_z;
  std::vector<double> snr_db;
  std::size_t invalidated = 0;
  bool all_invalid = false;
};

// Marks windows whose peak-to-peak amplitude sits more than z_max scaled-MAD
// units from the rolling context median, or whose spectral peak is less than
// min_snr_db above the in-band median magnitude. Invalid windows get bpm by
// linear interpolation between the nearest valid neighbours (nearest valid
// value at the edges). Valid windows are never modified.
HrSeries amplitude_filter(const HrSeries& hr, const pulse::PulseSignal& pulse,
                          const AmplitudeFilterParams& params = {}, AmplitudeFilterReport* report = nullptr);

// CSV: t_s,bpm,valid
std::string hr_csv(const HrSeries& hr);
void write_hr_csv(const std::filesystem::path& path, const HrSeries& hr);
// The valid column is optional (reference exports); absent means all valid.
HrSeries read_hr_csv(const std::filesystem::path& path, double window_s = 10.0, double stride_s = 1.0);

}  // namespace rppg::hr
