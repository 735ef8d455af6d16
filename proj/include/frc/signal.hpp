#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace frc {

/// The six interference classes, label indices 0-5.
enum class JammerClass : std::uint32_t {
    AM = 0,
    Chirp = 1,
    FM = 2,
    PulseDME = 3,
    Narrowband = 4,
    NoJam = 5,
};

inline constexpr std::uint32_t kNumClasses = 6;

/// Canonical class name used in manifests and reports.
const char* class_name(JammerClass c);

/// Per-class waveform parameter ranges, drawn uniformly per record.
///
/// Defaults model a capture front-end that coarsely centers the interferer
/// (residual carrier offset within +-1% of the sample rate) and pick class
/// bandwidths in distinct octaves: AM tone < narrowband < FM sweep band <
/// chirp extent. Together with the wide JSR range this keeps every class
/// identifiable from its time-averaged spectrum while preserving the
/// signature time structure (chirp ramp, DME pulsing, AM modulation).
struct ClassParams {
    double tone_offset_min = -0.01, tone_offset_max = 0.01;  // fraction of sample_rate
    double am_depth_min = 0.3, am_depth_max = 0.9;
    double am_modf_min = 15e3, am_modf_max = 25e3;           // Hz
    double chirp_bw_min = 3.8e6, chirp_bw_max = 7e6;         // Hz, swept about 0
    double chirp_period_min = 4e-3, chirp_period_max = 12e-3;  // s, sawtooth period
    double fm_dev_min = 1.05e6, fm_dev_max = 1.45e6;         // Hz peak deviation
    double fm_modf_min = 10e3, fm_modf_max = 30e3;           // Hz modulating tone
    double dme_rate_min = 0.5e3, dme_rate_max = 2e3;         // pulse pairs per second
    double nb_bw_min = 0.7e6, nb_bw_max = 1.2e6;             // Hz noise bandwidth
};

/// Full description of the synthesis task; duration default fits a 512-column
/// spectrogram exactly (512*256 + 1024 samples).
struct SignalParams {
    double sample_rate = 10e6;
    std::uint64_t duration_samples = 132096;
    double snr_db = -20.0;        // GNSS signal power over unit noise
    double jsr_db_min = 10.0;     // jammer-to-signal ratio, drawn per record
    double jsr_db_max = 50.0;
    ClassParams class_params;
    std::uint64_t seed = 0;

    void validate() const;
};

/// All randomized values realized while synthesizing one record.
struct RealizedParams {
    double jsr_db = 0.0;
    std::vector<std::pair<std::string, double>> draws;
};

/// One labeled complex-baseband record r = s + j + w.
struct BasebandRecord {
    std::vector<std::complex<double>> samples;
    JammerClass label = JammerClass::NoJam;
    RealizedParams params_used;
};

/// Unit-average-power jammer waveform of the given class (NoJam: all zeros).
/// Realized parameter draws are appended to `draws`.
std::vector<std::complex<double>> jammer_waveform(JammerClass cls, std::mt19937_64& rng,
                                                  std::uint64_t length, double sample_rate,
                                                  const ClassParams& cp,
                                                  std::vector<std::pair<std::string, double>>& draws);

/// Composes r = s + j + w: unit-power circular complex Gaussian noise w, BPSK chip
/// stream s at snr_db over the noise, jammer j scaled so the measured JSR equals the
/// drawn target. Draw order: noise, chips, waveform parameters, jsr.
BasebandRecord synthesize_sample(JammerClass cls, const SignalParams& params,
                                 std::mt19937_64& rng);

/// Record i of a dataset: label i % 6, synthesized from substream (seed, i).
BasebandRecord make_record(std::uint64_t index, const SignalParams& params);

/// 6*n_per_class records in label-major interleaved order (record i has class i%6).
/// Serial reference implementation.
std::vector<BasebandRecord> generate_dataset(std::uint64_t n_per_class,
                                             const SignalParams& params);

/// Same output as generate_dataset, records synthesized in parallel.
std::vector<BasebandRecord> generate_dataset_parallel(std::uint64_t n_per_class,
                                                      const SignalParams& params);

}  // namespace frc
