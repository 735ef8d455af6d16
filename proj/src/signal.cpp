#include "frc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include "frc/error.hpp"
#include "frc/rng.hpp"

namespace frc {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double mean_power(const std::vector<cplx>& x) {
    double p = 0.0;
    for (const auto& v : x) p += std::norm(v);
    return x.empty() ? 0.0 : p / static_cast<double>(x.size());
}

void scale_to_unit_power(std::vector<cplx>& x) {
    double p = mean_power(x);
    if (p > 0.0) {
        double s = 1.0 / std::sqrt(p);
        for (auto& v : x) v *= s;
    }
}

std::vector<cplx> wave_am(std::mt19937_64& rng, std::uint64_t n, double fs,
                          const ClassParams& cp,
                          std::vector<std::pair<std::string, double>>& draws) {
    double f0 = uniform(rng, cp.tone_offset_min, cp.tone_offset_max) * fs;
    double m = uniform(rng, cp.am_depth_min, cp.am_depth_max);
    double fm = uniform(rng, cp.am_modf_min, cp.am_modf_max);
    draws.emplace_back("f0_hz", f0);
    draws.emplace_back("mod_depth", m);
    draws.emplace_back("mod_freq_hz", fm);
    std::vector<cplx> x(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / fs;
        double env = 1.0 + m * std::cos(2.0 * kPi * fm * t);
        x[i] = env * std::polar(1.0, 2.0 * kPi * f0 * t);
    }
    return x;
}

std::vector<cplx> wave_chirp(std::mt19937_64& rng, std::uint64_t n, double fs,
                             const ClassParams& cp,
                             std::vector<std::pair<std::string, double>>& draws) {
    double bw = uniform(rng, cp.chirp_bw_min, cp.chirp_bw_max);
    double period = uniform(rng, cp.chirp_period_min, cp.chirp_period_max);
    draws.emplace_back("bandwidth_hz", bw);
    draws.emplace_back("sweep_period_s", period);
    std::vector<cplx> x(n);
    double phase = 0.0;  // accumulated instantaneous frequency keeps the sawtooth continuous
    for (std::uint64_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / fs;
        double tau = std::fmod(t, period);
        double finst = -bw / 2.0 + bw * tau / period;
        phase += 2.0 * kPi * finst / fs;
        x[i] = std::polar(1.0, phase);
    }
    return x;
}

std::vector<cplx> wave_fm(std::mt19937_64& rng, std::uint64_t n, double fs,
                          const ClassParams& cp,
                          std::vector<std::pair<std::string, double>>& draws) {
    double f0 = uniform(rng, cp.tone_offset_min, cp.tone_offset_max) * fs;
    double dev = uniform(rng, cp.fm_dev_min, cp.fm_dev_max);
    double fm = uniform(rng, cp.fm_modf_min, cp.fm_modf_max);
    draws.emplace_back("f0_hz", f0);
    draws.emplace_back("freq_dev_hz", dev);
    draws.emplace_back("mod_freq_hz", fm);
    std::vector<cplx> x(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / fs;
        double phase = 2.0 * kPi * f0 * t + (dev / fm) * std::sin(2.0 * kPi * fm * t);
        x[i] = std::polar(1.0, phase);
    }
    return x;
}

std::vector<cplx> wave_dme(std::mt19937_64& rng, std::uint64_t n, double fs,
                           const ClassParams& cp,
                           std::vector<std::pair<std::string, double>>& draws) {
    double f0 = uniform(rng, cp.tone_offset_min, cp.tone_offset_max) * fs;
    double rate = uniform(rng, cp.dme_rate_min, cp.dme_rate_max);
    draws.emplace_back("f0_hz", f0);
    draws.emplace_back("pulse_rate_hz", rate);
    // standard DME pulse: Gaussian, 3.5 us half-power width, pairs 12 us apart
    const double sigma = 1.75e-6 / std::sqrt(std::log(2.0));
    const double period = 1.0 / rate;
    const double t_end = static_cast<double>(n) / fs;
    double tc = uniform(rng, 0.0, period);
    draws.emplace_back("first_pulse_s", tc);
    std::vector<double> env(n, 0.0);
    while (tc - 6.0 * sigma < t_end) {
        for (double d : {0.0, 12e-6}) {
            double c = tc + d;
            auto i0 = static_cast<std::int64_t>((c - 6.0 * sigma) * fs);
            auto i1 = static_cast<std::int64_t>((c + 6.0 * sigma) * fs);
            i0 = std::max<std::int64_t>(i0, 0);
            i1 = std::min<std::int64_t>(i1, static_cast<std::int64_t>(n));
            for (std::int64_t i = i0; i < i1; ++i) {
                double dt = static_cast<double>(i) / fs - c;
                env[static_cast<std::uint64_t>(i)] += std::exp(-dt * dt / (2.0 * sigma * sigma));
            }
        }
        tc += period;
    }
    std::vector<cplx> x(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / fs;
        x[i] = env[i] * std::polar(1.0, 2.0 * kPi * f0 * t);
    }
    return x;
}

std::vector<cplx> wave_nb(std::mt19937_64& rng, std::uint64_t n, double fs,
                          const ClassParams& cp,
                          std::vector<std::pair<std::string, double>>& draws) {
    double bw = uniform(rng, cp.nb_bw_min, cp.nb_bw_max);
    double f0 = uniform(rng, cp.tone_offset_min, cp.tone_offset_max) * fs;
    draws.emplace_back("bandwidth_hz", bw);
    draws.emplace_back("f0_hz", f0);
    std::vector<cplx> white(n);
    for (auto& v : white) {
        double re, im;
        normal_pair(rng, re, im);
        v = cplx(re, im) / std::sqrt(2.0);
    }
    // windowed-sinc lowpass (Blackman window, cutoff bw/2), odd tap count
    auto ntaps = static_cast<std::uint64_t>(std::ceil(6.6 * fs / bw)) | 1ULL;
    ntaps = std::min<std::uint64_t>(ntaps, 20001);
    const double fc = bw / 2.0 / fs;
    const double mid = static_cast<double>(ntaps - 1) / 2.0;
    std::vector<double> h(ntaps);
    for (std::uint64_t k = 0; k < ntaps; ++k) {
        double arg = 2.0 * fc * (static_cast<double>(k) - mid);
        double sinc = arg == 0.0 ? 1.0 : std::sin(kPi * arg) / (kPi * arg);
        double r = static_cast<double>(k) / static_cast<double>(ntaps - 1);
        double win = 0.42 - 0.5 * std::cos(2.0 * kPi * r) + 0.08 * std::cos(4.0 * kPi * r);
        h[k] = 2.0 * fc * sinc * win;
    }
    // "same"-aligned direct convolution (zero padding outside the record)
    std::vector<cplx> y(n);
    const auto half = static_cast<std::int64_t>((ntaps - 1) / 2);
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        cplx acc(0.0, 0.0);
        std::int64_t k0 = std::max<std::int64_t>(0, i + half - static_cast<std::int64_t>(n) + 1);
        std::int64_t k1 = std::min<std::int64_t>(static_cast<std::int64_t>(ntaps) - 1, i + half);
        for (std::int64_t k = k0; k <= k1; ++k)
            acc += h[static_cast<std::uint64_t>(k)] * white[static_cast<std::uint64_t>(i + half - k)];
        y[static_cast<std::uint64_t>(i)] = acc;
    }
    for (std::uint64_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / fs;
        y[i] *= std::polar(1.0, 2.0 * kPi * f0 * t);
    }
    return y;
}

}  // namespace

const char* class_name(JammerClass c) {
    switch (c) {
        case JammerClass::AM: return "AM";
        case JammerClass::Chirp: return "Chirp";
        case JammerClass::FM: return "FM";
        case JammerClass::PulseDME: return "PulseDME";
        case JammerClass::Narrowband: return "Narrowband";
        case JammerClass::NoJam: return "NoJam";
    }
    throw input_error("invalid jammer class");
}

void SignalParams::validate() const {
    if (sample_rate <= 0.0) throw config_error("sample_rate must be > 0");
    if (duration_samples < 1024) throw config_error("duration_samples must be >= 1024");
    if (jsr_db_min <= 0.0) throw config_error("jsr_db_min must be > 0 dB");
    if (jsr_db_max < jsr_db_min) throw config_error("jsr_db_max must be >= jsr_db_min");
    auto range_ok = [](double lo, double hi) { return lo <= hi; };
    const auto& cp = class_params;
    if (!range_ok(cp.tone_offset_min, cp.tone_offset_max) ||
        !range_ok(cp.am_depth_min, cp.am_depth_max) ||
        !range_ok(cp.am_modf_min, cp.am_modf_max) ||
        !range_ok(cp.chirp_bw_min, cp.chirp_bw_max) ||
        !range_ok(cp.chirp_period_min, cp.chirp_period_max) ||
        !range_ok(cp.fm_dev_min, cp.fm_dev_max) ||
        !range_ok(cp.fm_modf_min, cp.fm_modf_max) ||
        !range_ok(cp.dme_rate_min, cp.dme_rate_max) ||
        !range_ok(cp.nb_bw_min, cp.nb_bw_max))
        throw config_error("class parameter range has min > max");
    if (cp.chirp_bw_min <= 0 || cp.chirp_period_min <= 0 || cp.fm_dev_min <= 0 ||
        cp.fm_modf_min <= 0 || cp.am_modf_min <= 0 || cp.dme_rate_min <= 0 || cp.nb_bw_min <= 0)
        throw config_error("class waveform parameters must be positive");
}

std::vector<std::complex<double>> jammer_waveform(JammerClass cls, std::mt19937_64& rng,
                                                  std::uint64_t length, double sample_rate,
                                                  const ClassParams& cp,
                                                  std::vector<std::pair<std::string, double>>& draws) {
    if (length < 1) throw input_error("waveform length must be >= 1");
    std::vector<cplx> x;
    switch (cls) {
        case JammerClass::AM: x = wave_am(rng, length, sample_rate, cp, draws); break;
        case JammerClass::Chirp: x = wave_chirp(rng, length, sample_rate, cp, draws); break;
        case JammerClass::FM: x = wave_fm(rng, length, sample_rate, cp, draws); break;
        case JammerClass::PulseDME: x = wave_dme(rng, length, sample_rate, cp, draws); break;
        case JammerClass::Narrowband: x = wave_nb(rng, length, sample_rate, cp, draws); break;
        case JammerClass::NoJam: return std::vector<cplx>(length, cplx(0.0, 0.0));
    }
    scale_to_unit_power(x);
    return x;
}

BasebandRecord synthesize_sample(JammerClass cls, const SignalParams& params,
                                 std::mt19937_64& rng) {
    params.validate();
    const auto n = params.duration_samples;
    const double fs = params.sample_rate;
    BasebandRecord rec;
    rec.label = cls;
    rec.samples.resize(n);
    // unit-power circular complex white noise
    for (auto& v : rec.samples) {
        double re, im;
        normal_pair(rng, re, im);
        v = cplx(re, im) / std::sqrt(2.0);
    }
    // BPSK chips at 1.023 Mcps, sample-and-hold, scaled to snr_db over the unit noise
    const double chip_rate = 1.023e6;
    const auto n_chips = static_cast<std::uint64_t>(
                             std::ceil(static_cast<double>(n) * chip_rate / fs)) + 1;
    std::vector<double> chips(n_chips);
    for (auto& c : chips) c = uniform01(rng) < 0.5 ? -1.0 : 1.0;
    const double amp = std::pow(10.0, params.snr_db / 20.0);
    double signal_power = 0.0;
    std::vector<double> s(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        auto k = static_cast<std::uint64_t>(static_cast<double>(i) * (chip_rate / fs));
        s[i] = chips[k] * amp;
        signal_power += s[i] * s[i];
    }
    signal_power /= static_cast<double>(n);
    for (std::uint64_t i = 0; i < n; ++i) rec.samples[i] += s[i];
    if (cls == JammerClass::NoJam) {
        rec.params_used.jsr_db = 0.0;
        return rec;
    }
    auto j = jammer_waveform(cls, rng, n, fs, params.class_params, rec.params_used.draws);
    double jsr = uniform(rng, params.jsr_db_min, params.jsr_db_max);
    rec.params_used.jsr_db = jsr;
    double jammer_power = mean_power(j);
    if (jammer_power <= 0.0) throw numeric_error("jammer waveform has zero power");
    double scale = std::sqrt(std::pow(10.0, jsr / 10.0) * signal_power / jammer_power);
    for (std::uint64_t i = 0; i < n; ++i) rec.samples[i] += scale * j[i];
    return rec;
}

BasebandRecord make_record(std::uint64_t index, const SignalParams& params) {
    auto rng = substream(params.seed, index);
    auto cls = static_cast<JammerClass>(index % kNumClasses);
    return synthesize_sample(cls, params, rng);
}

std::vector<BasebandRecord> generate_dataset(std::uint64_t n_per_class,
                                             const SignalParams& params) {
    if (n_per_class < 1) throw input_error("n_per_class must be >= 1");
    params.validate();
    std::vector<BasebandRecord> out(n_per_class * kNumClasses);
    for (std::uint64_t i = 0; i < out.size(); ++i) out[i] = make_record(i, params);
    return out;
}

std::vector<BasebandRecord> generate_dataset_parallel(std::uint64_t n_per_class,
                                                      const SignalParams& params) {
    if (n_per_class < 1) throw input_error("n_per_class must be >= 1");
    params.validate();
    std::vector<BasebandRecord> out(n_per_class * kNumClasses);
    const auto total = static_cast<std::int64_t>(out.size());
    // exceptions may not escape the parallel region; capture the first and rethrow
    std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < total; ++i) {
        try {
            out[static_cast<std::uint64_t>(i)] = make_record(static_cast<std::uint64_t>(i),
                                                             params);
        } catch (...) {
#pragma omp critical
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

}  // namespace frc
