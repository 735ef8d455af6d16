#include "frc/features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "frc/error.hpp"

namespace frc {

namespace {

// FFTW plan creation is not thread-safe; execution on distinct buffers is. One
// process-wide 1024-point plan is created lazily (thread-safe magic static) and
// shared by all threads via the new-array execute interface.
class FftEngine {
  public:
    static FftEngine& instance() {
        static FftEngine engine;
        return engine;
    }

    // in/out must come from fftw_malloc so alignment matches the plan.
    void forward(fftw_complex* in, fftw_complex* out) { fftw_execute_dft(plan_, in, out); }

  private:
    FftEngine() {
        auto* buf = static_cast<fftw_complex*>(
            fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(kStftWindow)));
        auto* buf2 = static_cast<fftw_complex*>(
            fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(kStftWindow)));
        plan_ = fftw_plan_dft_1d(kStftWindow, buf, buf2, FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_free(buf);
        fftw_free(buf2);
    }
    ~FftEngine() { fftw_destroy_plan(plan_); }
    fftw_plan plan_;
};

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {}
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
};

}  // namespace

SpectrogramImage spectrogram(const BasebandRecord& record) {
    const std::size_t required = static_cast<std::size_t>(kStftWindow) +
                                 static_cast<std::size_t>(kStftFrames - 1) * kStftHop;
    if (record.samples.size() < required)
        throw input_error("record too short for spectrogram: need " + std::to_string(required) +
                          " samples, got " + std::to_string(record.samples.size()));
    std::vector<double> window(kStftWindow);
    for (int i = 0; i < kStftWindow; ++i)
        window[static_cast<std::size_t>(i)] =
            0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / kStftWindow);
    const int half = kStftWindow / 2;  // 512 output rows after pair averaging
    SpectrogramImage img;
    img.pixels.resize(half, kStftFrames);
    FftwBuffer in(kStftWindow), out(kStftWindow);
    for (int f = 0; f < kStftFrames; ++f) {
        const std::size_t base = static_cast<std::size_t>(f) * kStftHop;
        for (int i = 0; i < kStftWindow; ++i) {
            const auto& s = record.samples[base + static_cast<std::size_t>(i)];
            in.data[i][0] = s.real() * window[static_cast<std::size_t>(i)];
            in.data[i][1] = s.imag() * window[static_cast<std::size_t>(i)];
        }
        FftEngine::instance().forward(in.data, out.data);
        for (int p = 0; p < half; ++p) {
            // centered order: shifted index s corresponds to FFT bin (s + N/2) mod N
            int b0 = (2 * p + half) % kStftWindow;
            int b1 = (2 * p + 1 + half) % kStftWindow;
            double pw0 = out.data[b0][0] * out.data[b0][0] + out.data[b0][1] * out.data[b0][1];
            double pw1 = out.data[b1][0] * out.data[b1][0] + out.data[b1][1] * out.data[b1][1];
            double power = 0.5 * (pw0 + pw1);
            double db = 10.0 * std::log10(std::max(power, 1e-300));
            img.pixels(p, f) = std::max(db, kDbFloor);
        }
    }
    return img;
}

SpectrogramImage resize_bilinear(const SpectrogramImage& image) {
    const auto rows = image.pixels.rows();
    const auto cols = image.pixels.cols();
    if (rows % 2 != 0 || cols % 2 != 0 || rows < 2 || cols < 2)
        throw config_error("resize supports only an exact 2x reduction of even dimensions");
    SpectrogramImage out;
    out.pixels.resize(rows / 2, cols / 2);
    for (Eigen::Index j = 0; j < cols / 2; ++j)
        for (Eigen::Index i = 0; i < rows / 2; ++i)
            out.pixels(i, j) = 0.25 * (image.pixels(2 * i, 2 * j) + image.pixels(2 * i + 1, 2 * j) +
                                       image.pixels(2 * i, 2 * j + 1) +
                                       image.pixels(2 * i + 1, 2 * j + 1));
    return out;
}

FeatureSequence normalize_and_sequence(const SpectrogramImage& image) {
    if (!image.pixels.allFinite()) throw input_error("spectrogram contains non-finite pixels");
    const double lo = image.pixels.minCoeff();
    const double hi = image.pixels.maxCoeff();
    FeatureSequence seq;
    if (hi == lo) {
        seq.steps = Eigen::MatrixXd::Zero(image.pixels.rows(), image.pixels.cols());
    } else {
        seq.steps = (image.pixels.array() - lo) / (hi - lo);
    }
    return seq;
}

FeatureSequence record_to_sequence(const BasebandRecord& record) {
    return normalize_and_sequence(resize_bilinear(spectrogram(record)));
}

void write_pgm(const SpectrogramImage& image, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (fp == nullptr) throw io_error("cannot open " + path + " for writing");
    const double lo = image.pixels.minCoeff();
    const double hi = image.pixels.maxCoeff();
    const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
    std::fprintf(fp, "P5\n%ld %ld\n255\n", static_cast<long>(image.pixels.cols()),
                 static_cast<long>(image.pixels.rows()));
    for (Eigen::Index i = 0; i < image.pixels.rows(); ++i) {
        for (Eigen::Index j = 0; j < image.pixels.cols(); ++j) {
            auto v = static_cast<unsigned char>((image.pixels(i, j) - lo) * scale + 0.5);
            std::fputc(v, fp);
        }
    }
    if (std::fclose(fp) != 0) throw io_error("failed writing " + path);
}

}  // namespace frc
