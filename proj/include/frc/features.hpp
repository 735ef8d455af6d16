#pragma once

#include <Eigen/Dense>
#include <string>

#include "frc/signal.hpp"

namespace frc {

/// Magnitude spectrogram in dB; row 0 is the lowest frequency (-fs/2), columns are
/// time frames in order.
struct SpectrogramImage {
    Eigen::MatrixXd pixels;  // rows = frequency, cols = time
};

/// Ordered reservoir input: step t is column t of the normalized image.
struct FeatureSequence {
    Eigen::MatrixXd steps;  // dim x n_steps, values in [0, 1]
};

inline constexpr int kStftWindow = 1024;
inline constexpr int kStftHop = 256;
inline constexpr int kStftFrames = 512;
inline constexpr double kDbFloor = -120.0;

/// 1024-point Hann STFT at hop 256, first 512 frames. The full two-sided spectrum is
/// centered (lowest frequency first) and adjacent bin pairs are power-averaged down
/// to 512 rows, so both negative and positive offsets stay visible. Output 512x512,
/// dB with a -120 dB floor.
SpectrogramImage spectrogram(const BasebandRecord& record);

/// Exact 2x downsize with half-pixel centers; each output pixel is the mean of its
/// 2x2 source block. Throws config_error for anything but an exact 2x reduction.
SpectrogramImage resize_bilinear(const SpectrogramImage& image);

/// Per-image min-max normalization to [0,1] (constant image maps to all zeros), then
/// columns become the time-ordered sequence of input vectors.
FeatureSequence normalize_and_sequence(const SpectrogramImage& image);

/// Full per-record pipeline: spectrogram -> 2x resize -> normalized sequence.
FeatureSequence record_to_sequence(const BasebandRecord& record);

/// Debug dump as an 8-bit binary portable graymap, row 0 = lowest frequency.
void write_pgm(const SpectrogramImage& image, const std::string& path);

}  // namespace frc
