#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "frc/config.hpp"
#include "frc/dataset_io.hpp"
#include "frc/esn.hpp"

namespace frc {

/// One row of the training curve: loss/accuracy are measured on the held-out
/// test set after the round's global solve.
struct RoundMetrics {
    std::uint32_t round_index = 0;
    double loss = 0.0;      // mean squared error of scores vs one-hot targets
    double accuracy = 0.0;  // fraction of argmax matches
    std::uint32_t participants = 0;
    std::uint64_t cumulative_samples = 0;
    double wall_time_ms = 0.0;
};

/// Output of run_experiment: the full metric series and the final global readout.
struct RunResult {
    std::vector<RoundMetrics> metrics;
    ReadoutWeights model;
};

/// One-hot targets, classes x samples.
Eigen::MatrixXd one_hot(const std::vector<std::uint32_t>& labels, std::uint32_t classes);

/// Loss = mean over samples and classes of (score - one_hot)^2; accuracy = fraction
/// of per-column argmax matches (ties toward the lowest index).
std::pair<double, double> evaluate(const ReadoutWeights& model, const Eigen::MatrixXd& phi,
                                   const std::vector<std::uint32_t>& labels);

/// Reservoir features for the given record ids, synthesizing each record on the fly
/// (no full dataset is ever resident). Column j belongs to record_ids[j].
/// Records are processed in parallel; the serial variant is the reference.
Eigen::MatrixXd extract_features(const ReservoirWeights& weights, const SignalParams& params,
                                 const std::vector<std::uint64_t>& record_ids);
Eigen::MatrixXd extract_features_serial(const ReservoirWeights& weights,
                                        const SignalParams& params,
                                        const std::vector<std::uint64_t>& record_ids);

/// Reservoir features for stored records, loaded per entry from a dataset directory.
Eigen::MatrixXd extract_features_dir(const ReservoirWeights& weights,
                                     const std::filesystem::path& dataset_dir,
                                     const std::vector<ManifestEntry>& entries);

/// Half-open range [lo, hi) of the t-th of `rounds` equal shards of m samples;
/// boundaries are floor(t * m / rounds), so shard sizes differ by at most 1.
std::pair<std::uint64_t, std::uint64_t> shard_range(std::uint64_t m, std::uint32_t rounds,
                                                    std::uint32_t t);

/// Full federated experiment: synthesize or load the dataset, extract features,
/// stratified 80/20 split, partition the train set, stream each client's data in
/// per-round shards, and per round run plan -> ingest -> upload -> aggregate ->
/// solve -> evaluate. Deterministic under config.seed except wall_time_ms.
RunResult run_experiment(const ExperimentConfig& config);

/// CSV with header `round,loss,accuracy,participants,cumulative_samples,wall_time_ms`;
/// loss and accuracy printed with 6 decimal places.
void write_metrics(const std::vector<RoundMetrics>& metrics, const std::filesystem::path& path);
std::vector<RoundMetrics> read_metrics(const std::filesystem::path& path);

}  // namespace frc
