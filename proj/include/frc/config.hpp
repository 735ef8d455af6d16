#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "frc/esn.hpp"
#include "frc/partition.hpp"
#include "frc/signal.hpp"

namespace frc {

/// Everything one experiment run needs, loadable from a flat `key = value` file.
/// Key names equal field names; signal and reservoir settings are flattened in.
struct ExperimentConfig {
    // signal synthesis
    double sample_rate = 10e6;
    std::uint64_t duration_samples = 132096;
    double snr_db = -20.0;
    double jsr_db_min = 10.0;
    double jsr_db_max = 50.0;
    ClassParams class_params;

    // reservoir
    std::uint32_t units = 500;
    double spectral_radius = 0.1;
    double leaking_rate = 0.1;
    double input_scaling = 0.1;
    std::uint32_t input_connectivity = 3;
    std::uint32_t recurrent_connectivity = 8;
    std::uint32_t washout = 16;

    // experiment
    std::uint64_t per_class = 500;      // records per class when synthesizing
    double beta = 1e-2;
    std::uint32_t n_clients = 10;
    double fraction = 0.9;
    std::uint32_t rounds = 50;
    PartitionScheme scheme = PartitionScheme::Dirichlet;
    double alpha = 0.1;
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    bool client_side_regularization = false;
    std::string data_dir;    // nonempty: load records from this dataset directory
    std::string metrics_out;  // optional CSV destination
    std::string model_out;    // optional model destination

    /// Throws config_error on any invalid field combination.
    void validate() const;

    SignalParams to_signal_params() const;
    ReservoirConfig to_reservoir_config() const;
};

/// Parses a flat `key = value` file: `#` starts a comment, blank lines are
/// skipped, unknown or repeated keys raise config_error.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Same grammar from an in-memory string (file loading is a thin wrapper).
ExperimentConfig parse_config(const std::string& text);

}  // namespace frc
