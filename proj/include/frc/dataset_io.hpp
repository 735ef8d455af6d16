#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "frc/esn.hpp"
#include "frc/fed.hpp"
#include "frc/partition.hpp"
#include "frc/signal.hpp"

namespace frc {

/// One row of a dataset manifest; `file` is relative to the dataset directory.
struct ManifestEntry {
    std::uint64_t record_id = 0;
    std::uint32_t class_index = 0;
    std::string class_name;
    double jsr_db = 0.0;
    std::string file;
};

/// Complex baseband samples as magic "FRCB", u32 length, interleaved re/im
/// float32 little-endian.
void write_baseband(const std::filesystem::path& path,
                    const std::vector<std::complex<double>>& samples);
std::vector<std::complex<double>> read_baseband(const std::filesystem::path& path);

/// Tab-separated manifest with a header row; jsr_db printed with 6 decimals.
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// Generates 6*n_per_class records and writes them under dir/records/ plus
/// dir/manifest.tsv. Synthesis runs in parallel chunks; files are written
/// serially so the layout is deterministic. Returns the manifest.
std::vector<ManifestEntry> write_dataset(const std::filesystem::path& dir,
                                         std::uint64_t n_per_class, const SignalParams& params);

/// Loads one record's samples given its manifest entry.
std::vector<std::complex<double>> load_record_samples(const std::filesystem::path& dataset_dir,
                                                      const ManifestEntry& entry);

/// Client statistics wire format: magic "FRCS", version u16 (=1), client_id u32,
/// classes u32, features u32, sample_count u64, gamma then omega row-major float64.
void write_client_stats(const std::filesystem::path& path, const ClientStats& stats);
ClientStats read_client_stats(const std::filesystem::path& path);

/// Readout model file: magic "FRCM", classes u32, features u32, theta row-major float64.
void write_model(const std::filesystem::path& path, const ReadoutWeights& model);
ReadoutWeights read_model(const std::filesystem::path& path);

/// Partition export: TSV of (client_id, sample_index) with a header row,
/// clients ascending, each client's samples in assignment order.
void write_partition_tsv(const std::filesystem::path& path, const Partition& partition);
std::vector<std::pair<std::uint32_t, std::uint64_t>> read_partition_tsv(
    const std::filesystem::path& path);

}  // namespace frc
