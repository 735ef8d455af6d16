#pragma once

#include <cstdint>
#include <vector>

namespace frc {

enum class PartitionScheme : std::uint32_t { IID = 0, Dirichlet = 1 };

/// Assignment of sample indices to clients; every index appears exactly once and
/// every client id in 0..n_clients-1 is present (possibly empty under extreme
/// Dirichlet draws).
struct Partition {
    std::vector<std::vector<std::uint64_t>> assignments;  // client id -> sample indices
    PartitionScheme scheme = PartitionScheme::IID;
    double alpha = 0.0;  // Dirichlet concentration; unused for IID
    std::uint64_t seed = 0;

    std::uint32_t n_clients() const { return static_cast<std::uint32_t>(assignments.size()); }
};

/// Stratified split: within each class, shuffle by seed and take
/// round(train_fraction * class_count) for training. Returns (train, test) indices.
std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>> split_train_test(
    const std::vector<std::uint32_t>& labels, double train_fraction, std::uint64_t seed);

/// IID partition: within each class, shuffled round-robin deal across clients, so
/// per-class per-client counts differ by at most 1.
Partition partition_iid(const std::vector<std::uint32_t>& labels,
                        const std::vector<std::uint64_t>& indices, std::uint32_t n_clients,
                        std::uint64_t seed);

/// Non-IID partition: for each class, proportions ~ Dirichlet(alpha * 1) dealt as
/// contiguous blocks sized by largest-remainder rounding.
Partition partition_dirichlet(const std::vector<std::uint32_t>& labels,
                              const std::vector<std::uint64_t>& indices, std::uint32_t n_clients,
                              double alpha, std::uint64_t seed);

}  // namespace frc
