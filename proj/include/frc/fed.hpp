#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

#include "frc/esn.hpp"

namespace frc {

/// Sufficient statistics one client exchanges with the server: the cross-moment
/// gamma = Y_u Phi_u^T and the raw feature moment omega = Phi_u Phi_u^T.
/// Regularization is added once, server side, at solve time.
struct ClientStats {
    Eigen::MatrixXd gamma;  // classes x features
    Eigen::MatrixXd omega;  // features x features
    std::uint64_t sample_count = 0;
    std::uint32_t client_id = 0;

    ClientStats() = default;
    /// Zero statistics of the given shape (a client that has seen no data yet).
    ClientStats(std::uint32_t client_id, Eigen::Index classes, Eigen::Index features);
};

/// Server-side sum of client statistics plus contributor bookkeeping
/// (client id -> version of its last accepted upload).
struct AggregateStats {
    Eigen::MatrixXd gamma;  // classes x features
    Eigen::MatrixXd omega;  // features x features
    std::uint64_t total_samples = 0;
    std::map<std::uint32_t, std::uint64_t> contributors;
};

/// Which clients take part in a given round.
struct RoundPlan {
    std::uint64_t round_index = 0;
    std::vector<std::uint32_t> participants;  // sorted ascending
    double fraction = 1.0;
};

/// Feature moment phi phi^T computed one output row per task (upper triangle,
/// mirrored). The serial path runs the identical per-row arithmetic, so parallel
/// and serial results are bitwise equal regardless of thread count.
Eigen::MatrixXd feature_moment(const Eigen::MatrixXd& phi, bool parallel);

/// gamma = y_u phi_u^T, omega = phi_u phi_u^T over this client's local columns.
ClientStats client_stats(const Eigen::MatrixXd& phi_u, const Eigen::MatrixXd& y_u,
                         std::uint32_t client_id);

/// Serial reference for client_stats; bitwise-identical output.
ClientStats client_stats_serial(const Eigen::MatrixXd& phi_u, const Eigen::MatrixXd& y_u,
                                std::uint32_t client_id);

/// Folds a new batch of columns into existing statistics:
/// gamma += y phi^T, omega += phi phi^T, sample_count += columns.
ClientStats incremental_update(const ClientStats& prev, const Eigen::MatrixXd& new_phi,
                               const Eigen::MatrixXd& new_y);

/// Elementwise sums after a canonical sort by ascending client_id, making the
/// result bitwise independent of input order. Duplicate or dimension-mismatched
/// client ids raise protocol_error naming the offender.
AggregateStats aggregate(const std::vector<ClientStats>& stats);

/// theta = gamma (omega + beta I)^{-1}; identical contract to solve_readout on
/// the pooled data that produced the aggregate.
ReadoutWeights solve_global(const AggregateStats& agg, double beta);

/// Uniformly samples max(1, round(fraction * total_clients)) distinct clients
/// for round `round_index`, deterministically from (seed, round_index).
RoundPlan plan_round(std::uint64_t round_index, std::uint32_t total_clients, double fraction,
                     std::uint64_t seed);

/// Holds the last uploaded statistics snapshot per client. An upload replaces the
/// client's previous contribution (full-state upload, not a delta), so a lost or
/// repeated round cannot corrupt the aggregate.
class FedServer {
public:
    FedServer(Eigen::Index classes, Eigen::Index features);

    /// Replaces the stored snapshot for stats.client_id and bumps its version.
    /// Dimension mismatch raises protocol_error naming the client.
    void submit(const ClientStats& stats);

    /// Re-sums all stored snapshots in canonical client_id order.
    AggregateStats aggregate_all() const;

    /// Convenience: aggregate_all then solve_global.
    ReadoutWeights solve(double beta) const;

    Eigen::Index classes() const { return classes_; }
    Eigen::Index features() const { return features_; }

private:
    Eigen::Index classes_;
    Eigen::Index features_;
    std::map<std::uint32_t, ClientStats> snapshots_;
    std::map<std::uint32_t, std::uint64_t> versions_;
};

}  // namespace frc
