#include "frc/fed.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "frc/error.hpp"
#include "frc/rng.hpp"

namespace frc {

namespace {

constexpr std::uint64_t kRoundStream = 0x524F554E44000000ULL;

void check_dims(const ClientStats& s, Eigen::Index classes, Eigen::Index features) {
    if (s.gamma.rows() != classes || s.gamma.cols() != features || s.omega.rows() != features ||
        s.omega.cols() != features)
        throw protocol_error("client " + std::to_string(s.client_id) +
                             " statistics have mismatched dimensions");
}

}  // namespace

ClientStats::ClientStats(std::uint32_t client_id, Eigen::Index classes, Eigen::Index features)
    : gamma(Eigen::MatrixXd::Zero(classes, features)),
      omega(Eigen::MatrixXd::Zero(features, features)),
      sample_count(0),
      client_id(client_id) {}

Eigen::MatrixXd feature_moment(const Eigen::MatrixXd& phi, bool parallel) {
    const Eigen::Index f = phi.rows();
    // transpose once so each feature's samples are a contiguous column
    Eigen::MatrixXd phit = phi.transpose();
    Eigen::MatrixXd omega(f, f);
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
    for (Eigen::Index i = 0; i < f; ++i) {
        for (Eigen::Index j = i; j < f; ++j) {
            double v = phit.col(i).dot(phit.col(j));
            omega(i, j) = v;
            omega(j, i) = v;
        }
    }
    return omega;
}

ClientStats client_stats(const Eigen::MatrixXd& phi_u, const Eigen::MatrixXd& y_u,
                         std::uint32_t client_id) {
    if (phi_u.cols() != y_u.cols())
        throw input_error("phi has " + std::to_string(phi_u.cols()) + " samples but y has " +
                          std::to_string(y_u.cols()));
    ClientStats s;
    s.client_id = client_id;
    s.gamma.noalias() = y_u * phi_u.transpose();
    s.omega = feature_moment(phi_u, true);
    s.sample_count = static_cast<std::uint64_t>(phi_u.cols());
    return s;
}

ClientStats client_stats_serial(const Eigen::MatrixXd& phi_u, const Eigen::MatrixXd& y_u,
                                std::uint32_t client_id) {
    if (phi_u.cols() != y_u.cols())
        throw input_error("phi has " + std::to_string(phi_u.cols()) + " samples but y has " +
                          std::to_string(y_u.cols()));
    ClientStats s;
    s.client_id = client_id;
    s.gamma.noalias() = y_u * phi_u.transpose();
    s.omega = feature_moment(phi_u, false);
    s.sample_count = static_cast<std::uint64_t>(phi_u.cols());
    return s;
}

ClientStats incremental_update(const ClientStats& prev, const Eigen::MatrixXd& new_phi,
                               const Eigen::MatrixXd& new_y) {
    if (new_phi.cols() != new_y.cols())
        throw input_error("phi has " + std::to_string(new_phi.cols()) + " samples but y has " +
                          std::to_string(new_y.cols()));
    if (new_phi.rows() != prev.omega.rows() || new_y.rows() != prev.gamma.rows())
        throw input_error("batch dimensions do not match existing statistics of client " +
                          std::to_string(prev.client_id));
    ClientStats s = prev;
    if (new_phi.cols() == 0) return s;
    s.gamma.noalias() += new_y * new_phi.transpose();
    s.omega += feature_moment(new_phi, true);
    s.sample_count += static_cast<std::uint64_t>(new_phi.cols());
    return s;
}

AggregateStats aggregate(const std::vector<ClientStats>& stats) {
    if (stats.empty()) throw input_error("cannot aggregate an empty client list");
    std::vector<const ClientStats*> order;
    order.reserve(stats.size());
    for (const auto& s : stats) order.push_back(&s);
    std::sort(order.begin(), order.end(), [](const ClientStats* a, const ClientStats* b) {
        return a->client_id < b->client_id;
    });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (order[i]->client_id == order[i - 1]->client_id)
            throw protocol_error("duplicate statistics for client " +
                                 std::to_string(order[i]->client_id));
    const Eigen::Index classes = order.front()->gamma.rows();
    const Eigen::Index features = order.front()->omega.rows();
    AggregateStats agg;
    agg.gamma = Eigen::MatrixXd::Zero(classes, features);
    agg.omega = Eigen::MatrixXd::Zero(features, features);
    for (const auto* s : order) {
        check_dims(*s, classes, features);
        agg.gamma += s->gamma;
        agg.omega += s->omega;
        agg.total_samples += s->sample_count;
        agg.contributors[s->client_id] = 1;
    }
    return agg;
}

ReadoutWeights solve_global(const AggregateStats& agg, double beta) {
    ReadoutWeights out;
    out.theta = solve_normal_equations(agg.omega, agg.gamma, beta);
    return out;
}

RoundPlan plan_round(std::uint64_t round_index, std::uint32_t total_clients, double fraction,
                     std::uint64_t seed) {
    if (total_clients < 1) throw input_error("total_clients must be >= 1");
    if (!(fraction > 0.0) || fraction > 1.0) throw input_error("fraction must be in (0, 1]");
    auto count = static_cast<std::uint32_t>(std::clamp<long long>(
        std::llround(fraction * static_cast<double>(total_clients)), 1, total_clients));
    auto rng = substream(seed, kRoundStream + round_index);
    auto picks = sample_without_replacement(rng, total_clients, count);
    RoundPlan plan;
    plan.round_index = round_index;
    plan.fraction = fraction;
    plan.participants.reserve(picks.size());
    for (auto p : picks) plan.participants.push_back(static_cast<std::uint32_t>(p));
    return plan;
}

FedServer::FedServer(Eigen::Index classes, Eigen::Index features)
    : classes_(classes), features_(features) {
    if (classes < 1 || features < 1)
        throw input_error("server dimensions must be positive");
}

void FedServer::submit(const ClientStats& stats) {
    check_dims(stats, classes_, features_);
    snapshots_[stats.client_id] = stats;
    ++versions_[stats.client_id];
}

AggregateStats FedServer::aggregate_all() const {
    AggregateStats agg;
    agg.gamma = Eigen::MatrixXd::Zero(classes_, features_);
    agg.omega = Eigen::MatrixXd::Zero(features_, features_);
    // std::map iterates in ascending client_id order, the canonical summation order
    for (const auto& [id, s] : snapshots_) {
        agg.gamma += s.gamma;
        agg.omega += s.omega;
        agg.total_samples += s.sample_count;
        agg.contributors[id] = versions_.at(id);
    }
    return agg;
}

ReadoutWeights FedServer::solve(double beta) const {
    return solve_global(aggregate_all(), beta);
}

}  // namespace frc
