#include "frc/harness.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <string>

#include "frc/error.hpp"
#include "frc/features.hpp"
#include "frc/fed.hpp"
#include "frc/partition.hpp"

namespace frc {

Eigen::MatrixXd one_hot(const std::vector<std::uint32_t>& labels, std::uint32_t classes) {
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(classes, static_cast<Eigen::Index>(labels.size()));
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] >= classes)
            throw input_error("label " + std::to_string(labels[j]) + " out of range for " +
                              std::to_string(classes) + " classes");
        y(labels[j], static_cast<Eigen::Index>(j)) = 1.0;
    }
    return y;
}

std::pair<double, double> evaluate(const ReadoutWeights& model, const Eigen::MatrixXd& phi,
                                   const std::vector<std::uint32_t>& labels) {
    if (phi.cols() == 0) throw input_error("test set is empty");
    if (static_cast<std::size_t>(phi.cols()) != labels.size())
        throw input_error("feature/label count mismatch");
    if (model.theta.cols() != phi.rows())
        throw input_error("feature dimension does not match readout columns");
    const auto classes = static_cast<std::uint32_t>(model.theta.rows());
    Eigen::MatrixXd scores = model.theta * phi;
    Eigen::MatrixXd targets = one_hot(labels, classes);
    double loss = (scores - targets).squaredNorm() /
                  (static_cast<double>(scores.rows()) * static_cast<double>(scores.cols()));
    std::uint64_t correct = 0;
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < scores.rows(); ++i)
            if (scores(i, j) > scores(best, j)) best = i;
        if (static_cast<std::uint32_t>(best) == labels[static_cast<std::size_t>(j)]) ++correct;
    }
    double accuracy = static_cast<double>(correct) / static_cast<double>(scores.cols());
    return {loss, accuracy};
}

namespace {

Eigen::VectorXd feature_of(const ReservoirWeights& weights, const BasebandRecord& record) {
    return run_sequence(weights, record_to_sequence(record).steps);
}

}  // namespace

Eigen::MatrixXd extract_features(const ReservoirWeights& weights, const SignalParams& params,
                                 const std::vector<std::uint64_t>& record_ids) {
    params.validate();
    Eigen::MatrixXd phi(weights.config.units + 1, static_cast<Eigen::Index>(record_ids.size()));
    const auto n = static_cast<std::int64_t>(record_ids.size());
    // exceptions may not escape the parallel region; capture the first and rethrow
    std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t j = 0; j < n; ++j) {
        try {
            phi.col(j) = feature_of(weights, make_record(record_ids[static_cast<std::size_t>(j)],
                                                         params));
        } catch (...) {
#pragma omp critical
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return phi;
}

Eigen::MatrixXd extract_features_serial(const ReservoirWeights& weights,
                                        const SignalParams& params,
                                        const std::vector<std::uint64_t>& record_ids) {
    params.validate();
    Eigen::MatrixXd phi(weights.config.units + 1, static_cast<Eigen::Index>(record_ids.size()));
    for (std::size_t j = 0; j < record_ids.size(); ++j)
        phi.col(static_cast<Eigen::Index>(j)) = feature_of(weights,
                                                           make_record(record_ids[j], params));
    return phi;
}

Eigen::MatrixXd extract_features_dir(const ReservoirWeights& weights,
                                     const std::filesystem::path& dataset_dir,
                                     const std::vector<ManifestEntry>& entries) {
    Eigen::MatrixXd phi(weights.config.units + 1, static_cast<Eigen::Index>(entries.size()));
    const auto n = static_cast<std::int64_t>(entries.size());
    // exceptions may not escape the parallel region; capture the first and rethrow
    std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t j = 0; j < n; ++j) {
        try {
            BasebandRecord rec;
            const auto& e = entries[static_cast<std::size_t>(j)];
            rec.samples = load_record_samples(dataset_dir, e);
            rec.label = static_cast<JammerClass>(e.class_index);
            phi.col(j) = feature_of(weights, rec);
        } catch (...) {
#pragma omp critical
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return phi;
}

std::pair<std::uint64_t, std::uint64_t> shard_range(std::uint64_t m, std::uint32_t rounds,
                                                    std::uint32_t t) {
    if (rounds < 1) throw input_error("rounds must be >= 1");
    if (t >= rounds) throw input_error("shard index out of range");
    return {t * m / rounds, (t + 1ULL) * m / rounds};
}

RunResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    auto reservoir = init_reservoir(config.to_reservoir_config());

    std::vector<std::uint32_t> labels;
    Eigen::MatrixXd phi_all;
    if (config.data_dir.empty()) {
        const std::uint64_t total = config.per_class * kNumClasses;
        labels.resize(total);
        std::vector<std::uint64_t> ids(total);
        for (std::uint64_t i = 0; i < total; ++i) {
            labels[i] = static_cast<std::uint32_t>(i % kNumClasses);
            ids[i] = i;
        }
        phi_all = extract_features(reservoir, config.to_signal_params(), ids);
    } else {
        auto entries = read_manifest(std::filesystem::path(config.data_dir) / "manifest.tsv");
        if (entries.empty()) throw input_error("dataset " + config.data_dir + " has no records");
        labels.reserve(entries.size());
        for (const auto& e : entries) labels.push_back(e.class_index);
        phi_all = extract_features_dir(reservoir, config.data_dir, entries);
    }

    auto [train_idx, test_idx] = split_train_test(labels, config.train_fraction, config.seed);
    Partition part = config.scheme == PartitionScheme::IID
                         ? partition_iid(labels, train_idx, config.n_clients, config.seed)
                         : partition_dirichlet(labels, train_idx, config.n_clients, config.alpha,
                                               config.seed);

    Eigen::MatrixXd phi_test(phi_all.rows(), static_cast<Eigen::Index>(test_idx.size()));
    std::vector<std::uint32_t> labels_test(test_idx.size());
    for (std::size_t j = 0; j < test_idx.size(); ++j) {
        phi_test.col(static_cast<Eigen::Index>(j)) =
            phi_all.col(static_cast<Eigen::Index>(test_idx[j]));
        labels_test[j] = labels[static_cast<std::size_t>(test_idx[j])];
    }

    const Eigen::Index features = phi_all.rows();
    // clients either embed their regularization share in each upload or the server
    // adds the full beta once at solve time; never both
    const double client_beta =
        config.client_side_regularization ? config.beta / config.n_clients : 0.0;
    const double server_beta = config.client_side_regularization ? 0.0 : config.beta;

    FedServer server(kNumClasses, features);
    std::vector<ClientStats> state;
    state.reserve(config.n_clients);
    for (std::uint32_t u = 0; u < config.n_clients; ++u)
        state.emplace_back(u, kNumClasses, features);

    RunResult out;
    out.metrics.reserve(config.rounds);
    for (std::uint32_t t = 0; t < config.rounds; ++t) {
        const auto tic = std::chrono::steady_clock::now();
        auto plan = plan_round(t, config.n_clients, config.fraction, config.seed);
        for (auto u : plan.participants) {
            const auto& mine = part.assignments[u];
            auto [lo, hi] = shard_range(mine.size(), config.rounds, t);
            const auto n_new = static_cast<Eigen::Index>(hi - lo);
            Eigen::MatrixXd new_phi(features, n_new);
            std::vector<std::uint32_t> new_labels(static_cast<std::size_t>(n_new));
            for (Eigen::Index j = 0; j < n_new; ++j) {
                const auto idx = mine[static_cast<std::size_t>(lo + static_cast<std::uint64_t>(j))];
                new_phi.col(j) = phi_all.col(static_cast<Eigen::Index>(idx));
                new_labels[static_cast<std::size_t>(j)] = labels[static_cast<std::size_t>(idx)];
            }
            state[u] = incremental_update(state[u], new_phi, one_hot(new_labels, kNumClasses));
            ClientStats upload = state[u];
            if (client_beta > 0.0) upload.omega.diagonal().array() += client_beta;
            server.submit(upload);
        }
        auto agg = server.aggregate_all();
        ReadoutWeights theta = solve_global(agg, server_beta);
        auto [loss, accuracy] = evaluate(theta, phi_test, labels_test);
        const auto toc = std::chrono::steady_clock::now();
        RoundMetrics m;
        m.round_index = t;
        m.loss = loss;
        m.accuracy = accuracy;
        m.participants = static_cast<std::uint32_t>(plan.participants.size());
        m.cumulative_samples = agg.total_samples;
        m.wall_time_ms = std::chrono::duration<double, std::milli>(toc - tic).count();
        out.metrics.push_back(m);
        out.model = std::move(theta);
    }

    if (!config.model_out.empty()) write_model(config.model_out, out.model);
    if (!config.metrics_out.empty()) write_metrics(out.metrics, config.metrics_out);
    return out;
}

void write_metrics(const std::vector<RoundMetrics>& metrics, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path.string() + " for writing");
    out << "round,loss,accuracy,participants,cumulative_samples,wall_time_ms\n";
    char buf[160];
    for (const auto& m : metrics) {
        std::snprintf(buf, sizeof(buf), "%u,%.6f,%.6f,%u,%llu,%.3f\n", m.round_index, m.loss,
                      m.accuracy, m.participants,
                      static_cast<unsigned long long>(m.cumulative_samples), m.wall_time_ms);
        out << buf;
    }
    if (!out) throw io_error("write failed for " + path.string());
}

std::vector<RoundMetrics> read_metrics(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string() + " for reading");
    std::string line;
    if (!std::getline(in, line) ||
        line != "round,loss,accuracy,participants,cumulative_samples,wall_time_ms")
        throw io_error("unexpected metrics header in " + path.string());
    std::vector<RoundMetrics> metrics;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        RoundMetrics m;
        unsigned long long round = 0, participants = 0, samples = 0;
        if (std::sscanf(line.c_str(), "%llu,%lf,%lf,%llu,%llu,%lf", &round, &m.loss, &m.accuracy,
                        &participants, &samples, &m.wall_time_ms) != 6)
            throw io_error("malformed metrics row in " + path.string() + ": " + line);
        m.round_index = static_cast<std::uint32_t>(round);
        m.participants = static_cast<std::uint32_t>(participants);
        m.cumulative_samples = samples;
        metrics.push_back(m);
    }
    return metrics;
}

}  // namespace frc
