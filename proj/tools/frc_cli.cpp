#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "frc/config.hpp"
#include "frc/dataset_io.hpp"
#include "frc/error.hpp"
#include "frc/harness.hpp"
#include "frc/partition.hpp"

namespace {

int cmd_generate(const std::string& out_dir, std::uint64_t per_class, std::uint64_t seed) {
    frc::SignalParams params;
    params.seed = seed;
    auto entries = frc::write_dataset(out_dir, per_class, params);
    std::cout << "wrote " << entries.size() << " records to " << out_dir << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& metrics_path) {
    auto config = frc::load_config(config_path);
    if (!metrics_path.empty()) config.metrics_out = metrics_path;
    auto result = frc::run_experiment(config);
    const auto& last = result.metrics.back();
    std::cout << "rounds: " << result.metrics.size() << "\n"
              << "final_loss: " << last.loss << "\n"
              << "final_accuracy: " << last.accuracy << "\n";
    if (!config.metrics_out.empty())
        std::cout << "metrics: " << config.metrics_out << "\n";
    if (!config.model_out.empty()) std::cout << "model: " << config.model_out << "\n";
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& data_dir,
                 const std::string& config_path) {
    frc::ExperimentConfig config;
    if (!config_path.empty()) config = frc::load_config(config_path);
    auto model = frc::read_model(model_path);
    auto entries = frc::read_manifest(std::filesystem::path(data_dir) / "manifest.tsv");
    if (entries.empty()) throw frc::input_error("dataset " + data_dir + " has no records");
    auto reservoir = frc::init_reservoir(config.to_reservoir_config());
    auto phi = frc::extract_features_dir(reservoir, data_dir, entries);
    std::vector<std::uint32_t> labels;
    labels.reserve(entries.size());
    for (const auto& e : entries) labels.push_back(e.class_index);
    auto [loss, accuracy] = frc::evaluate(model, phi, labels);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "samples: %zu\nloss: %.6f\naccuracy: %.6f\n", labels.size(),
                  loss, accuracy);
    std::cout << buf;
    return 0;
}

int cmd_partition(const std::string& data_dir, const std::string& scheme, double alpha,
                  std::uint32_t clients, const std::string& out_path, std::uint64_t seed) {
    auto entries = frc::read_manifest(std::filesystem::path(data_dir) / "manifest.tsv");
    if (entries.empty()) throw frc::input_error("dataset " + data_dir + " has no records");
    std::vector<std::uint32_t> labels;
    labels.reserve(entries.size());
    for (const auto& e : entries) labels.push_back(e.class_index);
    std::vector<std::uint64_t> indices(labels.size());
    for (std::uint64_t i = 0; i < indices.size(); ++i) indices[i] = i;
    frc::Partition part;
    if (scheme == "iid")
        part = frc::partition_iid(labels, indices, clients, seed);
    else if (scheme == "dirichlet")
        part = frc::partition_dirichlet(labels, indices, clients, alpha, seed);
    else
        throw frc::config_error("scheme must be iid or dirichlet, got '" + scheme + "'");
    frc::write_partition_tsv(out_path, part);
    std::cout << "wrote partition of " << labels.size() << " samples over " << clients
              << " clients to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated reservoir-computing simulator for GNSS jammer classification"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate", "Synthesize a labeled baseband dataset");
    std::string gen_out;
    std::uint64_t gen_per_class = 0, gen_seed = 0;
    gen->add_option("--out", gen_out, "Output dataset directory")->required();
    gen->add_option("--per-class", gen_per_class, "Records per class")->required();
    gen->add_option("--seed", gen_seed, "Dataset seed");

    auto* train = app.add_subcommand("train", "Run a federated training experiment");
    std::string train_config, train_metrics;
    train->add_option("--config", train_config, "Experiment config file")->required();
    train->add_option("--metrics", train_metrics, "Per-round metrics CSV destination");

    auto* eval = app.add_subcommand("evaluate", "Evaluate a readout model on a dataset");
    std::string eval_model, eval_data, eval_config;
    eval->add_option("--model", eval_model, "Readout model file")->required();
    eval->add_option("--data", eval_data, "Dataset directory")->required();
    eval->add_option("--config", eval_config, "Config with the reservoir settings and seed");

    auto* part = app.add_subcommand("partition", "Assign dataset samples to clients");
    std::string part_data, part_scheme, part_out;
    double part_alpha = 0.1;
    std::uint32_t part_clients = 10;
    std::uint64_t part_seed = 0;
    part->add_option("--data", part_data, "Dataset directory")->required();
    part->add_option("--scheme", part_scheme, "iid or dirichlet")->required();
    part->add_option("--alpha", part_alpha, "Dirichlet concentration");
    part->add_option("--clients", part_clients, "Number of clients")->required();
    part->add_option("--out", part_out, "Partition TSV destination")->required();
    part->add_option("--seed", part_seed, "Partition seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // malformed command line counts as a configuration error
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_generate(gen_out, gen_per_class, gen_seed);
        if (train->parsed()) return cmd_train(train_config, train_metrics);
        if (eval->parsed()) return cmd_evaluate(eval_model, eval_data, eval_config);
        if (part->parsed())
            return cmd_partition(part_data, part_scheme, part_alpha, part_clients, part_out,
                                 part_seed);
    } catch (const frc::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
