#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "frc/error.hpp"
#include "frc/harness.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using frc::test::random_matrix;
using frc::test::rel_err;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int n = 0;
        path = fs::temp_directory_path() /
               ("frc_harness_test_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

// small but complete experiment: 5 records per class, 60-unit reservoir
frc::ExperimentConfig mini_config() {
    frc::ExperimentConfig cfg;
    cfg.units = 60;
    cfg.per_class = 5;
    cfg.rounds = 3;
    cfg.n_clients = 2;
    cfg.fraction = 1.0;
    cfg.scheme = frc::PartitionScheme::IID;
    cfg.seed = 1;
    return cfg;
}

}  // namespace

TEST_CASE("one-hot targets") {
    auto y = frc::one_hot({2, 0, 1, 2}, 3);
    REQUIRE(y.rows() == 3);
    REQUIRE(y.cols() == 4);
    CHECK(y.sum() == 4.0);
    CHECK(y(2, 0) == 1.0);
    CHECK(y(0, 1) == 1.0);
    CHECK(y(1, 2) == 1.0);
    CHECK(y(2, 3) == 1.0);
    CHECK_THROWS_AS(frc::one_hot({3}, 3), frc::input_error);
}

TEST_CASE("evaluation metrics") {
    // theta = identity over 3 features: scores equal the features themselves
    frc::ReadoutWeights model;
    model.theta = Eigen::MatrixXd::Identity(3, 3);

    SUBCASE("perfect predictions give zero-ish loss and accuracy 1") {
        Eigen::MatrixXd phi = frc::one_hot({0, 1, 2}, 3);
        auto [loss, accuracy] = frc::evaluate(model, phi, {0, 1, 2});
        CHECK(loss == 0.0);
        CHECK(accuracy == 1.0);
    }
    SUBCASE("loss is the mean squared error over all cells") {
        Eigen::MatrixXd phi(3, 2);
        phi << 0.5, 0.0, 0.5, 1.0, 0.0, 0.0;
        auto [loss, accuracy] = frc::evaluate(model, phi, {0, 1});
        // cells: (0.5-1)^2 + 0.5^2 + 0 | 0 + 0 + 0 over 6 cells
        CHECK(loss == doctest::Approx(0.5 / 6.0).epsilon(1e-12));
        CHECK(accuracy == 1.0);  // column 0 ties break to row 0, which is the label
    }
    SUBCASE("argmax ties break toward the lowest index") {
        Eigen::MatrixXd phi(3, 1);
        phi << 1.0, 1.0, 1.0;
        auto [loss0, acc0] = frc::evaluate(model, phi, {0});
        CHECK(acc0 == 1.0);
        auto [loss1, acc1] = frc::evaluate(model, phi, {1});
        CHECK(acc1 == 0.0);
        CHECK(loss0 == loss1);
    }
    SUBCASE("invalid inputs are rejected") {
        CHECK_THROWS_AS(frc::evaluate(model, Eigen::MatrixXd(3, 0), {}), frc::input_error);
        CHECK_THROWS_AS(frc::evaluate(model, random_matrix(3, 2, 1), {0}), frc::input_error);
        CHECK_THROWS_AS(frc::evaluate(model, random_matrix(4, 2, 1), {0, 1}), frc::input_error);
    }
}

TEST_CASE("shard ranges tile the sample count") {
    SUBCASE("contiguous cover with sizes differing by at most one") {
        for (std::uint64_t m : {0ULL, 1ULL, 7ULL, 50ULL, 53ULL}) {
            const std::uint32_t rounds = 5;
            std::uint64_t expect_lo = 0, min_size = m, max_size = 0;
            for (std::uint32_t t = 0; t < rounds; ++t) {
                auto [lo, hi] = frc::shard_range(m, rounds, t);
                CHECK(lo == expect_lo);
                CHECK(hi >= lo);
                min_size = std::min(min_size, hi - lo);
                max_size = std::max(max_size, hi - lo);
                expect_lo = hi;
            }
            CHECK(expect_lo == m);
            CHECK(max_size - min_size <= 1);
        }
    }
    SUBCASE("single round takes everything") {
        auto [lo, hi] = frc::shard_range(9, 1, 0);
        CHECK(lo == 0);
        CHECK(hi == 9);
    }
    SUBCASE("fewer samples than rounds leaves some shards empty") {
        std::uint64_t got = 0;
        for (std::uint32_t t = 0; t < 10; ++t) {
            auto [lo, hi] = frc::shard_range(3, 10, t);
            got += hi - lo;
        }
        CHECK(got == 3);
    }
    SUBCASE("invalid arguments are rejected") {
        CHECK_THROWS_AS(frc::shard_range(5, 0, 0), frc::input_error);
        CHECK_THROWS_AS(frc::shard_range(5, 3, 3), frc::input_error);
    }
}

TEST_CASE("mini experiment: full pipeline on synthesized data") {
    auto cfg = mini_config();
    auto result = frc::run_experiment(cfg);

    SUBCASE("metric series shape and bookkeeping") {
        REQUIRE(result.metrics.size() == 3);
        // per class: 5 records, 4 train / 1 test; 24 train samples total
        std::uint64_t prev = 0;
        for (std::uint32_t t = 0; t < 3; ++t) {
            const auto& m = result.metrics[t];
            CHECK(m.round_index == t);
            CHECK(m.participants == 2);
            CHECK(m.cumulative_samples >= prev);
            CHECK(m.loss >= 0.0);
            CHECK(m.accuracy >= 0.0);
            CHECK(m.accuracy <= 1.0);
            CHECK(m.wall_time_ms >= 0.0);
            prev = m.cumulative_samples;
        }
        CHECK(result.metrics.back().cumulative_samples == 24);
        CHECK(result.model.theta.rows() == 6);
        CHECK(result.model.theta.cols() == 61);
    }
    SUBCASE("bit-identical rerun under the same seed") {
        auto again = frc::run_experiment(cfg);
        REQUIRE(again.metrics.size() == result.metrics.size());
        for (std::size_t t = 0; t < result.metrics.size(); ++t) {
            CHECK(again.metrics[t].loss == result.metrics[t].loss);
            CHECK(again.metrics[t].accuracy == result.metrics[t].accuracy);
            CHECK(again.metrics[t].cumulative_samples == result.metrics[t].cumulative_samples);
        }
        CHECK(again.model.theta == result.model.theta);
    }
    SUBCASE("client-side regularization matches the server-side solve") {
        auto cfg2 = cfg;
        cfg2.client_side_regularization = true;
        auto other = frc::run_experiment(cfg2);
        // every client participates every round, so the distributed beta shares
        // sum back to the server value up to floating-point rounding
        CHECK(rel_err(other.model.theta, result.model.theta) < 1e-8);
        CHECK(other.metrics.back().accuracy ==
              doctest::Approx(result.metrics.back().accuracy).epsilon(1e-9));
    }
    SUBCASE("metrics and model land on disk when paths are set") {
        TempDir tmp;
        auto cfg3 = cfg;
        cfg3.metrics_out = (tmp.path / "metrics.csv").string();
        cfg3.model_out = (tmp.path / "model.frcm").string();
        auto r3 = frc::run_experiment(cfg3);
        auto metrics = frc::read_metrics(cfg3.metrics_out);
        REQUIRE(metrics.size() == r3.metrics.size());
        for (std::size_t t = 0; t < metrics.size(); ++t) {
            CHECK(std::abs(metrics[t].loss - r3.metrics[t].loss) <= 5e-7);  // 6 decimals
            CHECK(metrics[t].cumulative_samples == r3.metrics[t].cumulative_samples);
        }
        auto model = frc::read_model(cfg3.model_out);
        CHECK(model.theta == r3.model.theta);  // float64 container, bitwise round-trip
    }
}

TEST_CASE("mini experiment under a skewed dirichlet partition still runs") {
    auto cfg = mini_config();
    cfg.scheme = frc::PartitionScheme::Dirichlet;
    cfg.alpha = 0.1;  // a client may receive nothing; empty shards must be fine
    auto result = frc::run_experiment(cfg);
    REQUIRE(result.metrics.size() == 3);
    CHECK(result.metrics.back().cumulative_samples == 24);
}

TEST_CASE("experiment with a missing dataset directory fails with an io error") {
    auto cfg = mini_config();
    cfg.data_dir = "/nonexistent/frc_dataset";
    CHECK_THROWS_AS(frc::run_experiment(cfg), frc::io_error);
}
