#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "frc/config.hpp"
#include "frc/dataset_io.hpp"
#include "frc/error.hpp"
#include "frc/harness.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using frc::test::random_matrix;

namespace {

// fresh directory under the system temp root, removed on scope exit
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("frc_io_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void dump(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("baseband records round-trip through the float32 container") {
    TempDir tmp;
    auto file = tmp.path / "rec.frcb";
    std::vector<std::complex<double>> samples{
        {0.0, 0.0}, {1.5, -2.25}, {1e-3, 1e3}, {0.1234567890123, -0.9876543210987}};
    frc::write_baseband(file, samples);
    auto got = frc::read_baseband(file);
    REQUIRE(got.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        // storage is float32, so the round-trip equals the float cast exactly
        CHECK(got[i].real() == static_cast<double>(static_cast<float>(samples[i].real())));
        CHECK(got[i].imag() == static_cast<double>(static_cast<float>(samples[i].imag())));
    }

    SUBCASE("header layout is magic + u32 length") {
        auto bytes = slurp(file);
        REQUIRE(bytes.size() == 4 + 4 + samples.size() * 8);
        CHECK(bytes.substr(0, 4) == "FRCB");
        std::uint32_t len = 0;
        std::memcpy(&len, bytes.data() + 4, 4);
        CHECK(len == samples.size());
    }
    SUBCASE("bad magic is rejected") {
        auto bytes = slurp(file);
        bytes[0] = 'X';
        dump(file, bytes);
        CHECK_THROWS_AS(frc::read_baseband(file), frc::io_error);
    }
    SUBCASE("truncated payload is rejected") {
        auto bytes = slurp(file);
        dump(file, bytes.substr(0, bytes.size() - 3));
        CHECK_THROWS_AS(frc::read_baseband(file), frc::io_error);
    }
    SUBCASE("missing file is rejected") {
        CHECK_THROWS_AS(frc::read_baseband(tmp.path / "nope.frcb"), frc::io_error);
    }
}

TEST_CASE("manifest round-trips and enforces its header") {
    TempDir tmp;
    auto file = tmp.path / "manifest.tsv";
    std::vector<frc::ManifestEntry> entries{
        {0, 0, "am", 17.123456, "records/rec_000000.frcb"},
        {1, 5, "nojam", 0.0, "records/rec_000001.frcb"},
        {2, 3, "pulse_dme", 49.999999, "records/rec_000002.frcb"},
    };
    frc::write_manifest(file, entries);
    auto got = frc::read_manifest(file);
    REQUIRE(got.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(got[i].record_id == entries[i].record_id);
        CHECK(got[i].class_index == entries[i].class_index);
        CHECK(got[i].class_name == entries[i].class_name);
        CHECK(std::abs(got[i].jsr_db - entries[i].jsr_db) <= 5e-7);  // printed with 6 decimals
        CHECK(got[i].file == entries[i].file);
    }

    SUBCASE("header line is exact") {
        std::ifstream in(file);
        std::string header;
        std::getline(in, header);
        CHECK(header == "record_id\tclass_index\tclass_name\tjsr_db\tfile");
    }
    SUBCASE("wrong header is rejected") {
        dump(file, "id\tclass\n0\t1\n");
        CHECK_THROWS_AS(frc::read_manifest(file), frc::io_error);
    }
    SUBCASE("out-of-range class index is rejected") {
        dump(file,
             "record_id\tclass_index\tclass_name\tjsr_db\tfile\n0\t6\tx\t1.0\tr.frcb\n");
        CHECK_THROWS_AS(frc::read_manifest(file), frc::io_error);
    }
    SUBCASE("malformed row is rejected") {
        dump(file, "record_id\tclass_index\tclass_name\tjsr_db\tfile\n0\tnotanint\tx\t1.0\tr\n");
        CHECK_THROWS_AS(frc::read_manifest(file), frc::io_error);
    }
}

TEST_CASE("client statistics round-trip exactly in float64") {
    TempDir tmp;
    auto file = tmp.path / "client3.frcs";
    frc::ClientStats stats;
    stats.client_id = 3;
    stats.gamma = random_matrix(4, 9, 1);
    stats.omega = random_matrix(9, 9, 2);
    stats.omega = (stats.omega + stats.omega.transpose()).eval();
    stats.sample_count = 0x1122334455667788ULL;
    frc::write_client_stats(file, stats);
    auto got = frc::read_client_stats(file);
    CHECK(got.client_id == 3);
    CHECK(got.sample_count == stats.sample_count);
    CHECK(got.gamma == stats.gamma);  // binary float64, bitwise identical
    CHECK(got.omega == stats.omega);

    SUBCASE("unsupported version is rejected") {
        auto bytes = slurp(file);
        bytes[4] = 2;  // version lives right after the magic
        dump(file, bytes);
        CHECK_THROWS_AS(frc::read_client_stats(file), frc::io_error);
    }
    SUBCASE("bad magic is rejected") {
        auto bytes = slurp(file);
        bytes[0] = 'Z';
        dump(file, bytes);
        CHECK_THROWS_AS(frc::read_client_stats(file), frc::io_error);
    }
    SUBCASE("truncation is rejected") {
        auto bytes = slurp(file);
        dump(file, bytes.substr(0, bytes.size() / 2));
        CHECK_THROWS_AS(frc::read_client_stats(file), frc::io_error);
    }
    SUBCASE("inconsistent dimensions are rejected at write time") {
        frc::ClientStats bad = stats;
        bad.omega = random_matrix(8, 9, 3);
        CHECK_THROWS_AS(frc::write_client_stats(tmp.path / "bad.frcs", bad), frc::input_error);
    }
}

TEST_CASE("model files round-trip exactly in float64") {
    TempDir tmp;
    auto file = tmp.path / "model.frcm";
    frc::ReadoutWeights model;
    model.theta = random_matrix(6, 501, 7);
    frc::write_model(file, model);
    auto got = frc::read_model(file);
    CHECK(got.theta == model.theta);

    SUBCASE("layout is magic + dims + row-major payload") {
        auto bytes = slurp(file);
        REQUIRE(bytes.size() == 4 + 4 + 4 + 6u * 501u * 8u);
        CHECK(bytes.substr(0, 4) == "FRCM");
        double first = 0.0;
        std::memcpy(&first, bytes.data() + 12, 8);
        CHECK(first == model.theta(0, 0));
        double second = 0.0;
        std::memcpy(&second, bytes.data() + 20, 8);
        CHECK(second == model.theta(0, 1));  // row-major: (0,1) follows (0,0)
    }
    SUBCASE("bad magic is rejected") {
        auto bytes = slurp(file);
        bytes[3] = 'X';
        dump(file, bytes);
        CHECK_THROWS_AS(frc::read_model(file), frc::io_error);
    }
}

TEST_CASE("partition export round-trips with ascending clients") {
    TempDir tmp;
    auto file = tmp.path / "partition.tsv";
    frc::Partition p;
    p.assignments = {{5, 2}, {}, {0, 7, 9}};
    frc::write_partition_tsv(file, p);
    auto rows = frc::read_partition_tsv(file);
    REQUIRE(rows.size() == 5);
    std::vector<std::pair<std::uint32_t, std::uint64_t>> want{
        {0, 5}, {0, 2}, {2, 0}, {2, 7}, {2, 9}};
    CHECK(rows == want);

    SUBCASE("header line is exact") {
        std::ifstream in(file);
        std::string header;
        std::getline(in, header);
        CHECK(header == "client_id\tsample_index");
    }
    SUBCASE("wrong header is rejected") {
        dump(file, "client\tindex\n0\t1\n");
        CHECK_THROWS_AS(frc::read_partition_tsv(file), frc::io_error);
    }
}

TEST_CASE("metrics CSV round-trips at the printed precision") {
    TempDir tmp;
    auto file = tmp.path / "metrics.csv";
    std::vector<frc::RoundMetrics> metrics{
        {0, 0.21345678123, 0.50123456789, 9, 240, 1234.5678},
        {1, 0.0712345, 0.9312345, 9, 480, 998.0004},
    };
    frc::write_metrics(metrics, file);
    auto got = frc::read_metrics(file);
    REQUIRE(got.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(got[i].round_index == metrics[i].round_index);
        // half a unit in the last printed decimal, plus binary representation slack
        CHECK(std::abs(got[i].loss - metrics[i].loss) <= 5.01e-7);
        CHECK(std::abs(got[i].accuracy - metrics[i].accuracy) <= 5.01e-7);
        CHECK(got[i].participants == metrics[i].participants);
        CHECK(got[i].cumulative_samples == metrics[i].cumulative_samples);
        CHECK(std::abs(got[i].wall_time_ms - metrics[i].wall_time_ms) <= 5.01e-4);
    }

    SUBCASE("header and row formatting are exact") {
        std::ifstream in(file);
        std::string line;
        std::getline(in, line);
        CHECK(line == "round,loss,accuracy,participants,cumulative_samples,wall_time_ms");
        std::getline(in, line);
        CHECK(line == "0,0.213457,0.501235,9,240,1234.568");
    }
    SUBCASE("empty series writes a header-only file") {
        auto empty_file = tmp.path / "empty.csv";
        frc::write_metrics({}, empty_file);
        CHECK(slurp(empty_file) ==
              "round,loss,accuracy,participants,cumulative_samples,wall_time_ms\n");
        CHECK(frc::read_metrics(empty_file).empty());
    }
}

TEST_CASE("config parsing") {
    SUBCASE("empty text yields the documented defaults") {
        auto cfg = frc::parse_config("");
        CHECK(cfg.sample_rate == 10e6);
        CHECK(cfg.duration_samples == 132096);
        CHECK(cfg.snr_db == -20.0);
        CHECK(cfg.units == 500);
        CHECK(cfg.spectral_radius == 0.1);
        CHECK(cfg.leaking_rate == 0.1);
        CHECK(cfg.input_scaling == 0.1);
        CHECK(cfg.input_connectivity == 3);
        CHECK(cfg.recurrent_connectivity == 8);
        CHECK(cfg.washout == 16);
        CHECK(cfg.per_class == 500);
        CHECK(cfg.beta == 1e-2);
        CHECK(cfg.n_clients == 10);
        CHECK(cfg.fraction == 0.9);
        CHECK(cfg.rounds == 50);
        CHECK(cfg.scheme == frc::PartitionScheme::Dirichlet);
        CHECK(cfg.alpha == 0.1);
        CHECK(cfg.train_fraction == 0.8);
        CHECK(cfg.seed == 0);
        CHECK(cfg.client_side_regularization == false);
        CHECK(cfg.data_dir.empty());
    }
    SUBCASE("comments, blank lines, and whitespace are tolerated") {
        auto cfg = frc::parse_config(
            "# full-line comment\n"
            "\n"
            "  units   =   120   # trailing comment\n"
            "\tseed=42\n");
        CHECK(cfg.units == 120);
        CHECK(cfg.seed == 42);
    }
    SUBCASE("every documented key is accepted") {
        auto cfg = frc::parse_config(
            "sample_rate = 8e6\n"
            "duration_samples = 140000\n"
            "snr_db = -18\n"
            "jsr_db_min = 12\n"
            "jsr_db_max = 45\n"
            "tone_offset_min = -0.02\n"
            "tone_offset_max = 0.02\n"
            "am_depth_min = 0.2\n"
            "am_depth_max = 0.8\n"
            "am_modf_min = 10e3\n"
            "am_modf_max = 20e3\n"
            "chirp_bw_min = 3e6\n"
            "chirp_bw_max = 6e6\n"
            "chirp_period_min = 5e-3\n"
            "chirp_period_max = 10e-3\n"
            "fm_dev_min = 1e6\n"
            "fm_dev_max = 1.5e6\n"
            "fm_modf_min = 12e3\n"
            "fm_modf_max = 25e3\n"
            "dme_rate_min = 6e2\n"
            "dme_rate_max = 1.8e3\n"
            "nb_bw_min = 0.6e6\n"
            "nb_bw_max = 1.1e6\n"
            "units = 300\n"
            "spectral_radius = 0.2\n"
            "leaking_rate = 0.15\n"
            "input_scaling = 0.05\n"
            "input_connectivity = 4\n"
            "recurrent_connectivity = 6\n"
            "washout = 8\n"
            "per_class = 100\n"
            "beta = 0.001\n"
            "n_clients = 7\n"
            "fraction = 0.8\n"
            "rounds = 25\n"
            "scheme = iid\n"
            "alpha = 0.5\n"
            "train_fraction = 0.75\n"
            "seed = 99\n"
            "client_side_regularization = true\n"
            "data_dir = /tmp/ds\n"
            "metrics_out = /tmp/m.csv\n"
            "model_out = /tmp/w.frcm\n");
        CHECK(cfg.sample_rate == 8e6);
        CHECK(cfg.duration_samples == 140000);
        CHECK(cfg.snr_db == -18.0);
        CHECK(cfg.jsr_db_min == 12.0);
        CHECK(cfg.jsr_db_max == 45.0);
        CHECK(cfg.class_params.tone_offset_min == -0.02);
        CHECK(cfg.class_params.tone_offset_max == 0.02);
        CHECK(cfg.class_params.am_depth_min == 0.2);
        CHECK(cfg.class_params.am_depth_max == 0.8);
        CHECK(cfg.class_params.am_modf_min == 10e3);
        CHECK(cfg.class_params.am_modf_max == 20e3);
        CHECK(cfg.class_params.chirp_bw_min == 3e6);
        CHECK(cfg.class_params.chirp_bw_max == 6e6);
        CHECK(cfg.class_params.chirp_period_min == 5e-3);
        CHECK(cfg.class_params.chirp_period_max == 10e-3);
        CHECK(cfg.class_params.fm_dev_min == 1e6);
        CHECK(cfg.class_params.fm_dev_max == 1.5e6);
        CHECK(cfg.class_params.fm_modf_min == 12e3);
        CHECK(cfg.class_params.fm_modf_max == 25e3);
        CHECK(cfg.class_params.dme_rate_min == 6e2);
        CHECK(cfg.class_params.dme_rate_max == 1.8e3);
        CHECK(cfg.class_params.nb_bw_min == 0.6e6);
        CHECK(cfg.class_params.nb_bw_max == 1.1e6);
        CHECK(cfg.units == 300);
        CHECK(cfg.spectral_radius == 0.2);
        CHECK(cfg.leaking_rate == 0.15);
        CHECK(cfg.input_scaling == 0.05);
        CHECK(cfg.input_connectivity == 4);
        CHECK(cfg.recurrent_connectivity == 6);
        CHECK(cfg.washout == 8);
        CHECK(cfg.per_class == 100);
        CHECK(cfg.beta == 0.001);
        CHECK(cfg.n_clients == 7);
        CHECK(cfg.fraction == 0.8);
        CHECK(cfg.rounds == 25);
        CHECK(cfg.scheme == frc::PartitionScheme::IID);
        CHECK(cfg.alpha == 0.5);
        CHECK(cfg.train_fraction == 0.75);
        CHECK(cfg.seed == 99);
        CHECK(cfg.client_side_regularization == true);
        CHECK(cfg.data_dir == "/tmp/ds");
        CHECK(cfg.metrics_out == "/tmp/m.csv");
        CHECK(cfg.model_out == "/tmp/w.frcm");
    }
    SUBCASE("rejections carry config_error") {
        CHECK_THROWS_AS(frc::parse_config("unknown_key = 1\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("units = 100\nunits = 200\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("units\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("= 5\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("units = twelve\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("units = 12.5\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("units = -3\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("beta = 1e\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("scheme = random\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("client_side_regularization = yes\n"),
                        frc::config_error);
    }
    SUBCASE("semantic validation runs after parsing") {
        CHECK_THROWS_AS(frc::parse_config("beta = 0\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("fraction = 1.5\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("train_fraction = 1\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("n_clients = 0\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("rounds = 0\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("alpha = 0\n"), frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("jsr_db_min = 40\njsr_db_max = 20\n"),
                        frc::config_error);
        CHECK_THROWS_AS(frc::parse_config("per_class = 0\n"), frc::config_error);
        // with a data_dir set, per_class is unused and may be zero
        CHECK_NOTHROW(frc::parse_config("per_class = 0\ndata_dir = /tmp/x\n"));
    }
    SUBCASE("error messages carry line numbers") {
        try {
            frc::parse_config("units = 100\nbogus = 1\n");
            FAIL("expected config_error");
        } catch (const frc::config_error& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("file loading matches string parsing") {
        TempDir tmp;
        auto file = tmp.path / "exp.cfg";
        dump(file, "units = 64\nseed = 7\n");
        auto cfg = frc::load_config(file);
        CHECK(cfg.units == 64);
        CHECK(cfg.seed == 7);
        CHECK_THROWS_AS(frc::load_config(tmp.path / "missing.cfg"), frc::config_error);
    }
}

TEST_CASE("dataset generation writes records plus a consistent manifest") {
    TempDir tmp;
    frc::SignalParams params;
    // short records (no spectrogram involved), but long enough that the slowest
    // pulse class (2 ms period) always lands at least one pulse pair inside
    params.duration_samples = 32768;
    params.seed = 11;
    auto entries = frc::write_dataset(tmp.path, 1, params);
    REQUIRE(entries.size() == 6);

    SUBCASE("files exist and the manifest mirror matches") {
        auto reread = frc::read_manifest(tmp.path / "manifest.tsv");
        REQUIRE(reread.size() == 6);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(reread[i].record_id == i);
            CHECK(reread[i].class_index == i % 6);
            CHECK(fs::exists(tmp.path / reread[i].file));
        }
    }
    SUBCASE("stored samples equal the float-cast synthesized record") {
        auto rec = frc::make_record(2, params);
        auto stored = frc::load_record_samples(tmp.path, entries[2]);
        REQUIRE(stored.size() == rec.samples.size());
        for (std::size_t i = 0; i < stored.size(); ++i) {
            CHECK(stored[i].real() ==
                  static_cast<double>(static_cast<float>(rec.samples[i].real())));
            CHECK(stored[i].imag() ==
                  static_cast<double>(static_cast<float>(rec.samples[i].imag())));
        }
        CHECK(std::abs(entries[2].jsr_db - rec.params_used.jsr_db) <= 5e-7);
    }
    SUBCASE("zero records per class is rejected") {
        CHECK_THROWS_AS(frc::write_dataset(tmp.path, 0, params), frc::input_error);
    }
}
