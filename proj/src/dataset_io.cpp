#include "frc/dataset_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>

#include "frc/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace frc {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) throw io_error("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) throw io_error("cannot open " + path.string() + " for reading");
    return in;
}

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::filesystem::path& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw io_error("truncated file " + path.string());
    return v;
}

void write_magic(std::ofstream& out, const char (&magic)[5]) { out.write(magic, 4); }

void expect_magic(std::ifstream& in, const char (&magic)[5], const std::filesystem::path& path) {
    char got[4];
    in.read(got, 4);
    if (!in || !std::equal(got, got + 4, magic))
        throw io_error("bad magic in " + path.string() + " (expected " + magic + ")");
}

void write_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
    // row-major on the wire; Eigen stores column-major
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
}

Eigen::MatrixXd read_matrix(std::ifstream& in, Eigen::Index rows, Eigen::Index cols,
                            const std::filesystem::path& path) {
    Eigen::MatrixXd m(rows, cols);
    std::vector<double> row(static_cast<std::size_t>(cols));
    for (Eigen::Index r = 0; r < rows; ++r) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (!in) throw io_error("truncated file " + path.string());
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
    }
    return m;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string format_fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

void write_baseband(const std::filesystem::path& path,
                    const std::vector<std::complex<double>>& samples) {
    auto out = open_out(path, std::ios::binary);
    write_magic(out, "FRCB");
    write_pod(out, static_cast<std::uint32_t>(samples.size()));
    std::vector<float> buf(samples.size() * 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        buf[2 * i] = static_cast<float>(samples[i].real());
        buf[2 * i + 1] = static_cast<float>(samples[i].imag());
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!out) throw io_error("write failed for " + path.string());
}

std::vector<std::complex<double>> read_baseband(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::binary);
    expect_magic(in, "FRCB", path);
    auto length = read_pod<std::uint32_t>(in, path);
    std::vector<float> buf(static_cast<std::size_t>(length) * 2);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw io_error("truncated file " + path.string());
    std::vector<std::complex<double>> samples(length);
    for (std::size_t i = 0; i < samples.size(); ++i)
        samples[i] = {static_cast<double>(buf[2 * i]), static_cast<double>(buf[2 * i + 1])};
    return samples;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
    auto out = open_out(path, std::ios::out);
    out << "record_id\tclass_index\tclass_name\tjsr_db\tfile\n";
    for (const auto& e : entries)
        out << e.record_id << '\t' << e.class_index << '\t' << e.class_name << '\t'
            << format_fixed6(e.jsr_db) << '\t' << e.file << '\n';
    if (!out) throw io_error("write failed for " + path.string());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::in);
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty manifest " + path.string());
    if (split_tabs(line) !=
        std::vector<std::string>{"record_id", "class_index", "class_name", "jsr_db", "file"})
        throw io_error("unexpected manifest header in " + path.string());
    std::vector<ManifestEntry> entries;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_tabs(line);
        if (f.size() != 5)
            throw io_error("malformed manifest row in " + path.string() + ": " + line);
        ManifestEntry e;
        try {
            e.record_id = std::stoull(f[0]);
            e.class_index = static_cast<std::uint32_t>(std::stoul(f[1]));
            e.class_name = f[2];
            e.jsr_db = std::stod(f[3]);
            e.file = f[4];
        } catch (const std::exception&) {
            throw io_error("malformed manifest row in " + path.string() + ": " + line);
        }
        if (e.class_index >= kNumClasses)
            throw io_error("class index out of range in " + path.string() + ": " + line);
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<ManifestEntry> write_dataset(const std::filesystem::path& dir,
                                         std::uint64_t n_per_class, const SignalParams& params) {
    params.validate();
    if (n_per_class < 1) throw input_error("n_per_class must be >= 1");
    std::error_code ec;
    std::filesystem::create_directories(dir / "records", ec);
    if (ec) throw io_error("cannot create " + (dir / "records").string() + ": " + ec.message());
    const std::uint64_t total = n_per_class * kNumClasses;
    std::vector<ManifestEntry> entries(total);
    constexpr std::uint64_t kChunk = 48;  // bounds resident records during generation
    std::vector<BasebandRecord> chunk(static_cast<std::size_t>(std::min(kChunk, total)));
    for (std::uint64_t base = 0; base < total; base += kChunk) {
        const auto count = static_cast<std::int64_t>(std::min(kChunk, total - base));
        // exceptions may not escape the parallel region; capture the first and rethrow
        std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t j = 0; j < count; ++j) {
            try {
                chunk[static_cast<std::size_t>(j)] =
                    make_record(base + static_cast<std::uint64_t>(j), params);
            } catch (...) {
#pragma omp critical
                if (!first_error) first_error = std::current_exception();
            }
        }
        if (first_error) std::rethrow_exception(first_error);
        for (std::int64_t j = 0; j < count; ++j) {
            const auto id = base + static_cast<std::uint64_t>(j);
            const auto& rec = chunk[static_cast<std::size_t>(j)];
            char name[48];
            std::snprintf(name, sizeof(name), "records/rec_%06llu.frcb",
                          static_cast<unsigned long long>(id));
            write_baseband(dir / name, rec.samples);
            auto& e = entries[id];
            e.record_id = id;
            e.class_index = static_cast<std::uint32_t>(rec.label);
            e.class_name = class_name(rec.label);
            e.jsr_db = rec.params_used.jsr_db;
            e.file = name;
        }
    }
    write_manifest(dir / "manifest.tsv", entries);
    return entries;
}

std::vector<std::complex<double>> load_record_samples(const std::filesystem::path& dataset_dir,
                                                      const ManifestEntry& entry) {
    return read_baseband(dataset_dir / entry.file);
}

void write_client_stats(const std::filesystem::path& path, const ClientStats& stats) {
    if (stats.omega.rows() != stats.omega.cols() || stats.gamma.cols() != stats.omega.rows())
        throw input_error("client statistics have inconsistent dimensions");
    auto out = open_out(path, std::ios::binary);
    write_magic(out, "FRCS");
    write_pod(out, static_cast<std::uint16_t>(1));
    write_pod(out, stats.client_id);
    write_pod(out, static_cast<std::uint32_t>(stats.gamma.rows()));
    write_pod(out, static_cast<std::uint32_t>(stats.omega.rows()));
    write_pod(out, stats.sample_count);
    write_matrix(out, stats.gamma);
    write_matrix(out, stats.omega);
    if (!out) throw io_error("write failed for " + path.string());
}

ClientStats read_client_stats(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::binary);
    expect_magic(in, "FRCS", path);
    auto version = read_pod<std::uint16_t>(in, path);
    if (version != 1)
        throw io_error("unsupported statistics version " + std::to_string(version) + " in " +
                       path.string());
    ClientStats s;
    s.client_id = read_pod<std::uint32_t>(in, path);
    auto classes = static_cast<Eigen::Index>(read_pod<std::uint32_t>(in, path));
    auto features = static_cast<Eigen::Index>(read_pod<std::uint32_t>(in, path));
    s.sample_count = read_pod<std::uint64_t>(in, path);
    s.gamma = read_matrix(in, classes, features, path);
    s.omega = read_matrix(in, features, features, path);
    return s;
}

void write_model(const std::filesystem::path& path, const ReadoutWeights& model) {
    auto out = open_out(path, std::ios::binary);
    write_magic(out, "FRCM");
    write_pod(out, static_cast<std::uint32_t>(model.theta.rows()));
    write_pod(out, static_cast<std::uint32_t>(model.theta.cols()));
    write_matrix(out, model.theta);
    if (!out) throw io_error("write failed for " + path.string());
}

ReadoutWeights read_model(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::binary);
    expect_magic(in, "FRCM", path);
    auto classes = static_cast<Eigen::Index>(read_pod<std::uint32_t>(in, path));
    auto features = static_cast<Eigen::Index>(read_pod<std::uint32_t>(in, path));
    ReadoutWeights model;
    model.theta = read_matrix(in, classes, features, path);
    return model;
}

void write_partition_tsv(const std::filesystem::path& path, const Partition& partition) {
    auto out = open_out(path, std::ios::out);
    out << "client_id\tsample_index\n";
    for (std::size_t c = 0; c < partition.assignments.size(); ++c)
        for (auto idx : partition.assignments[c]) out << c << '\t' << idx << '\n';
    if (!out) throw io_error("write failed for " + path.string());
}

std::vector<std::pair<std::uint32_t, std::uint64_t>> read_partition_tsv(
    const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::in);
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty partition file " + path.string());
    if (split_tabs(line) != std::vector<std::string>{"client_id", "sample_index"})
        throw io_error("unexpected partition header in " + path.string());
    std::vector<std::pair<std::uint32_t, std::uint64_t>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_tabs(line);
        if (f.size() != 2)
            throw io_error("malformed partition row in " + path.string() + ": " + line);
        try {
            rows.emplace_back(static_cast<std::uint32_t>(std::stoul(f[0])), std::stoull(f[1]));
        } catch (const std::exception&) {
            throw io_error("malformed partition row in " + path.string() + ": " + line);
        }
    }
    return rows;
}

}  // namespace frc
