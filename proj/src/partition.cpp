#include "frc/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "frc/error.hpp"
#include "frc/rng.hpp"

namespace frc {

namespace {

constexpr std::uint64_t kSplitStream = 0x53504C4954000000ULL;
constexpr std::uint64_t kIidStream = 0x4949440000000000ULL;
constexpr std::uint64_t kDirichletStream = 0x4449524943480000ULL;

// class label -> its sample indices, classes in ascending label order
std::map<std::uint32_t, std::vector<std::uint64_t>> by_class(
    const std::vector<std::uint32_t>& labels, const std::vector<std::uint64_t>& indices) {
    std::map<std::uint32_t, std::vector<std::uint64_t>> groups;
    for (auto idx : indices) {
        if (idx >= labels.size())
            throw input_error("sample index " + std::to_string(idx) + " out of range");
        groups[labels[idx]].push_back(idx);
    }
    return groups;
}

}  // namespace

std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>> split_train_test(
    const std::vector<std::uint32_t>& labels, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        throw input_error("train_fraction must be in (0, 1)");
    std::vector<std::uint64_t> all(labels.size());
    for (std::uint64_t i = 0; i < labels.size(); ++i) all[i] = i;
    auto groups = by_class(labels, all);
    auto rng = substream(seed, kSplitStream);
    std::vector<std::uint64_t> train, test;
    for (auto& [cls, idx] : groups) {
        if (idx.size() < 2)
            throw input_error("class " + std::to_string(cls) + " has fewer than 2 samples");
        shuffle(rng, idx);
        auto k = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(idx.size())));
        k = std::min(k, idx.size());
        train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
        test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end());
    }
    return {train, test};
}

Partition partition_iid(const std::vector<std::uint32_t>& labels,
                        const std::vector<std::uint64_t>& indices, std::uint32_t n_clients,
                        std::uint64_t seed) {
    if (n_clients < 1) throw input_error("n_clients must be >= 1");
    Partition p;
    p.assignments.resize(n_clients);
    p.scheme = PartitionScheme::IID;
    p.seed = seed;
    auto groups = by_class(labels, indices);
    auto rng = substream(seed, kIidStream);
    for (auto& [cls, idx] : groups) {
        shuffle(rng, idx);
        for (std::size_t j = 0; j < idx.size(); ++j)
            p.assignments[j % n_clients].push_back(idx[j]);
    }
    return p;
}

Partition partition_dirichlet(const std::vector<std::uint32_t>& labels,
                              const std::vector<std::uint64_t>& indices, std::uint32_t n_clients,
                              double alpha, std::uint64_t seed) {
    if (n_clients < 1) throw input_error("n_clients must be >= 1");
    if (!(alpha > 0.0)) throw input_error("alpha must be > 0");
    Partition p;
    p.assignments.resize(n_clients);
    p.scheme = PartitionScheme::Dirichlet;
    p.alpha = alpha;
    p.seed = seed;
    auto groups = by_class(labels, indices);
    auto rng = substream(seed, kDirichletStream);
    for (auto& [cls, idx] : groups) {
        shuffle(rng, idx);
        const auto m = idx.size();
        std::vector<double> g(n_clients);
        double total = 0.0;
        for (auto& v : g) {
            v = gamma_variate(rng, alpha);
            total += v;
        }
        std::vector<double> raw(n_clients);
        if (total <= 0.0) {
            // all gamma draws underflowed; fall back to the uniform simplex point
            for (auto& v : raw) v = static_cast<double>(m) / n_clients;
        } else {
            for (std::uint32_t k = 0; k < n_clients; ++k)
                raw[k] = g[k] / total * static_cast<double>(m);
        }
        // largest-remainder rounding to integer block sizes summing to m
        std::vector<std::uint64_t> cnt(n_clients);
        std::uint64_t assigned = 0;
        for (std::uint32_t k = 0; k < n_clients; ++k) {
            cnt[k] = static_cast<std::uint64_t>(std::floor(raw[k]));
            assigned += cnt[k];
        }
        std::vector<std::uint32_t> order(n_clients);
        for (std::uint32_t k = 0; k < n_clients; ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            double fa = raw[a] - std::floor(raw[a]);
            double fb = raw[b] - std::floor(raw[b]);
            if (fa != fb) return fa > fb;
            return a < b;
        });
        for (std::uint64_t r = 0; r < m - assigned; ++r) ++cnt[order[r % n_clients]];
        std::size_t pos = 0;
        for (std::uint32_t k = 0; k < n_clients; ++k) {
            for (std::uint64_t j = 0; j < cnt[k]; ++j) p.assignments[k].push_back(idx[pos++]);
        }
    }
    return p;
}

}  // namespace frc
