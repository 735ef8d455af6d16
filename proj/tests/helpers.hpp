#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "frc/rng.hpp"

namespace frc::test {

/// Relative Frobenius distance, guarded for a zero reference.
inline double rel_err(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    double denom = want.norm();
    if (denom == 0.0) return got.norm();
    return (got - want).norm() / denom;
}

/// Deterministic random matrix with entries uniform on [-1, 1].
inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                                     std::uint64_t stream = 0) {
    auto rng = substream(seed, stream);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform(rng, -1.0, 1.0);
    return m;
}

}  // namespace frc::test
