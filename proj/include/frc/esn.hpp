#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>

namespace frc {

/// Hyperparameters of the echo state network; defaults give the 500-unit reservoir
/// used throughout the experiments.
struct ReservoirConfig {
    std::uint32_t units = 500;
    double spectral_radius = 0.1;
    double leaking_rate = 0.1;
    double input_scaling = 0.1;
    std::uint32_t input_connectivity = 3;    // exact nonzeros per row of w_in
    std::uint32_t recurrent_connectivity = 8;  // exact nonzeros per row of w_rec
    std::uint32_t input_dim = 256;
    std::uint32_t washout = 16;
    std::uint64_t seed = 0;

    /// Throws config_error if any invariant is violated.
    void validate() const;
};

/// Fixed random reservoir; never trained. Immutable after construction and safe to
/// share read-only across threads.
struct ReservoirWeights {
    Eigen::SparseMatrix<double, Eigen::RowMajor> w_rec;  // units x units
    Eigen::SparseMatrix<double, Eigen::RowMajor> w_in;   // units x input_dim
    ReservoirConfig config;
};

/// Readout matrix mapping augmented reservoir features to class scores.
struct ReadoutWeights {
    Eigen::MatrixXd theta;  // classes x (units + 1)
};

/// Spectral radius of a sparse matrix by Arnoldi iteration with an adaptively grown
/// Krylov subspace (60 -> 480, exact once the subspace spans the whole space).
/// The start vector derives from probe_seed. Throws numeric_error if the residual
/// target is still unmet at the largest subspace.
double spectral_radius(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m,
                       std::uint64_t probe_seed);

/// Builds the sparse reservoir from the seeded generator: per-row support drawn
/// without replacement, values uniform on [-1,1], w_rec rescaled to the target
/// spectral radius, w_in scaled by input_scaling. Bit-identical for equal configs.
ReservoirWeights init_reservoir(const ReservoirConfig& config);

/// Runs the leaky update x <- (1-a)x + a tanh(w_rec x + w_in u_t) from the zero
/// state over sequence columns; returns the mean of post-washout states with a
/// trailing bias entry of exactly 1 (dimension units + 1).
Eigen::VectorXd run_sequence(const ReservoirWeights& weights, const Eigen::MatrixXd& sequence);

/// Same step loop from an explicit initial state, returning the final state only.
/// Exposed so tests can check the fading-memory property directly.
Eigen::VectorXd run_sequence_from(const ReservoirWeights& weights,
                                  const Eigen::MatrixXd& sequence,
                                  const Eigen::VectorXd& initial_state);

/// Solves theta (omega + beta I) = gamma for theta (classes x features) via a
/// Cholesky factorization of the regularized moment matrix, never an explicit
/// inverse. Verifies the normal-equation residual to 1e-8 relative.
Eigen::MatrixXd solve_normal_equations(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& gamma,
                                       double beta);

/// Ridge readout: theta = Y Phi^T (Phi Phi^T + beta I)^{-1} via solve_normal_equations
/// on the moment matrices of (phi, y).
ReadoutWeights solve_readout(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& y, double beta);

/// Scores = theta * feature; label = argmax with ties broken toward the lowest index.
std::pair<Eigen::VectorXd, std::uint32_t> classify(const ReadoutWeights& theta,
                                                   const Eigen::VectorXd& feature);

}  // namespace frc
