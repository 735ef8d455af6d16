#include "frc/esn.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "frc/error.hpp"
#include "frc/rng.hpp"

namespace frc {

void ReservoirConfig::validate() const {
    if (units < 1) throw config_error("units must be >= 1");
    if (input_dim < 1) throw config_error("input_dim must be >= 1");
    if (input_connectivity < 1 || input_connectivity > input_dim)
        throw config_error("input_connectivity must be in [1, input_dim]");
    if (recurrent_connectivity < 1 || recurrent_connectivity > units)
        throw config_error("recurrent_connectivity must be in [1, units]");
    if (!(leaking_rate > 0.0) || leaking_rate > 1.0)
        throw config_error("leaking_rate must be in (0, 1]");
    if (spectral_radius < 0.0) throw config_error("spectral_radius must be >= 0");
    if (input_scaling <= 0.0) throw config_error("input_scaling must be > 0");
}

namespace {

constexpr std::uint64_t kSpectralProbeStream = 0x41524e4f4c444921ULL;

// One Arnoldi factorization of dimension up to m; returns the dominant Ritz value
// magnitude and whether the residual bound met rtol (exact if the Krylov space
// became invariant or spans the whole space).
struct ArnoldiResult {
    double radius = 0.0;
    bool converged = false;
};

ArnoldiResult arnoldi_pass(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a,
                           const Eigen::VectorXd& start, int m, double rtol) {
    const int n = static_cast<int>(a.rows());
    const int m_eff = std::min(m, n);
    Eigen::MatrixXd q(n, m_eff + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m_eff + 1, m_eff);
    q.col(0) = start / start.norm();
    int k_done = m_eff;
    bool exact = false;
    for (int k = 0; k < m_eff; ++k) {
        Eigen::VectorXd v = a * q.col(k);
        for (int j = 0; j <= k; ++j) {  // modified Gram-Schmidt
            h(j, k) = q.col(j).dot(v);
            v -= h(j, k) * q.col(j);
        }
        for (int j = 0; j <= k; ++j) {  // one reorthogonalization pass
            double c = q.col(j).dot(v);
            h(j, k) += c;
            v -= c * q.col(j);
        }
        h(k + 1, k) = v.norm();
        if (h(k + 1, k) < 1e-12) {  // invariant subspace: Ritz values are exact
            k_done = k + 1;
            exact = true;
            break;
        }
        q.col(k + 1) = v / h(k + 1, k);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(h.topLeftCorner(k_done, k_done), true);
    int imax = 0;
    double rmax = 0.0;
    for (int i = 0; i < k_done; ++i) {
        double r = std::abs(es.eigenvalues()(i));
        if (r > rmax) {
            rmax = r;
            imax = i;
        }
    }
    ArnoldiResult out;
    out.radius = rmax;
    if (exact || m_eff >= n) {
        out.converged = true;
        return out;
    }
    double resid = h(k_done, k_done - 1) * std::abs(es.eigenvectors()(k_done - 1, imax));
    out.converged = resid <= rtol * rmax;
    return out;
}

}  // namespace

double spectral_radius(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m,
                       std::uint64_t probe_seed) {
    const int n = static_cast<int>(m.rows());
    if (n == 0) return 0.0;
    if (m.nonZeros() == 0) return 0.0;
    auto rng = substream(probe_seed, kSpectralProbeStream);
    Eigen::VectorXd start(n);
    for (int i = 0; i < n; ++i) start(i) = uniform(rng, -1.0, 1.0);
    if (start.norm() == 0.0) start.setOnes();
    ArnoldiResult last;
    for (int dim : {60, 120, 240, 480}) {
        last = arnoldi_pass(m, start, dim, 1e-7);
        if (last.converged) return last.radius;
        if (dim >= n) return last.radius;
    }
    throw numeric_error("spectral radius estimation failed to converge (seed " +
                        std::to_string(probe_seed) + ")");
}

ReservoirWeights init_reservoir(const ReservoirConfig& config) {
    config.validate();
    // domain-separated from dataset record substreams, which use small indices
    auto rng = substream(config.seed, 0x5245534552564F49ULL);
    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> rec_entries;
    rec_entries.reserve(static_cast<std::size_t>(config.units) * config.recurrent_connectivity);
    for (std::uint32_t i = 0; i < config.units; ++i) {
        auto cols = sample_without_replacement(rng, config.units, config.recurrent_connectivity);
        for (auto c : cols)
            rec_entries.emplace_back(static_cast<int>(i), static_cast<int>(c),
                                     uniform(rng, -1.0, 1.0));
    }
    std::vector<Triplet> in_entries;
    in_entries.reserve(static_cast<std::size_t>(config.units) * config.input_connectivity);
    for (std::uint32_t i = 0; i < config.units; ++i) {
        auto cols = sample_without_replacement(rng, config.input_dim, config.input_connectivity);
        for (auto c : cols)
            in_entries.emplace_back(static_cast<int>(i), static_cast<int>(c),
                                    uniform(rng, -1.0, 1.0));
    }
    ReservoirWeights w;
    w.config = config;
    w.w_rec.resize(config.units, config.units);
    w.w_rec.setFromTriplets(rec_entries.begin(), rec_entries.end());
    w.w_rec.makeCompressed();
    w.w_in.resize(config.units, config.input_dim);
    w.w_in.setFromTriplets(in_entries.begin(), in_entries.end());
    w.w_in.makeCompressed();
    if (config.spectral_radius == 0.0) {
        w.w_rec.setZero();
    } else {
        double rho = spectral_radius(w.w_rec, config.seed);
        if (rho == 0.0)
            throw numeric_error("reservoir has zero spectral radius; cannot rescale (seed " +
                                std::to_string(config.seed) + ")");
        w.w_rec *= config.spectral_radius / rho;
    }
    w.w_in *= config.input_scaling;
    return w;
}

namespace {

void check_sequence(const ReservoirWeights& weights, const Eigen::MatrixXd& sequence) {
    if (sequence.rows() != static_cast<Eigen::Index>(weights.config.input_dim))
        throw input_error("sequence dimension " + std::to_string(sequence.rows()) +
                          " does not match input_dim " + std::to_string(weights.config.input_dim));
}

}  // namespace

Eigen::VectorXd run_sequence(const ReservoirWeights& weights, const Eigen::MatrixXd& sequence) {
    check_sequence(weights, sequence);
    const auto steps = sequence.cols();
    const auto washout = static_cast<Eigen::Index>(weights.config.washout);
    if (steps <= washout)
        throw input_error("sequence length " + std::to_string(steps) +
                          " must exceed washout " + std::to_string(washout));
    const double a = weights.config.leaking_rate;
    const auto units = static_cast<Eigen::Index>(weights.config.units);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(units);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(units);
    Eigen::VectorXd drive(units);
    for (Eigen::Index t = 0; t < steps; ++t) {
        drive.noalias() = weights.w_rec * x;
        drive.noalias() += weights.w_in * sequence.col(t);
        x = (1.0 - a) * x + a * drive.array().tanh().matrix();
        if (t >= washout) acc += x;
    }
    acc /= static_cast<double>(steps - washout);
    Eigen::VectorXd feature(units + 1);
    feature.head(units) = acc;
    feature(units) = 1.0;
    return feature;
}

Eigen::VectorXd run_sequence_from(const ReservoirWeights& weights,
                                  const Eigen::MatrixXd& sequence,
                                  const Eigen::VectorXd& initial_state) {
    check_sequence(weights, sequence);
    if (initial_state.size() != static_cast<Eigen::Index>(weights.config.units))
        throw input_error("initial state size does not match units");
    const double a = weights.config.leaking_rate;
    Eigen::VectorXd x = initial_state;
    Eigen::VectorXd drive(x.size());
    for (Eigen::Index t = 0; t < sequence.cols(); ++t) {
        drive.noalias() = weights.w_rec * x;
        drive.noalias() += weights.w_in * sequence.col(t);
        x = (1.0 - a) * x + a * drive.array().tanh().matrix();
    }
    return x;
}

Eigen::MatrixXd solve_normal_equations(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& gamma,
                                       double beta) {
    if (omega.rows() != omega.cols()) throw input_error("moment matrix must be square");
    if (gamma.cols() != omega.rows())
        throw input_error("gamma has " + std::to_string(gamma.cols()) +
                          " features but omega has " + std::to_string(omega.rows()));
    if (beta < 0.0) throw input_error("beta must be >= 0");
    Eigen::MatrixXd gram = omega;
    gram.diagonal().array() += beta;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw numeric_error("ridge system not positive definite; increase beta (> 0)");
    Eigen::MatrixXd theta = llt.solve(gamma.transpose()).transpose();
    double rhs_norm = gamma.norm();
    double resid = (theta * gram - gamma).norm();
    if (resid > 1e-8 * rhs_norm)
        throw numeric_error("ridge solve residual " + std::to_string(resid / rhs_norm) +
                            " exceeds 1e-8 relative; increase beta (> 0)");
    return theta;
}

ReadoutWeights solve_readout(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& y, double beta) {
    if (phi.cols() != y.cols())
        throw input_error("phi has " + std::to_string(phi.cols()) + " samples but y has " +
                          std::to_string(y.cols()));
    ReadoutWeights out;
    out.theta = solve_normal_equations(phi * phi.transpose(), y * phi.transpose(), beta);
    return out;
}

std::pair<Eigen::VectorXd, std::uint32_t> classify(const ReadoutWeights& theta,
                                                   const Eigen::VectorXd& feature) {
    if (theta.theta.cols() != feature.size())
        throw input_error("feature dimension does not match readout columns");
    Eigen::VectorXd scores = theta.theta * feature;
    std::uint32_t best = 0;
    for (Eigen::Index i = 1; i < scores.size(); ++i)
        if (scores(i) > scores(best)) best = static_cast<std::uint32_t>(i);
    return {scores, best};
}

}  // namespace frc
