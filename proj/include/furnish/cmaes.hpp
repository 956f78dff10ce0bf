#pragma once

// (mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation and
// rank-one plus rank-mu covariance updates. Hyperparameters follow Hansen's
// standard defaults as functions of the dimension. The caller supplies the
// ranking, so the same update serves plain fitness ranking and CMA-ME's
// improvement ranking.

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <furnish/error.hpp>

namespace furnish {

struct CmaEsState {
    using Vector = Eigen::VectorXd;
    using Matrix = Eigen::MatrixXd;

    int dim = 0;
    int lambda = 0;
    int mu = 0;
    std::vector<double> weights;
    double mu_eff = 0.0;

    double c_sigma = 0.0;
    double d_sigma = 0.0;
    double c_c = 0.0;
    double c_1 = 0.0;
    double c_mu = 0.0;
    double chi_n = 0.0;

    Vector mean;
    double sigma = 0.0;
    Matrix cov;
    Vector path_sigma;
    Vector path_c;
    long generation = 0;

    // cov = basis * diag(eigenvalues) * basis^T
    Matrix basis;
    Vector eigenvalues;

    static constexpr double kMinEigenvalue = 1e-12;
    static constexpr double kMinSigma = 1e-12;
    static constexpr double kMaxSigma = 1e6;

    static int default_lambda(int dim) { return 4 + int(std::floor(3.0 * std::log(double(dim)))); }

    CmaEsState() = default;

    CmaEsState(const Vector& initial_mean, double sigma0, int lambda_ = 0)
    {
        dim = int(initial_mean.size());
        if (dim < 1)
            throw ValidationError("CMA-ES dimension must be positive");
        if (!(sigma0 > 0.0))
            throw ValidationError("CMA-ES sigma0 must be positive");
        lambda = lambda_ > 0 ? lambda_ : default_lambda(dim);
        if (lambda < 2)
            throw ValidationError("CMA-ES lambda must be at least 2");
        mu = lambda / 2;

        weights.resize(std::size_t(mu));
        const double base = std::log((double(lambda) + 1.0) / 2.0);
        double sum = 0.0;
        for (int i = 0; i < mu; ++i) {
            weights[std::size_t(i)] = base - std::log(double(i + 1));
            sum += weights[std::size_t(i)];
        }
        double sq = 0.0;
        for (double& w : weights) {
            w /= sum;
            sq += w * w;
        }
        mu_eff = 1.0 / sq;

        const double n = double(dim);
        c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
        d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
        c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
        c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
        c_mu = std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) * (n + 2.0) + mu_eff));
        chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

        reset(initial_mean, sigma0);
    }

    /// Fresh search distribution at `new_mean`; hyperparameters are kept.
    void reset(const Vector& new_mean, double sigma0)
    {
        mean = new_mean;
        sigma = sigma0;
        cov = Matrix::Identity(dim, dim);
        basis = Matrix::Identity(dim, dim);
        eigenvalues = Vector::Ones(dim);
        path_sigma = Vector::Zero(dim);
        path_c = Vector::Zero(dim);
        generation = 0;
    }

    /// Recomputes the eigendecomposition; false if cov or sigma left the valid range.
    bool decompose()
    {
        cov = 0.5 * (cov + cov.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
        if (solver.info() != Eigen::Success)
            return false;
        eigenvalues = solver.eigenvalues();
        basis = solver.eigenvectors();
        if (!(eigenvalues.minCoeff() > kMinEigenvalue) || !eigenvalues.allFinite())
            return false;
        return sigma > kMinSigma && sigma < kMaxSigma && std::isfinite(sigma) && mean.allFinite();
    }
};

/// lambda draws of mean + sigma * B * D^(1/2) * n, n ~ N(0, I).
template <typename Rng>
std::vector<Eigen::VectorXd> cmaes_sample(const CmaEsState& state, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::MatrixXd transform = state.basis * state.eigenvalues.cwiseSqrt().asDiagonal();
    std::vector<Eigen::VectorXd> out;
    out.reserve(std::size_t(state.lambda));
    for (int k = 0; k < state.lambda; ++k) {
        Eigen::VectorXd n(state.dim);
        for (int i = 0; i < state.dim; ++i)
            n[i] = normal(rng);
        out.push_back(state.mean + state.sigma * (transform * n));
    }
    return out;
}

/// One generation given solutions sorted best first (at least mu of them).
/// Returns false when the updated state violates its numerical invariants
/// and the caller should restart.
inline bool cmaes_update(CmaEsState& s, std::span<const Eigen::VectorXd> ranked)
{
    if (int(ranked.size()) < s.mu)
        throw ValidationError("cmaes_update needs at least mu ranked solutions");
    const Eigen::VectorXd old_mean = s.mean;

    Eigen::VectorXd new_mean = Eigen::VectorXd::Zero(s.dim);
    for (int i = 0; i < s.mu; ++i)
        new_mean += s.weights[std::size_t(i)] * ranked[std::size_t(i)];
    const Eigen::VectorXd y_w = (new_mean - old_mean) / s.sigma;

    const Eigen::MatrixXd inv_sqrt = s.basis * s.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() * s.basis.transpose();
    s.path_sigma = (1.0 - s.c_sigma) * s.path_sigma + std::sqrt(s.c_sigma * (2.0 - s.c_sigma) * s.mu_eff) * (inv_sqrt * y_w);

    const double n = double(s.dim);
    const double norm_ps = s.path_sigma.norm();
    const double decay = 1.0 - std::pow(1.0 - s.c_sigma, 2.0 * double(s.generation + 1));
    const bool h_sigma = norm_ps / std::sqrt(decay) < (1.4 + 2.0 / (n + 1.0)) * s.chi_n;

    s.path_c = (1.0 - s.c_c) * s.path_c;
    if (h_sigma)
        s.path_c += std::sqrt(s.c_c * (2.0 - s.c_c) * s.mu_eff) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(s.dim, s.dim);
    for (int i = 0; i < s.mu; ++i) {
        const Eigen::VectorXd y = (ranked[std::size_t(i)] - old_mean) / s.sigma;
        rank_mu += s.weights[std::size_t(i)] * y * y.transpose();
    }
    const double correction = h_sigma ? 0.0 : s.c_c * (2.0 - s.c_c);
    s.cov = (1.0 - s.c_1 - s.c_mu) * s.cov + s.c_1 * (s.path_c * s.path_c.transpose() + correction * s.cov) + s.c_mu * rank_mu;

    s.sigma *= std::exp((s.c_sigma / s.d_sigma) * (norm_ps / s.chi_n - 1.0));
    s.mean = new_mean;
    ++s.generation;
    return s.decompose();
}

} // namespace furnish
