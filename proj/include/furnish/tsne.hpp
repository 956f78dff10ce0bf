#pragma once

// Exact t-SNE into three dimensions. Intended for small inputs (tens of
// points), so every pairwise term is computed directly.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <furnish/error.hpp>

namespace furnish {

using Point3 = std::array<double, 3>;

struct TsneParams {
    double perplexity = 5.0;
    int iterations = 1000;
    double learning_rate = 100.0;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch_iteration = 250;
    double exaggeration = 4.0;
    int exaggeration_iterations = 100;
    double init_stddev = 1e-4;
    std::uint64_t seed = 0;
};

struct TsneResult {
    std::vector<Point3> points;
    double initial_kl = 0.0;
    double final_kl = 0.0;
};

namespace tsne {

    using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    inline Matrix squared_distances(const Matrix& x)
    {
        const Eigen::Index n = x.rows();
        Matrix d(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            d(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double v = (x.row(i) - x.row(j)).squaredNorm();
                d(i, j) = v;
                d(j, i) = v;
            }
        }
        return d;
    }

    /// Row-conditional Gaussian affinities p(j|i), each row's precision found
    /// by bisection so the row entropy matches log(perplexity).
    inline Matrix conditional_affinities(const Matrix& x, double perplexity)
    {
        const Eigen::Index n = x.rows();
        if (n < 2)
            throw ValidationError("t-SNE needs at least 2 points");
        if (!(perplexity > 0.0) || perplexity >= double(n - 1))
            throw ValidationError("perplexity " + std::to_string(perplexity) + " must be positive and below N-1 = " + std::to_string(n - 1));

        constexpr int max_steps = 64;
        constexpr double tolerance = 1e-5;
        const double target = std::log(perplexity);
        const Matrix d = squared_distances(x);
        Matrix cond = Matrix::Zero(n, n);

        for (Eigen::Index i = 0; i < n; ++i) {
            // Shifting by the nearest distance leaves the normalized row unchanged.
            double d_min = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i)
                    d_min = std::min(d_min, d(i, j));

            double beta = 1.0;
            double lo = 0.0;
            double hi = std::numeric_limits<double>::infinity();
            bool converged = false;
            for (int step = 0; step < max_steps; ++step) {
                double sum = 0.0;
                double weighted = 0.0;
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (j == i)
                        continue;
                    const double shifted = d(i, j) - d_min;
                    const double p = std::exp(-beta * shifted);
                    cond(i, j) = p;
                    sum += p;
                    weighted += shifted * p;
                }
                const double entropy = std::log(sum) + beta * weighted / sum;
                cond.row(i) /= sum;

                const double diff = entropy - target;
                if (std::abs(diff) < tolerance) {
                    converged = true;
                    break;
                }
                if (diff > 0.0) {
                    lo = beta;
                    beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
                }
                else {
                    hi = beta;
                    beta = 0.5 * (beta + lo);
                }
            }
            if (!converged)
                throw RuntimeFailure("perplexity search did not converge for point " + std::to_string(i));
        }

        return cond;
    }

    /// Symmetrized joint affinities (p(j|i) + p(i|j)) / 2N.
    inline Matrix input_affinities(const Matrix& x, double perplexity)
    {
        const Matrix cond = conditional_affinities(x, perplexity);
        return (cond + cond.transpose()) / (2.0 * double(x.rows()));
    }

    /// Student-t kernel numerators (1 + |yi - yj|^2)^-1 with a zero diagonal.
    inline Matrix student_kernel(const Matrix& y)
    {
        Matrix k = squared_distances(y);
        for (Eigen::Index i = 0; i < k.rows(); ++i)
            for (Eigen::Index j = 0; j < k.cols(); ++j)
                k(i, j) = (i == j) ? 0.0 : 1.0 / (1.0 + k(i, j));
        return k;
    }

    inline double kl_divergence(const Matrix& p, const Matrix& y)
    {
        const Matrix k = student_kernel(y);
        const double z = k.sum();
        double kl = 0.0;
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            for (Eigen::Index j = 0; j < p.cols(); ++j)
                if (i != j && p(i, j) > 0.0)
                    kl += p(i, j) * std::log(p(i, j) / (k(i, j) / z));
        return kl;
    }

    /// dKL/dY = 4 sum_j (p_ij - q_ij) (y_i - y_j) / (1 + |y_i - y_j|^2).
    inline Matrix kl_gradient(const Matrix& p, const Matrix& y)
    {
        const Matrix k = student_kernel(y);
        const double z = k.sum();
        Matrix grad = Matrix::Zero(y.rows(), y.cols());
        for (Eigen::Index i = 0; i < y.rows(); ++i)
            for (Eigen::Index j = 0; j < y.rows(); ++j) {
                if (i == j)
                    continue;
                const double mult = (p(i, j) - k(i, j) / z) * k(i, j);
                grad.row(i) += 4.0 * mult * (y.row(i) - y.row(j));
            }
        return grad;
    }

    /// Gradient descent with momentum, per-coordinate adaptive gains and early exaggeration.
    inline Matrix optimize(const Matrix& p, Matrix y, const TsneParams& params)
    {
        Matrix velocity = Matrix::Zero(y.rows(), y.cols());
        Matrix gains = Matrix::Ones(y.rows(), y.cols());
        for (int iter = 0; iter < params.iterations; ++iter) {
            const bool exaggerate = iter < params.exaggeration_iterations;
            const Matrix grad = exaggerate ? kl_gradient(p * params.exaggeration, y) : kl_gradient(p, y);
            const double momentum = iter < params.momentum_switch_iteration ? params.initial_momentum : params.final_momentum;
            for (Eigen::Index i = 0; i < y.rows(); ++i)
                for (Eigen::Index c = 0; c < y.cols(); ++c) {
                    double& gain = gains(i, c);
                    gain = ((grad(i, c) > 0.0) != (velocity(i, c) > 0.0)) ? gain + 0.2 : gain * 0.8;
                    gain = std::max(gain, 0.01);
                    velocity(i, c) = momentum * velocity(i, c) - params.learning_rate * gain * grad(i, c);
                }
            y += velocity;
            y.rowwise() -= y.colwise().mean();
        }
        return y;
    }

} // namespace tsne

/// Embeds the rows of `x` (one point per row) into 3D.
inline TsneResult tsne_reduce(const tsne::Matrix& x, const TsneParams& params)
{
    if (params.iterations < 1)
        throw ValidationError("t-SNE iterations must be >= 1");
    const tsne::Matrix p = tsne::input_affinities(x, params.perplexity);

    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> normal(0.0, params.init_stddev);
    tsne::Matrix y(x.rows(), 3);
    for (Eigen::Index i = 0; i < y.rows(); ++i)
        for (Eigen::Index c = 0; c < 3; ++c)
            y(i, c) = normal(rng);

    TsneResult result;
    result.initial_kl = tsne::kl_divergence(p, y);
    y = tsne::optimize(p, std::move(y), params);
    result.final_kl = tsne::kl_divergence(p, y);
    result.points.resize(std::size_t(y.rows()));
    for (Eigen::Index i = 0; i < y.rows(); ++i)
        result.points[std::size_t(i)] = {y(i, 0), y(i, 1), y(i, 2)};
    return result;
}

} // namespace furnish
