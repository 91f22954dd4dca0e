#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "boxproj/box_l1.hpp"
#include "boxproj/common.hpp"

namespace boxproj {

// ── Synthetic data ──────────────────────────────────────────────────

struct LogisticDataset {
    Eigen::MatrixXd features;      // n_samples x n_features
    Eigen::VectorXd labels;        // entries in {0, 1}
    Eigen::VectorXd true_weights;  // generating weights (synthetic data only)
    std::vector<Eigen::Index> flipped;  // rows whose label was noise-flipped
};

namespace detail {

// Laplace (generalized Gaussian, shape 1) via inverse CDF.
inline double sample_laplace(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u = unit(rng);
    while (u <= 0.0 || u >= 1.0) u = unit(rng);
    return u < 0.5 ? scale * std::log(2.0 * u) : -scale * std::log(2.0 * (1.0 - u));
}

inline double sigmoid(double t) {
    return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

// log(1 + exp(t)) without overflow
inline double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

}  // namespace detail

/// Sparse-ground-truth logistic data: weights drawn Laplace(0, 0.2) and
/// resampled until inside [-0.5, 0.5], a uniformly random half of them
/// zeroed, standard normal features, Bernoulli labels from the logistic
/// likelihood, and floor(m/10) labels flipped at random positions.
/// Deterministic for a given seed.
inline LogisticDataset generate_synthetic(Eigen::Index n_features, Eigen::Index n_samples,
                                          std::uint64_t seed) {
    if (n_features < 1 || n_samples < 1)
        throw InvalidInputError("generate_synthetic: dimensions must be positive");
    std::mt19937_64 rng(seed);

    LogisticDataset data;
    data.true_weights.resize(n_features);
    for (Eigen::Index i = 0; i < n_features; ++i) {
        double w;
        do {
            w = detail::sample_laplace(rng, 0.2);
        } while (std::abs(w) > 0.5);
        data.true_weights[i] = w;
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n_features));
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index i = 0; i < n_features / 2; ++i) data.true_weights[order[i]] = 0.0;

    std::normal_distribution<double> gauss(0.0, 1.0);
    data.features.resize(n_samples, n_features);
    for (Eigen::Index r = 0; r < n_samples; ++r)
        for (Eigen::Index c = 0; c < n_features; ++c) data.features(r, c) = gauss(rng);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    data.labels.resize(n_samples);
    for (Eigen::Index r = 0; r < n_samples; ++r) {
        const double p = detail::sigmoid(data.features.row(r).dot(data.true_weights));
        data.labels[r] = unit(rng) < p ? 1.0 : 0.0;
    }

    std::vector<Eigen::Index> flip(static_cast<std::size_t>(n_samples));
    std::iota(flip.begin(), flip.end(), Eigen::Index(0));
    std::shuffle(flip.begin(), flip.end(), rng);
    data.flipped.assign(flip.begin(), flip.begin() + n_samples / 10);
    for (Eigen::Index i : data.flipped) data.labels[i] = 1.0 - data.labels[i];

    return data;
}

// ── Objective ───────────────────────────────────────────────────────

/// Mean logistic log loss and its gradient (1/m) X^T (sigmoid(Xw) - y),
/// evaluated with overflow-safe softplus/sigmoid.
inline std::pair<double, Eigen::VectorXd> logistic_objective_grad(const Eigen::VectorXd& w,
                                                                  const Eigen::MatrixXd& X,
                                                                  const Eigen::VectorXd& y) {
    if (X.cols() != w.size() || X.rows() != y.size())
        throw ShapeError("logistic_objective_grad: shape mismatch");
    const auto m = static_cast<double>(X.rows());
    const Eigen::VectorXd margins = X * w;
    double loss = 0;
    Eigen::VectorXd residual(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        loss += detail::softplus(margins[i]) - y[i] * margins[i];
        residual[i] = detail::sigmoid(margins[i]) - y[i];
    }
    return {loss / m, (X.transpose() * residual) / m};
}

/// Guaranteed-descent step 1/L for the mean logistic loss, with
/// L = ||X||_op^2 / (4m) estimated by power iteration (5% safety margin).
inline double suggested_step_size(const Eigen::MatrixXd& X) {
    if (X.size() == 0) throw ShapeError("suggested_step_size: empty matrix");
    Eigen::VectorXd u = Eigen::VectorXd::Ones(X.cols()).normalized();
    double lambda = 0;
    for (int it = 0; it < 60; ++it) {
        Eigen::VectorXd next = X.transpose() * (X * u);
        const double norm = next.norm();
        if (norm == 0) break;
        u = next / norm;
        lambda = norm;
    }
    const double lipschitz = 1.05 * lambda / (4.0 * static_cast<double>(X.rows()));
    if (lipschitz <= 0) return 1.0;
    return 1.0 / lipschitz;
}

// ── Projected gradient ──────────────────────────────────────────────

struct PGConfig {
    int max_iters = 100;
    double step_size = 0;  // must be positive
    double budget = 0;     // L1 budget for the projector helpers
    std::optional<std::pair<double, double>> box;  // uniform bounds, when present
    std::uint64_t seed = 0;                        // used by drivers that generate data
    std::optional<double> reference_objective;     // f at a long-run reference solve, if known
};

struct PGTrace {
    std::vector<double> objectives;  // objective at each iterate, pre-update
    Eigen::VectorXd final_iterate;
    std::optional<double> reference_objective;  // copied from the config when supplied
};

/// Generic projected-gradient loop: w <- project(w - step * grad), starting
/// from w0, recording the objective at every iterate. Aborts on a non-finite
/// objective or gradient.
template <class Objective, class Projector>
PGTrace projected_gradient_loop(Objective&& objective, Eigen::VectorXd w0, const PGConfig& cfg,
                                Projector&& project) {
    if (cfg.max_iters < 1) throw InvalidInputError("projected_gradient: max_iters must be >= 1");
    if (!(cfg.step_size > 0)) throw InvalidInputError("projected_gradient: step_size must be positive");

    PGTrace trace;
    trace.reference_objective = cfg.reference_objective;
    trace.objectives.reserve(static_cast<std::size_t>(cfg.max_iters));
    Eigen::VectorXd w = std::move(w0);
    for (int k = 0; k < cfg.max_iters; ++k) {
        auto [f, g] = objective(w);
        if (!std::isfinite(f) || !g.allFinite())
            throw std::runtime_error("projected_gradient: objective diverged at iteration " +
                                     std::to_string(k));
        trace.objectives.push_back(f);
        w = project(w - cfg.step_size * g);
    }
    trace.final_iterate = std::move(w);
    return trace;
}

/// Projected gradient on the mean logistic loss of `data`, from w = 0.
inline PGTrace projected_gradient(const LogisticDataset& data, const PGConfig& cfg,
                                  const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& project) {
    auto objective = [&data](const Eigen::VectorXd& w) {
        return logistic_objective_grad(w, data.features, data.labels);
    };
    return projected_gradient_loop(objective, Eigen::VectorXd::Zero(data.features.cols()), cfg,
                                   project);
}

/// Projector onto { w : ||w||_1 <= budget, lo <= w_i <= hi } (box optional).
inline std::function<Eigen::VectorXd(const Eigen::VectorXd&)> box_l1_projector(
    double budget, std::optional<std::pair<double, double>> box = std::nullopt) {
    const double lo = box ? box->first : -std::numeric_limits<double>::infinity();
    const double hi = box ? box->second : std::numeric_limits<double>::infinity();
    return [budget, lo, hi](const Eigen::VectorXd& w) {
        const auto n = static_cast<std::size_t>(w.size());
        BoxL1Problem<double> p{std::vector<double>(w.data(), w.data() + n),
                               std::vector<double>(n, lo), std::vector<double>(n, hi), budget};
        const std::vector<double> x = project_box_l1(p);
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(x.data(), w.size()));
    };
}

}  // namespace boxproj
