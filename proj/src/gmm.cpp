#include "fasthymix/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fasthymix/errors.hpp"
#include "fasthymix/rng.hpp"
#include "fasthymix/stats.hpp"

namespace fasthymix {

namespace {

constexpr double kMadToSigma = 1.4826;
const double kLogTwoPi = std::log(2.0 * std::numbers::pi);

double log_density(double x, double mu, double sigma2) {
    const double d = x - mu;
    return -0.5 * (kLogTwoPi + std::log(sigma2) + d * d / sigma2);
}

void validate(const GmmParams& psi) {
    const auto k = psi.components();
    if (k < 1 || psi.mu.size() != k || psi.sigma2.size() != k) {
        throw ShapeError("mixture parameter vectors must share a positive length");
    }
    if ((psi.pi.array() < 0.0).any() || std::abs(psi.pi.sum() - 1.0) > 1e-9) {
        throw NumericalError("mixing proportions must be nonnegative and sum to one");
    }
    if (!(psi.sigma2.array() > 0.0).all() || !psi.mu.allFinite()) {
        throw NumericalError("mixture variances must be positive and means finite");
    }
}

double resolve_floor(std::span<const double> a, double requested) {
    if (requested > 0.0) return requested;
    const double range = value_range(a);
    if (range <= 0.0) throw DegenerateInputError("mixture fit on constant data");
    const double s = 1e-6 * range;
    return s * s;
}

// Fills log-posterior-normalized responsibilities into tau and returns the
// log-likelihood.
double e_step(std::span<const double> a, const GmmParams& psi, Eigen::MatrixXd& tau) {
    const auto k = psi.components();
    Eigen::VectorXd log_pi(k), log_norm(k), inv_var(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        log_pi(j) = psi.pi(j) > 0.0 ? std::log(psi.pi(j)) : -std::numeric_limits<double>::infinity();
        log_norm(j) = -0.5 * (kLogTwoPi + std::log(psi.sigma2(j)));
        inv_var(j) = 1.0 / psi.sigma2(j);
    }
    double loglik = 0.0;
    Eigen::VectorXd lp(k);
    for (std::size_t i = 0; i < a.size(); ++i) {
        double peak = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < k; ++j) {
            const double d = a[i] - psi.mu(j);
            lp(j) = log_pi(j) + log_norm(j) - 0.5 * d * d * inv_var(j);
            peak = std::max(peak, lp(j));
        }
        double sum = 0.0;
        for (Eigen::Index j = 0; j < k; ++j) sum += std::exp(lp(j) - peak);
        const double lse = peak + std::log(sum);
        for (Eigen::Index j = 0; j < k; ++j) {
            tau(static_cast<Eigen::Index>(i), j) = std::exp(lp(j) - lse);
        }
        loglik += lse;
    }
    return loglik;
}

struct Collapse {
    Eigen::Index component;
};

GmmParams m_step(std::span<const double> a, const Eigen::MatrixXd& tau, double floor) {
    const auto k = tau.cols();
    const auto n = static_cast<double>(a.size());
    GmmParams next;
    next.pi.resize(k);
    next.mu.resize(k);
    next.sigma2.resize(k);
    const Eigen::Map<const Eigen::VectorXd> x(a.data(), static_cast<Eigen::Index>(a.size()));
    for (Eigen::Index j = 0; j < k; ++j) {
        const double mass = tau.col(j).sum();
        if (!(mass > 1e-8 * n)) throw Collapse{j};
        const double mu = tau.col(j).dot(x) / mass;
        const double var = (tau.col(j).array() * (x.array() - mu).square()).sum() / mass;
        if (var < floor && mass < 2.0) throw Collapse{j};
        next.pi(j) = mass / n;
        next.mu(j) = mu;
        next.sigma2(j) = std::max(var, floor);
    }
    next.pi /= next.pi.sum();
    return next;
}

GmmParams run_em(std::span<const double> a, GmmParams psi, const EmOptions& options,
                 double floor) {
    const auto k = psi.components();
    Eigen::MatrixXd tau(static_cast<Eigen::Index>(a.size()), k);
    psi.sigma2 = psi.sigma2.cwiseMax(floor);
    psi.iterations = 0;
    psi.loglik = e_step(a, psi, tau);
    if (options.on_iteration) options.on_iteration(psi);
    for (int t = 1; t <= options.max_iter; ++t) {
        GmmParams next = m_step(a, tau, floor);
        next.iterations = t;
        next.loglik = e_step(a, next, tau);
        if (!std::isfinite(next.loglik)) {
            throw NumericalError("mixture log-likelihood is not finite");
        }
        if (options.on_iteration) options.on_iteration(next);
        const bool converged =
            std::abs(next.loglik - psi.loglik) <= options.tol * std::abs(psi.loglik);
        psi = std::move(next);
        if (converged || k == 1) break;
    }
    return psi;
}

GmmParams perturb(const GmmParams& init, Xoshiro256& rng) {
    GmmParams p = init;
    const double spread = std::sqrt(init.sigma2.mean());
    for (Eigen::Index j = 0; j < p.components(); ++j) {
        p.mu(j) += 0.5 * spread * rng.normal();
        p.sigma2(j) *= std::exp(0.5 * rng.normal());
    }
    return p;
}

}  // namespace

GmmParams gmm_default_init(std::span<const double> a, int components) {
    if (components < 1) throw ConfigError("mixture needs at least one component");
    if (a.size() < static_cast<std::size_t>(components)) {
        throw InsufficientDataError("fewer samples than mixture components");
    }
    const auto k = static_cast<Eigen::Index>(components);
    GmmParams psi;
    psi.pi.resize(k);
    psi.mu.resize(k);
    psi.sigma2.resize(k);
    const double sd = population_std(a);
    if (components == 1) {
        psi.pi(0) = 1.0;
        psi.mu(0) = mean(a);
        psi.sigma2(0) = sd * sd;
        return psi;
    }
    const double med = median(a);
    if (components == 2) {
        double core = kMadToSigma * median_absolute_deviation(a);
        if (!(core > 0.0)) core = sd;
        double tail_ss = 0.0;
        std::size_t tail_n = 0;
        for (double x : a) {
            if (std::abs(x - med) > 3.0 * core) {
                tail_ss += (x - med) * (x - med);
                ++tail_n;
            }
        }
        const double tail = tail_n > 0 ? std::sqrt(tail_ss / static_cast<double>(tail_n)) : 10.0 * core;
        psi.pi << 0.9, 0.1;
        psi.mu << med, med;
        psi.sigma2 << core * core, tail * tail;
        return psi;
    }
    std::vector<double> sorted(a.begin(), a.end());
    std::sort(sorted.begin(), sorted.end());
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto q = static_cast<std::size_t>((static_cast<double>(j) + 0.5) / static_cast<double>(k) *
                                                static_cast<double>(sorted.size()));
        psi.pi(j) = 1.0 / static_cast<double>(k);
        psi.mu(j) = sorted[std::min(q, sorted.size() - 1)];
        psi.sigma2(j) = sd * sd / static_cast<double>(k * k);
    }
    return psi;
}

double gmm_log_likelihood(std::span<const double> a, const GmmParams& psi) {
    validate(psi);
    Eigen::MatrixXd tau(static_cast<Eigen::Index>(a.size()), psi.components());
    return e_step(a, psi, tau);
}

Eigen::MatrixXd gmm_responsibilities(std::span<const double> a, const GmmParams& psi) {
    validate(psi);
    Eigen::MatrixXd tau(static_cast<Eigen::Index>(a.size()), psi.components());
    e_step(a, psi, tau);
    return tau;
}

GmmParams gmm_em_fit(std::span<const double> a, const GmmParams& init, const EmOptions& options) {
    validate(init);
    if (a.size() < static_cast<std::size_t>(init.components())) {
        throw InsufficientDataError("fewer samples than mixture components");
    }
    const double floor = resolve_floor(a, options.variance_floor);
    Xoshiro256 rng(options.seed);
    GmmParams start = init;
    for (int attempt = 0;; ++attempt) {
        try {
            return run_em(a, start, options, floor);
        } catch (const Collapse& c) {
            if (attempt >= options.max_restarts) {
                throw FitFailureError("mixture component " + std::to_string(c.component) +
                                      " collapsed after " + std::to_string(attempt) + " restarts");
            }
            start = perturb(init, rng);
        }
    }
}

std::vector<int> gmm_cluster(std::span<const double> a, const GmmParams& psi) {
    validate(psi);
    const auto k = psi.components();
    std::vector<int> labels(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < k; ++j) {
            if (psi.pi(j) <= 0.0) continue;
            const double score = std::log(psi.pi(j)) + log_density(a[i], psi.mu(j), psi.sigma2(j));
            if (score > best) {
                best = score;
                labels[i] = static_cast<int>(j);
            }
        }
    }
    return labels;
}

ModelScore model_selection_score(std::span<const double> a, int components, const EmOptions& options) {
    ModelScore score;
    score.fit = gmm_em_fit(a, gmm_default_init(a, components), options);
    score.free_parameters = 3 * components - 1;
    const double penalty = static_cast<double>(score.free_parameters);
    score.aic = -2.0 * score.fit.loglik + 2.0 * penalty;
    score.bic = -2.0 * score.fit.loglik + std::log(static_cast<double>(a.size())) * penalty;
    return score;
}

}  // namespace fasthymix
