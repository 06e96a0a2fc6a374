#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fasthymix {

/// One-dimensional K-component Gaussian mixture.
struct GmmParams {
    Eigen::VectorXd pi;      ///< mixing proportions, nonnegative, sum to one
    Eigen::VectorXd mu;      ///< component means
    Eigen::VectorXd sigma2;  ///< component variances
    double loglik = 0.0;     ///< log-likelihood of the data the params were fitted to
    int iterations = 0;      ///< EM iterations (M-steps) performed

    Eigen::Index components() const { return pi.size(); }
};

struct EmOptions {
    double tol = 1e-7;  ///< relative log-likelihood change that stops EM; negative runs max_iter iterations
    int max_iter = 200;
    /// Lower bound on every component variance; a negative value selects
    /// (1e-6 * range(data))^2.
    double variance_floor = -1.0;
    int max_restarts = 3;
    std::uint64_t seed = 0;  ///< drives restart perturbations only
    /// Called once for the initial parameters and after every EM iteration
    /// with the current parameters and their log-likelihood.
    std::function<void(const GmmParams&)> on_iteration;
};

/// Initial parameters for K components.
///
/// K = 2: a dense core component (median, 1.4826 * MAD, pi = 0.9) and a
/// broad tail component centred on the median whose spread is the RMS
/// deviation of the samples lying more than three robust sigmas away
/// (pi = 0.1). K = 1: sample moments. K > 2: quantile-spaced means.
GmmParams gmm_default_init(std::span<const double> a, int components);

double gmm_log_likelihood(std::span<const double> a, const GmmParams& psi);

/// Posterior membership probabilities, one row per sample.
Eigen::MatrixXd gmm_responsibilities(std::span<const double> a, const GmmParams& psi);

/// Maximum-likelihood mixture fit by expectation-maximization, starting
/// from `init`. The log-likelihood never decreases between iterations.
/// A component that empties out triggers up to max_restarts restarts from a
/// perturbed `init`; FitFailureError after that.
GmmParams gmm_em_fit(std::span<const double> a, const GmmParams& init,
                     const EmOptions& options = {});

/// Index (0-based) of the component with the largest posterior for each
/// sample; ties go to the lower index.
std::vector<int> gmm_cluster(std::span<const double> a, const GmmParams& psi);

struct ModelScore {
    double aic = 0.0;
    double bic = 0.0;
    int free_parameters = 0;  ///< 3K - 1
    GmmParams fit;
};

/// AIC and BIC of a K-component fit started from gmm_default_init.
ModelScore model_selection_score(std::span<const double> a, int components,
                                 const EmOptions& options = {});

}  // namespace fasthymix
