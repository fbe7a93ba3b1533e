#pragma once
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "seqdesign/rng.hpp"

namespace seqdesign {

using Placement = double;
using Outcome = double;

// A node of an outcome expectation: E[f(Y) | theta, x] ~ sum weight * f(y).
// Discrete models list every outcome with its probability; continuous models
// return a quadrature rule.
struct WeightedOutcome {
    Outcome y;
    double weight;
};

// Admissible placements: a closed interval or an explicit finite list.
struct PlacementSet {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> finite;

    bool is_interval() const { return finite.empty(); }
    // Uniform candidate grid (endpoints included) or the finite list itself.
    std::vector<Placement> candidates(std::size_t count) const;
};

class ObservationModel {
public:
    virtual ~ObservationModel() = default;

    virtual std::string_view name() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::vector<double> lower_bounds() const = 0;
    virtual std::vector<double> upper_bounds() const = 0;
    virtual PlacementSet placements() const = 0;

    // Zero for continuous outcomes.
    virtual std::size_t outcome_count() const = 0;
    virtual Outcome outcome_value(std::size_t k) const { return static_cast<Outcome>(k); }

    virtual double loglik(Outcome y, std::span<const double> theta, Placement x) const = 0;
    virtual std::vector<WeightedOutcome> outcome_rule(std::span<const double> theta,
                                                      Placement x) const = 0;
    virtual Outcome sample(std::span<const double> theta, Placement x, Rng& rng) const = 0;

    // Batch kernels over m parameter points (row-major m x dimension()).
    // Defaults loop the scalar methods and serve as the serial reference.
    virtual void add_loglik(Outcome y, Placement x, std::span<const double> thetas,
                            std::span<double> log_weights) const;
    // K x m row-major, p(y_k | theta_i, x). Discrete models only.
    virtual void outcome_probabilities(Placement x, std::span<const double> thetas,
                                       std::span<double> out) const;

    // Whether the log-likelihood is twice differentiable in theta. Models that
    // are not smooth have no score, Hessian, or Fisher information.
    virtual bool smooth() const { return true; }
    // Declared bound M on |score| and |neg_hessian| over the parameter box.
    virtual double derivative_bound() const { return std::numeric_limits<double>::infinity(); }

    // Analytic where overridden, central finite differences (step 1e-5) otherwise.
    virtual Eigen::VectorXd score(Outcome y, std::span<const double> theta, Placement x) const;
    virtual Eigen::MatrixXd neg_hessian(Outcome y, std::span<const double> theta, Placement x) const;
    virtual Eigen::MatrixXd fisher(std::span<const double> theta, Placement x) const;

    // Upper bound on the mutual information I(Theta; Y_x) for any posterior
    // supported in the box [lo, hi]. Used to skip hopeless candidates.
    virtual double gain_upper_bound(std::span<const double> lo, std::span<const double> hi,
                                    Placement x) const;

    bool discrete() const { return outcome_count() > 0; }
};

inline constexpr double default_fd_step = 1e-5;

Eigen::VectorXd score_fd(const ObservationModel& model, Outcome y, std::span<const double> theta,
                         Placement x, double step = default_fd_step);
Eigen::MatrixXd neg_hessian_fd(const ObservationModel& model, Outcome y,
                               std::span<const double> theta, Placement x,
                               double step = default_fd_step);
// sum_y p(y|theta,x) s(y) s(y)^T with a central-difference score.
Eigen::MatrixXd fisher_numeric(const ObservationModel& model, std::span<const double> theta,
                               Placement x, double step = default_fd_step);
// sum_y p(y|theta,x) neg_hessian(y, theta, x).
Eigen::MatrixXd expected_neg_hessian(const ObservationModel& model, std::span<const double> theta,
                                     Placement x);

Outcome sample_outcome(const ObservationModel& model, std::span<const double> theta, Placement x,
                       Rng& rng);

inline double logistic(double u) {
    return u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
}

// log(1 + e^u) without overflow.
inline double softplus(double u) {
    return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
}

// e^u / (1 + e^u)^2, the Fisher information of a logistic trial at offset u = theta - x.
double fisher_psychometric(double theta, double x);

// p(1 | theta, x) = logistic(theta - x) on a threshold box [lower, upper].
class PsychometricModel final : public ObservationModel {
public:
    explicit PsychometricModel(double lower = 0.0, double upper = 100.0);

    std::string_view name() const override { return "psychometric"; }
    std::size_t dimension() const override { return 1; }
    std::vector<double> lower_bounds() const override { return {lower_}; }
    std::vector<double> upper_bounds() const override { return {upper_}; }
    PlacementSet placements() const override { return {lower_, upper_, {}}; }
    std::size_t outcome_count() const override { return 2; }

    double loglik(Outcome y, std::span<const double> theta, Placement x) const override;
    std::vector<WeightedOutcome> outcome_rule(std::span<const double> theta,
                                              Placement x) const override;
    Outcome sample(std::span<const double> theta, Placement x, Rng& rng) const override;

    void add_loglik(Outcome y, Placement x, std::span<const double> thetas,
                    std::span<double> log_weights) const override;
    void outcome_probabilities(Placement x, std::span<const double> thetas,
                               std::span<double> out) const override;

    double derivative_bound() const override { return 1.0; }
    Eigen::VectorXd score(Outcome y, std::span<const double> theta, Placement x) const override;
    Eigen::MatrixXd neg_hessian(Outcome y, std::span<const double> theta,
                                Placement x) const override;
    Eigen::MatrixXd fisher(std::span<const double> theta, Placement x) const override;
    double gain_upper_bound(std::span<const double> lo, std::span<const double> hi,
                            Placement x) const override;

private:
    double lower_;
    double upper_;
};

// y = theta . phi(x) + N(0, sigma^2). Outcome expectations use Gauss-Hermite.
class LinearGaussianModel final : public ObservationModel {
public:
    using FeatureMap = std::function<Eigen::VectorXd(Placement)>;

    LinearGaussianModel(std::vector<double> lower, std::vector<double> upper, FeatureMap features,
                        PlacementSet placements, double noise_sd, std::size_t quadrature_nodes = 32);

    // phi(x) = (1, x, ..., x^(n-1)).
    static FeatureMap polynomial_features(std::size_t dimension);

    std::string_view name() const override { return "linear-gaussian"; }
    std::size_t dimension() const override { return lower_.size(); }
    std::vector<double> lower_bounds() const override { return lower_; }
    std::vector<double> upper_bounds() const override { return upper_; }
    PlacementSet placements() const override { return placements_; }
    std::size_t outcome_count() const override { return 0; }

    Eigen::VectorXd features(Placement x) const { return features_(x); }
    double noise_sd() const { return noise_sd_; }

    double loglik(Outcome y, std::span<const double> theta, Placement x) const override;
    std::vector<WeightedOutcome> outcome_rule(std::span<const double> theta,
                                              Placement x) const override;
    Outcome sample(std::span<const double> theta, Placement x, Rng& rng) const override;
    void add_loglik(Outcome y, Placement x, std::span<const double> thetas,
                    std::span<double> log_weights) const override;

    double derivative_bound() const override;
    Eigen::VectorXd score(Outcome y, std::span<const double> theta, Placement x) const override;
    Eigen::MatrixXd neg_hessian(Outcome y, std::span<const double> theta,
                                Placement x) const override;
    Eigen::MatrixXd fisher(std::span<const double> theta, Placement x) const override;

private:
    double mean(std::span<const double> theta, Placement x) const;

    std::vector<double> lower_;
    std::vector<double> upper_;
    FeatureMap features_;
    PlacementSet placements_;
    double noise_sd_;
    std::vector<double> gh_nodes_;
    std::vector<double> gh_weights_;
};

// Theta uniform on {1, ..., 2^bits}. Question q < bits asks whether bit q of
// (theta - 1) is set; question bits + q asks the same through a second,
// typically more expensive, channel. Answers are noiseless.
class TwentyQuestionsModel final : public ObservationModel {
public:
    explicit TwentyQuestionsModel(std::size_t bits);

    std::string_view name() const override { return "twenty-questions"; }
    std::size_t dimension() const override { return 1; }
    std::vector<double> lower_bounds() const override { return {0.5}; }
    std::vector<double> upper_bounds() const override { return {static_cast<double>(size()) + 0.5}; }
    PlacementSet placements() const override;
    std::size_t outcome_count() const override { return 2; }
    bool smooth() const override { return false; }

    std::size_t bits() const { return bits_; }
    std::size_t size() const { return std::size_t{1} << bits_; }
    std::size_t channel(Placement x) const;
    bool answer(double theta, Placement x) const;

    double loglik(Outcome y, std::span<const double> theta, Placement x) const override;
    std::vector<WeightedOutcome> outcome_rule(std::span<const double> theta,
                                              Placement x) const override;
    Outcome sample(std::span<const double> theta, Placement x, Rng& rng) const override;
    void outcome_probabilities(Placement x, std::span<const double> thetas,
                               std::span<double> out) const override;

    Eigen::VectorXd score(Outcome, std::span<const double>, Placement) const override;
    Eigen::MatrixXd neg_hessian(Outcome, std::span<const double>, Placement) const override;
    Eigen::MatrixXd fisher(std::span<const double>, Placement) const override;

private:
    std::size_t bits_;
};

// Physicists' Gauss-Hermite rule: integral e^{-z^2} f(z) dz ~ sum w_k f(z_k).
void gauss_hermite(std::size_t count, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace seqdesign
