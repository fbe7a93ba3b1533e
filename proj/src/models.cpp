#include "seqdesign/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "seqdesign/error.hpp"
#include "seqdesign/kernels.hpp"

namespace seqdesign {

std::vector<Placement> PlacementSet::candidates(std::size_t count) const {
    if (!finite.empty()) return finite;
    if (count == 0) throw Error(ErrorKind::parameter, "candidate count must be positive");
    if (count == 1) return {0.5 * (lower + upper)};
    std::vector<Placement> out(count);
    const double step = (upper - lower) / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) out[k] = lower + step * static_cast<double>(k);
    out.back() = upper;
    return out;
}

// ---------------------------------------------------------------------------
// Generic defaults

void ObservationModel::add_loglik(Outcome y, Placement x, std::span<const double> thetas,
                                  std::span<double> log_weights) const {
    const std::size_t n = dimension();
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        log_weights[i] += loglik(y, thetas.subspan(i * n, n), x);
    }
}

void ObservationModel::outcome_probabilities(Placement x, std::span<const double> thetas,
                                             std::span<double> out) const {
    const std::size_t K = outcome_count();
    if (K == 0) throw Error(ErrorKind::parameter, "outcome probabilities need a discrete model");
    const std::size_t n = dimension();
    const std::size_t m = thetas.size() / n;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < K; ++k) {
            out[k * m + i] = std::exp(loglik(outcome_value(k), thetas.subspan(i * n, n), x));
        }
    }
}

Eigen::VectorXd ObservationModel::score(Outcome y, std::span<const double> theta, Placement x) const {
    return score_fd(*this, y, theta, x);
}

Eigen::MatrixXd ObservationModel::neg_hessian(Outcome y, std::span<const double> theta,
                                              Placement x) const {
    return neg_hessian_fd(*this, y, theta, x);
}

Eigen::MatrixXd ObservationModel::fisher(std::span<const double> theta, Placement x) const {
    const std::size_t n = dimension();
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& [y, p] : outcome_rule(theta, x)) {
        if (p <= 0.0) continue;
        Eigen::VectorXd s = score(y, theta, x);
        info += p * s * s.transpose();
    }
    return info;
}

double ObservationModel::gain_upper_bound(std::span<const double>, std::span<const double>,
                                          Placement) const {
    const std::size_t K = outcome_count();
    return K > 0 ? std::log(static_cast<double>(K)) : std::numeric_limits<double>::infinity();
}

Eigen::VectorXd score_fd(const ObservationModel& model, Outcome y, std::span<const double> theta,
                         Placement x, double step) {
    if (!(step > 0.0)) throw Error(ErrorKind::parameter, "finite-difference step must be positive");
    const std::size_t n = theta.size();
    Eigen::VectorXd s(static_cast<Eigen::Index>(n));
    std::vector<double> t(theta.begin(), theta.end());
    for (std::size_t a = 0; a < n; ++a) {
        t[a] = theta[a] + step;
        const double up = model.loglik(y, t, x);
        t[a] = theta[a] - step;
        const double down = model.loglik(y, t, x);
        t[a] = theta[a];
        s[static_cast<Eigen::Index>(a)] = (up - down) / (2.0 * step);
    }
    return s;
}

Eigen::MatrixXd neg_hessian_fd(const ObservationModel& model, Outcome y,
                               std::span<const double> theta, Placement x, double step) {
    if (!(step > 0.0)) throw Error(ErrorKind::parameter, "finite-difference step must be positive");
    const std::size_t n = theta.size();
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd h(N, N);
    std::vector<double> t(theta.begin(), theta.end());
    auto f = [&](double da, std::size_t a, double db, std::size_t b) {
        t[a] += da;
        t[b] += db;
        double v = model.loglik(y, t, x);
        t[a] = theta[a];
        t[b] = theta[b];
        return v;
    };
    const double f0 = model.loglik(y, theta, x);
    for (std::size_t a = 0; a < n; ++a) {
        const double d2 = (f(step, a, 0.0, a) - 2.0 * f0 + f(-step, a, 0.0, a)) / (step * step);
        h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = -d2;
        for (std::size_t b = a + 1; b < n; ++b) {
            const double d = (f(step, a, step, b) - f(step, a, -step, b) - f(-step, a, step, b) +
                              f(-step, a, -step, b)) /
                             (4.0 * step * step);
            h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = -d;
            h(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = -d;
        }
    }
    return h;
}

Eigen::MatrixXd fisher_numeric(const ObservationModel& model, std::span<const double> theta,
                               Placement x, double step) {
    if (!(step > 0.0)) throw Error(ErrorKind::parameter, "finite-difference step must be positive");
    const auto N = static_cast<Eigen::Index>(theta.size());
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(N, N);
    for (const auto& [y, p] : model.outcome_rule(theta, x)) {
        if (p <= 0.0) continue;
        Eigen::VectorXd s = score_fd(model, y, theta, x, step);
        info += p * s * s.transpose();
    }
    return info;
}

Eigen::MatrixXd expected_neg_hessian(const ObservationModel& model, std::span<const double> theta,
                                     Placement x) {
    const auto N = static_cast<Eigen::Index>(theta.size());
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(N, N);
    for (const auto& [y, p] : model.outcome_rule(theta, x)) {
        if (p <= 0.0) continue;
        info += p * model.neg_hessian(y, theta, x);
    }
    return info;
}

Outcome sample_outcome(const ObservationModel& model, std::span<const double> theta, Placement x,
                       Rng& rng) {
    return model.sample(theta, x, rng);
}

// ---------------------------------------------------------------------------
// Psychometric

double fisher_psychometric(double theta, double x) {
    const double u = -std::abs(theta - x);
    const double e = std::exp(u);
    return e / ((1.0 + e) * (1.0 + e));
}

PsychometricModel::PsychometricModel(double lower, double upper) : lower_(lower), upper_(upper) {
    if (!(upper > lower)) throw Error(ErrorKind::parameter, "psychometric bounds must have positive width");
}

double PsychometricModel::loglik(Outcome y, std::span<const double> theta, Placement x) const {
    const double u = theta[0] - x;
    return y > 0.5 ? -softplus(-u) : -softplus(u);
}

std::vector<WeightedOutcome> PsychometricModel::outcome_rule(std::span<const double> theta,
                                                             Placement x) const {
    const double u = theta[0] - x;
    return {{0.0, logistic(-u)}, {1.0, logistic(u)}};
}

Outcome PsychometricModel::sample(std::span<const double> theta, Placement x, Rng& rng) const {
    // Inverse CDF over the ordered outcomes {0, 1}.
    return uniform01(rng) < logistic(-(theta[0] - x)) ? 0.0 : 1.0;
}

void PsychometricModel::add_loglik(Outcome y, Placement x, std::span<const double> thetas,
                                   std::span<double> log_weights) const {
    const double sign = y > 0.5 ? -1.0 : 1.0;
    kernels::parallel::for_each_index(log_weights.size(), [&](std::size_t i) {
        log_weights[i] -= softplus(sign * (thetas[i] - x));
    });
}

void PsychometricModel::outcome_probabilities(Placement x, std::span<const double> thetas,
                                              std::span<double> out) const {
    const std::size_t m = thetas.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double u = thetas[i] - x;
        out[i] = logistic(-u);
        out[m + i] = logistic(u);
    }
}

Eigen::VectorXd PsychometricModel::score(Outcome y, std::span<const double> theta, Placement x) const {
    const double u = theta[0] - x;
    Eigen::VectorXd s(1);
    s[0] = y > 0.5 ? logistic(-u) : -logistic(u);
    return s;
}

Eigen::MatrixXd PsychometricModel::neg_hessian(Outcome, std::span<const double> theta,
                                               Placement x) const {
    // Canonical link: the observed information does not depend on y.
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = fisher_psychometric(theta[0], x);
    return h;
}

Eigen::MatrixXd PsychometricModel::fisher(std::span<const double> theta, Placement x) const {
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = fisher_psychometric(theta[0], x);
    return h;
}

double PsychometricModel::gain_upper_bound(std::span<const double> lo, std::span<const double> hi,
                                           Placement x) const {
    const double a = lo[0] - x;
    const double b = hi[0] - x;
    // log p(1) and log p(0) at both ends; log p(0) = log p(1) - u.
    const double la1 = -softplus(-a), la0 = la1 - a;
    const double lb1 = -softplus(-b), lb0 = lb1 - b;
    const double pa1 = std::exp(la1), pb1 = std::exp(lb1);
    // I(Theta; Y) <= H(Y), and p(1) lies in [p_a, p_b].
    double entropy_bound = std::numbers::ln2;
    if (a > 0.0) entropy_bound = -pa1 * la1 - (1.0 - pa1) * la0;
    else if (b < 0.0) entropy_bound = -pb1 * lb1 - (1.0 - pb1) * lb0;
    // I = sum_i w_i KL(p_i || p_bar) is at most the largest KL between two
    // Bernoullis with parameters in [p_a, p_b], attained at the endpoints.
    const double d1 = lb1 - la1, d0 = lb0 - la0;
    const double kl_ba = pb1 * d1 + (1.0 - pb1) * d0;
    const double kl_ab = -pa1 * d1 - (1.0 - pa1) * d0;
    const double kl_bound = std::max({kl_ab, kl_ba, 0.0});
    return std::min(entropy_bound, kl_bound * (1.0 + 1e-9) + 1e-300);
}

// ---------------------------------------------------------------------------
// Linear Gaussian

void gauss_hermite(std::size_t count, std::vector<double>& nodes, std::vector<double>& weights) {
    // Golub-Welsch on the Hermite Jacobi matrix.
    const auto n = static_cast<Eigen::Index>(count);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) {
        J(i, i - 1) = J(i - 1, i) = std::sqrt(static_cast<double>(i) / 2.0);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    nodes.resize(count);
    weights.resize(count);
    const double mu0 = std::sqrt(std::numbers::pi);
    for (Eigen::Index i = 0; i < n; ++i) {
        nodes[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
        const double v = es.eigenvectors()(0, i);
        weights[static_cast<std::size_t>(i)] = mu0 * v * v;
    }
}

LinearGaussianModel::LinearGaussianModel(std::vector<double> lower, std::vector<double> upper,
                                         FeatureMap features, PlacementSet placements,
                                         double noise_sd, std::size_t quadrature_nodes)
    : lower_(std::move(lower)),
      upper_(std::move(upper)),
      features_(std::move(features)),
      placements_(std::move(placements)),
      noise_sd_(noise_sd) {
    if (lower_.empty() || lower_.size() != upper_.size()) {
        throw Error(ErrorKind::parameter, "linear-gaussian bounds must share a nonzero dimension");
    }
    if (!(noise_sd_ > 0.0)) throw Error(ErrorKind::parameter, "noise sd must be positive");
    if (quadrature_nodes == 0) throw Error(ErrorKind::parameter, "need at least one quadrature node");
    gauss_hermite(quadrature_nodes, gh_nodes_, gh_weights_);
}

LinearGaussianModel::FeatureMap LinearGaussianModel::polynomial_features(std::size_t dimension) {
    return [dimension](Placement x) {
        Eigen::VectorXd phi(static_cast<Eigen::Index>(dimension));
        double p = 1.0;
        for (Eigen::Index a = 0; a < phi.size(); ++a) {
            phi[a] = p;
            p *= x;
        }
        return phi;
    };
}

double LinearGaussianModel::mean(std::span<const double> theta, Placement x) const {
    const Eigen::VectorXd phi = features_(x);
    double mu = 0.0;
    for (std::size_t a = 0; a < theta.size(); ++a) mu += theta[a] * phi[static_cast<Eigen::Index>(a)];
    return mu;
}

double LinearGaussianModel::loglik(Outcome y, std::span<const double> theta, Placement x) const {
    const double r = (y - mean(theta, x)) / noise_sd_;
    return -0.5 * r * r - std::log(noise_sd_) - 0.5 * std::log(2.0 * std::numbers::pi);
}

std::vector<WeightedOutcome> LinearGaussianModel::outcome_rule(std::span<const double> theta,
                                                               Placement x) const {
    const double mu = mean(theta, x);
    std::vector<WeightedOutcome> rule(gh_nodes_.size());
    const double scale = std::sqrt(2.0) * noise_sd_;
    const double norm = 1.0 / std::sqrt(std::numbers::pi);
    for (std::size_t k = 0; k < rule.size(); ++k) {
        rule[k] = {mu + scale * gh_nodes_[k], norm * gh_weights_[k]};
    }
    return rule;
}

Outcome LinearGaussianModel::sample(std::span<const double> theta, Placement x, Rng& rng) const {
    return mean(theta, x) + noise_sd_ * standard_normal(rng);
}

void LinearGaussianModel::add_loglik(Outcome y, Placement x, std::span<const double> thetas,
                                     std::span<double> log_weights) const {
    const Eigen::VectorXd phi = features_(x);
    const std::size_t n = dimension();
    const double c = -std::log(noise_sd_) - 0.5 * std::log(2.0 * std::numbers::pi);
    kernels::parallel::for_each_index(log_weights.size(), [&](std::size_t i) {
        double mu = 0.0;
        for (std::size_t a = 0; a < n; ++a) mu += thetas[i * n + a] * phi[static_cast<Eigen::Index>(a)];
        const double r = (y - mu) / noise_sd_;
        log_weights[i] += c - 0.5 * r * r;
    });
}

double LinearGaussianModel::derivative_bound() const {
    // |neg_hessian| = |phi|^2 / sigma^2; the score is unbounded in y, so this
    // bounds its conditional second moment instead.
    const double x0 = placements_.is_interval() ? std::max(std::abs(placements_.lower), std::abs(placements_.upper))
                                                : 0.0;
    double worst = features_(x0).squaredNorm();
    for (double x : placements_.finite) worst = std::max(worst, features_(x).squaredNorm());
    return worst / (noise_sd_ * noise_sd_);
}

Eigen::VectorXd LinearGaussianModel::score(Outcome y, std::span<const double> theta, Placement x) const {
    return (y - mean(theta, x)) / (noise_sd_ * noise_sd_) * features_(x);
}

Eigen::MatrixXd LinearGaussianModel::neg_hessian(Outcome, std::span<const double>, Placement x) const {
    const Eigen::VectorXd phi = features_(x);
    return phi * phi.transpose() / (noise_sd_ * noise_sd_);
}

Eigen::MatrixXd LinearGaussianModel::fisher(std::span<const double>, Placement x) const {
    const Eigen::VectorXd phi = features_(x);
    return phi * phi.transpose() / (noise_sd_ * noise_sd_);
}

// ---------------------------------------------------------------------------
// Twenty questions

TwentyQuestionsModel::TwentyQuestionsModel(std::size_t bits) : bits_(bits) {
    if (bits == 0 || bits > 24) throw Error(ErrorKind::parameter, "twenty-questions needs 1..24 bits");
}

PlacementSet TwentyQuestionsModel::placements() const {
    PlacementSet set;
    set.lower = 0.0;
    set.upper = static_cast<double>(2 * bits_ - 1);
    for (std::size_t q = 0; q < 2 * bits_; ++q) set.finite.push_back(static_cast<double>(q));
    return set;
}

std::size_t TwentyQuestionsModel::channel(Placement x) const {
    return static_cast<std::size_t>(x) >= bits_ ? 1 : 0;
}

bool TwentyQuestionsModel::answer(double theta, Placement x) const {
    const auto q = static_cast<std::size_t>(x) % bits_;
    const auto value = static_cast<std::size_t>(theta + 0.5) - 1;  // theta is a positive integer
    return ((value >> q) & 1U) != 0;
}

double TwentyQuestionsModel::loglik(Outcome y, std::span<const double> theta, Placement x) const {
    const bool yes = answer(theta[0], x);
    return (y > 0.5) == yes ? 0.0 : -std::numeric_limits<double>::infinity();
}

std::vector<WeightedOutcome> TwentyQuestionsModel::outcome_rule(std::span<const double> theta,
                                                                Placement x) const {
    const bool yes = answer(theta[0], x);
    return {{0.0, yes ? 0.0 : 1.0}, {1.0, yes ? 1.0 : 0.0}};
}

Outcome TwentyQuestionsModel::sample(std::span<const double> theta, Placement x, Rng&) const {
    return answer(theta[0], x) ? 1.0 : 0.0;
}

void TwentyQuestionsModel::outcome_probabilities(Placement x, std::span<const double> thetas,
                                                 std::span<double> out) const {
    const std::size_t m = thetas.size();
    for (std::size_t i = 0; i < m; ++i) {
        const bool yes = answer(thetas[i], x);
        out[i] = yes ? 0.0 : 1.0;
        out[m + i] = yes ? 1.0 : 0.0;
    }
}

Eigen::VectorXd TwentyQuestionsModel::score(Outcome, std::span<const double>, Placement) const {
    throw Error(ErrorKind::parameter, "twenty-questions likelihood has no score");
}

Eigen::MatrixXd TwentyQuestionsModel::neg_hessian(Outcome, std::span<const double>, Placement) const {
    throw Error(ErrorKind::parameter, "twenty-questions likelihood has no Hessian");
}

Eigen::MatrixXd TwentyQuestionsModel::fisher(std::span<const double>, Placement) const {
    throw Error(ErrorKind::parameter, "twenty-questions likelihood has no Fisher information");
}

}  // namespace seqdesign
