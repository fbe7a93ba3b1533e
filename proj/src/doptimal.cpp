#include "seqdesign/doptimal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "seqdesign/error.hpp"

namespace seqdesign {

std::size_t CandidateInformationSet::dimension() const {
    return candidates.empty() ? 0 : static_cast<std::size_t>(candidates.front().info.rows());
}

Eigen::MatrixXd CandidateInformationSet::effective(std::size_t j) const {
    const auto& c = candidates[j];
    return normalization == CostNormalization::per_cost ? Eigen::MatrixXd(c.info / c.expected_cost) : c.info;
}

CandidateInformationSet information_set(const ObservationModel& model, const CostModel& cost,
                                        std::span<const double> theta0, std::span<const Placement> candidates,
                                        CostNormalization normalization) {
    CandidateInformationSet set;
    set.normalization = normalization;
    set.candidates.reserve(candidates.size());
    for (Placement x : candidates) {
        set.candidates.push_back({x, model.fisher(theta0, x), expected_cost_at(cost, model, x, theta0)});
    }
    return set;
}

double log_det_spd(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const auto& L = llt.matrixL();
    // pivots at rounding level mean the matrix is singular in exact arithmetic
    const double floor = 1e-13 * m.diagonal().cwiseAbs().maxCoeff();
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double d = L(i, i);
        if (!(d > 0.0) || d * d <= floor) return -std::numeric_limits<double>::infinity();
        s += 2.0 * std::log(d);
    }
    return s;
}

double h_star(const Eigen::MatrixXd& B_star) {
    const double ld = log_det_spd(B_star);
    if (!std::isfinite(ld)) throw Error(ErrorKind::parameter, "H* needs a positive-definite B*");
    const double n = static_cast<double>(B_star.rows());
    return -0.5 * ld + 0.5 * n * std::log(2.0 * std::numbers::pi * std::numbers::e);
}

namespace {

// Greedily adds candidates that raise the rank of their sum until it is full.
std::vector<std::size_t> spanning_subset(const std::vector<Eigen::MatrixXd>& info, std::size_t n) {
    std::vector<std::size_t> chosen;
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    auto rank_of = [](const Eigen::MatrixXd& m) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
        std::size_t r = 0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            if (es.eigenvalues()[i] > 1e-10 * top) ++r;
        }
        return r;
    };
    std::size_t rank = 0;
    while (rank < n) {
        std::size_t best = info.size();
        std::size_t best_rank = rank;
        double best_trace = -1.0;
        for (std::size_t j = 0; j < info.size(); ++j) {
            const std::size_t r = rank_of(sum + info[j]);
            const double tr = info[j].trace();
            if (r > best_rank || (r == best_rank && r > rank && tr > best_trace)) {
                best = j;
                best_rank = r;
                best_trace = tr;
            }
        }
        if (best == info.size()) break;
        chosen.push_back(best);
        sum += info[best];
        rank = best_rank;
    }
    if (rank < n) chosen.clear();
    return chosen;
}

// Largest alpha in [0, alpha_max] maximising log det(B + alpha D); the
// function is concave in alpha, so bisect on the sign of its derivative
// tr((B + alpha D)^-1 D).
double line_search(const Eigen::MatrixXd& B, const Eigen::MatrixXd& D, double alpha_max) {
    auto slope = [&](double a) -> double {
        Eigen::LLT<Eigen::MatrixXd> llt(B + a * D);
        if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
        return llt.solve(D).trace();
    };
    if (slope(alpha_max) >= 0.0) return alpha_max;
    double lo = 0.0;
    double hi = alpha_max;
    for (int it = 0; it < 200 && hi - lo > 1e-17 * std::max(1.0, alpha_max); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (slope(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

}  // namespace

DesignWeights solve_doptimal(const CandidateInformationSet& set, double tol, std::size_t max_iter) {
    if (!(tol > 0.0)) throw Error(ErrorKind::parameter, "tolerance must be positive");
    const std::size_t m = set.candidates.size();
    if (m == 0) throw Error(ErrorKind::parameter, "candidate information set is empty");
    const std::size_t n = set.dimension();
    const auto N = static_cast<Eigen::Index>(n);

    std::vector<Eigen::MatrixXd> info(m);
    for (std::size_t j = 0; j < m; ++j) {
        info[j] = set.effective(j);
        if (info[j].rows() != N || info[j].cols() != N) {
            throw Error(ErrorKind::parameter, "information matrices differ in dimension");
        }
        if (set.candidates[j].expected_cost <= 0.0) {
            throw Error(ErrorKind::model_violation, "expected cost must be positive");
        }
    }

    std::vector<double> w(m, 1.0 / static_cast<double>(m));
    auto assemble = [&]() {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
        for (std::size_t j = 0; j < m; ++j) {
            if (w[j] > 0.0) B += w[j] * info[j];
        }
        return B;
    };

    Eigen::MatrixXd B = assemble();
    if (!std::isfinite(log_det_spd(B))) {
        const auto subset = spanning_subset(info, n);
        if (subset.empty()) {
            throw Error(ErrorKind::degenerate_design, "no convex combination of candidates is positive definite");
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t j : subset) w[j] = 1.0 / static_cast<double>(subset.size());
        B = assemble();
        if (!std::isfinite(log_det_spd(B))) {
            throw Error(ErrorKind::degenerate_design, "spanning subset is numerically singular");
        }
    }

    // Frank-Wolfe with away steps (Wolfe / Todd-Yildirim) and exact line
    // search; the away steps let weights reach exactly zero.
    DesignWeights out;
    std::vector<double> d(m);
    for (std::size_t it = 0;; ++it) {
        Eigen::LLT<Eigen::MatrixXd> llt(B);
        if (llt.info() != Eigen::Success) {
            throw Error(ErrorKind::degenerate_design, "design matrix lost positive definiteness");
        }
        std::size_t up = 0;
        for (std::size_t j = 0; j < m; ++j) {
            d[j] = llt.solve(info[j]).trace();
            if (d[j] > d[up]) up = j;
        }
        std::size_t down = m;
        for (std::size_t j = 0; j < m; ++j) {
            if (w[j] > 0.0 && (down == m || d[j] < d[down])) down = j;
        }
        const double nn = static_cast<double>(n);
        out.gap = d[up] - nn;
        out.iterations = it;
        if (out.gap <= tol) {
            out.converged = true;
            break;
        }
        if (it >= max_iter) break;

        if (d[up] - nn >= nn - d[down] || w[down] >= 1.0) {
            const double a = line_search(B, info[up] - B, 1.0);
            for (double& wj : w) wj *= 1.0 - a;
            w[up] += a;
        } else {
            const double amax = w[down] / (1.0 - w[down]);
            const double a = line_search(B, B - info[down], amax);
            for (double& wj : w) wj *= 1.0 + a;
            w[down] -= a;
            if (a >= amax || w[down] < 1e-15) w[down] = 0.0;
        }
        double total = 0.0;
        for (double& wj : w) {
            if (wj < 0.0) wj = 0.0;
            total += wj;
        }
        for (double& wj : w) wj /= total;
        B = assemble();
    }

    out.placements.reserve(m);
    for (const auto& c : set.candidates) out.placements.push_back(c.x);
    out.weights = w;
    out.B_star = B;
    out.log_det = log_det_spd(B);
    out.h_star_nats = h_star(B);
    return out;
}

Eigen::MatrixXd information_per_cost(const CandidateInformationSet& set, std::span<const double> weights) {
    if (weights.size() != set.candidates.size()) throw Error(ErrorKind::parameter, "weights do not match the set");
    const std::size_t n = set.dimension();
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(n, n);
    double cost = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (weights[j] == 0.0) continue;
        info += weights[j] * set.candidates[j].info;
        cost += weights[j] * set.candidates[j].expected_cost;
    }
    if (!(cost > 0.0)) throw Error(ErrorKind::parameter, "design has no expected cost");
    return info / cost;
}

Eigen::MatrixXd offline_reference(const ObservationModel& model, std::span<const double> theta0,
                                  const DesignWeights& design) {
    const auto N = static_cast<Eigen::Index>(model.dimension());
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
    for (std::size_t j = 0; j < design.weights.size(); ++j) {
        if (design.weights[j] > 0.0) B += design.weights[j] * model.fisher(theta0, design.placements[j]);
    }
    return B;
}

Eigen::MatrixXd offline_reference_uniform(const ObservationModel& model, std::span<const double> theta0) {
    const PlacementSet set = model.placements();
    if (!set.is_interval()) {
        DesignWeights uniform;
        uniform.placements = set.finite;
        uniform.weights.assign(set.finite.size(), 1.0 / static_cast<double>(set.finite.size()));
        return offline_reference(model, theta0, uniform);
    }
    const auto N = static_cast<Eigen::Index>(model.dimension());
    Eigen::MatrixXd B(N, N);
    const double width = set.upper - set.lower;
    using Integrator = boost::math::quadrature::gauss_kronrod<double, 61>;
    for (Eigen::Index a = 0; a < N; ++a) {
        for (Eigen::Index b = a; b < N; ++b) {
            auto f = [&](double x) { return model.fisher(theta0, x)(a, b); };
            const double v = Integrator::integrate(f, set.lower, set.upper, 15, 1e-13) / width;
            B(a, b) = v;
            B(b, a) = v;
        }
    }
    return B;
}

}  // namespace seqdesign
