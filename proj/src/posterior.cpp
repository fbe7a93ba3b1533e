#include "seqdesign/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seqdesign/error.hpp"

namespace seqdesign {

namespace {

PosteriorSummary summarize_weights(const ParameterGrid& grid, std::span<const double> w,
                                   std::span<const std::size_t> cells) {
    const std::size_t n = grid.dimension();
    const auto N = static_cast<Eigen::Index>(n);
    PosteriorSummary s;
    s.mean = Eigen::VectorXd::Zero(N);
    s.covariance = Eigen::MatrixXd::Zero(N, N);
    s.mode = Eigen::VectorXd::Zero(N);
    double best = -1.0;
    double h = 0.0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
        const auto p = grid.point(cells[j]);
        for (std::size_t a = 0; a < n; ++a) s.mean[static_cast<Eigen::Index>(a)] += w[j] * p[a];
        if (w[j] > best) {
            best = w[j];
            for (std::size_t a = 0; a < n; ++a) s.mode[static_cast<Eigen::Index>(a)] = p[a];
        }
        if (w[j] > 0.0) h -= w[j] * std::log(w[j]);
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
        if (w[j] == 0.0) continue;
        const auto p = grid.point(cells[j]);
        for (std::size_t a = 0; a < n; ++a) {
            const double da = p[a] - s.mean[static_cast<Eigen::Index>(a)];
            for (std::size_t b = a; b < n; ++b) {
                const double db = p[b] - s.mean[static_cast<Eigen::Index>(b)];
                s.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += w[j] * da * db;
            }
        }
    }
    for (Eigen::Index a = 0; a < N; ++a) {
        for (Eigen::Index b = 0; b < a; ++b) s.covariance(a, b) = s.covariance(b, a);
    }
    s.entropy_nats = h + std::log(grid.cell_volume());
    return s;
}

}  // namespace

GridPosterior GridPosterior::uniform(std::shared_ptr<const ParameterGrid> grid) {
    const double l = -std::log(static_cast<double>(grid->size()));
    std::vector<double> lw(grid->size(), l);
    return GridPosterior(std::move(grid), std::move(lw));
}

GridPosterior GridPosterior::from_log_weights(std::shared_ptr<const ParameterGrid> grid,
                                              std::vector<double> log_weights,
                                              kernels::Execution ex) {
    if (log_weights.size() != grid->size()) {
        throw Error(ErrorKind::parameter, "log-weight count does not match the grid");
    }
    for (double l : log_weights) {
        if (std::isnan(l) || l == std::numeric_limits<double>::infinity()) {
            throw Error(ErrorKind::parameter, "log weights must be finite or -inf");
        }
    }
    const double shift = ex == kernels::Execution::parallel
                             ? kernels::parallel::normalize_log_weights(log_weights)
                             : kernels::serial::normalize_log_weights(log_weights);
    if (!std::isfinite(shift)) {
        throw Error(ErrorKind::impossible_observation, "every grid cell has zero mass");
    }
    return GridPosterior(std::move(grid), std::move(log_weights));
}

GridPosterior GridPosterior::from_log_density(
    std::shared_ptr<const ParameterGrid> grid,
    const std::function<double(std::span<const double>)>& log_density) {
    std::vector<double> lw(grid->size());
    for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = log_density(grid->point(i));
    return from_log_weights(std::move(grid), std::move(lw));
}

std::vector<double> GridPosterior::weights() const {
    std::vector<double> w(log_weights_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights_[i]);
    return w;
}

WeightedSupport GridPosterior::support(double neglect) const {
    const std::size_t n = grid_->dimension();
    const double cutoff = std::log(neglect / static_cast<double>(log_weights_.size()));
    WeightedSupport s;
    s.dimension = n;
    s.lo.assign(n, std::numeric_limits<double>::infinity());
    s.hi.assign(n, -std::numeric_limits<double>::infinity());
    double total = 0.0;
    for (std::size_t i = 0; i < log_weights_.size(); ++i) {
        if (log_weights_[i] <= cutoff) continue;
        const double w = std::exp(log_weights_[i]);
        s.index.push_back(i);
        s.weight.push_back(w);
        total += w;
        const auto p = grid_->point(i);
        for (std::size_t a = 0; a < n; ++a) {
            s.points.push_back(p[a]);
            s.lo[a] = std::min(s.lo[a], p[a]);
            s.hi[a] = std::max(s.hi[a], p[a]);
        }
    }
    for (double& w : s.weight) w /= total;
    return s;
}

GridPosterior bayes_update(const GridPosterior& post, const ObservationModel& model, Placement x,
                           Outcome y, kernels::Execution ex) {
    std::vector<double> lw(post.log_weights().begin(), post.log_weights().end());
    if (ex == kernels::Execution::parallel) {
        model.add_loglik(y, x, post.grid().points(), lw);
    } else {
        model.ObservationModel::add_loglik(y, x, post.grid().points(), lw);
    }
    return GridPosterior::from_log_weights(post.grid_ptr(), std::move(lw), ex);
}

double differential_entropy(const GridPosterior& post, kernels::Execution ex) {
    const double h = ex == kernels::Execution::parallel
                         ? kernels::parallel::entropy_of_log_weights(post.log_weights())
                         : kernels::serial::entropy_of_log_weights(post.log_weights());
    return h + std::log(post.grid().cell_volume());
}

PosteriorSummary summarize(const GridPosterior& post) {
    std::vector<std::size_t> cells(post.grid().size());
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = i;
    const std::vector<double> w = post.weights();
    return summarize_weights(post.grid(), w, cells);
}

LocalSummary local_summary(const GridPosterior& post, std::span<const double> center, double radius) {
    if (!(radius > 0.0)) throw Error(ErrorKind::parameter, "local radius must be positive");
    const auto& grid = post.grid();
    if (center.size() != grid.dimension()) throw Error(ErrorKind::parameter, "center has wrong dimension");
    std::vector<std::size_t> cells;
    std::vector<double> w;
    double mass = 0.0;
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto p = grid.point(i);
        double d2 = 0.0;
        for (std::size_t a = 0; a < p.size(); ++a) d2 += (p[a] - center[a]) * (p[a] - center[a]);
        if (d2 > r2) continue;
        const double wi = std::exp(post.log_weights()[i]);
        cells.push_back(i);
        w.push_back(wi);
        mass += wi;
    }
    if (!(mass > 0.0)) throw Error(ErrorKind::empty_window, "no posterior mass inside the local window");
    for (double& wi : w) wi /= mass;
    return {summarize_weights(grid, w, cells), mass};
}

std::vector<double> predictive(const GridPosterior& post, const ObservationModel& model, Placement x) {
    const std::size_t K = model.outcome_count();
    if (K == 0) throw Error(ErrorKind::parameter, "predictive vector needs a discrete-outcome model");
    const WeightedSupport s = post.support(0.0);
    std::vector<double> probs(K * s.size());
    model.outcome_probabilities(x, s.points, probs);
    std::vector<double> pred(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t i = 0; i < s.size(); ++i) pred[k] += s.weight[i] * probs[k * s.size() + i];
    }
    return pred;
}

}  // namespace seqdesign
