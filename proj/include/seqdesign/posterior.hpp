#pragma once
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "seqdesign/grid.hpp"
#include "seqdesign/kernels.hpp"
#include "seqdesign/models.hpp"

namespace seqdesign {

// Cells carrying non-negligible posterior mass, gathered contiguously so the
// candidate scans touch only them. Weights are renormalised over the kept cells.
struct WeightedSupport {
    std::vector<std::size_t> index;
    std::vector<double> weight;
    std::vector<double> points;  // row-major, index.size() x dimension
    std::vector<double> lo;      // bounding box of the kept points
    std::vector<double> hi;
    std::size_t dimension = 1;

    std::size_t size() const { return index.size(); }
};

// Immutable discretised posterior; log_weights are normalised (log-sum-exp = 0).
class GridPosterior {
public:
    static GridPosterior uniform(std::shared_ptr<const ParameterGrid> grid);
    // Normalises; throws impossible-observation if every weight is zero.
    static GridPosterior from_log_weights(std::shared_ptr<const ParameterGrid> grid,
                                          std::vector<double> log_weights,
                                          kernels::Execution ex = kernels::Execution::parallel);
    static GridPosterior from_log_density(std::shared_ptr<const ParameterGrid> grid,
                                          const std::function<double(std::span<const double>)>& log_density);

    const ParameterGrid& grid() const { return *grid_; }
    const std::shared_ptr<const ParameterGrid>& grid_ptr() const { return grid_; }
    std::span<const double> log_weights() const { return log_weights_; }
    std::vector<double> weights() const;

    // Drops cells whose weight is below neglect / size(); the dropped mass is
    // at most `neglect`.
    WeightedSupport support(double neglect = 1e-18) const;

private:
    GridPosterior(std::shared_ptr<const ParameterGrid> grid, std::vector<double> log_weights)
        : grid_(std::move(grid)), log_weights_(std::move(log_weights)) {}

    std::shared_ptr<const ParameterGrid> grid_;
    std::vector<double> log_weights_;
};

struct PosteriorSummary {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    double entropy_nats = 0.0;
    Eigen::VectorXd mode;
};

struct LocalSummary {
    PosteriorSummary summary;
    double mass = 0.0;  // p_t(U)
};

GridPosterior bayes_update(const GridPosterior& post, const ObservationModel& model, Placement x,
                           Outcome y, kernels::Execution ex = kernels::Execution::parallel);

// Riemann approximation of the differential entropy w.r.t. Lebesgue measure:
// -sum w log w + log(cell volume).
double differential_entropy(const GridPosterior& post,
                            kernels::Execution ex = kernels::Execution::parallel);

PosteriorSummary summarize(const GridPosterior& post);

// Posterior conditioned on the Euclidean ball B(center, radius).
LocalSummary local_summary(const GridPosterior& post, std::span<const double> center, double radius);

// p_t(y_k) for each outcome of a discrete model.
std::vector<double> predictive(const GridPosterior& post, const ObservationModel& model, Placement x);

}  // namespace seqdesign
