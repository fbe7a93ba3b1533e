#pragma once
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "seqdesign/cost.hpp"
#include "seqdesign/models.hpp"

namespace seqdesign {

enum class CostNormalization { unit_cost, per_cost };

struct InformationCandidate {
    Placement x = 0.0;
    Eigen::MatrixXd info;
    double expected_cost = 1.0;
};

struct CandidateInformationSet {
    std::vector<InformationCandidate> candidates;
    CostNormalization normalization = CostNormalization::unit_cost;

    std::size_t dimension() const;
    // info, divided by expected cost in per-cost mode.
    Eigen::MatrixXd effective(std::size_t j) const;
};

// Information matrices I_x(theta0) and costs E(C_x | theta0) over candidates.
CandidateInformationSet information_set(const ObservationModel& model, const CostModel& cost,
                                        std::span<const double> theta0,
                                        std::span<const Placement> candidates,
                                        CostNormalization normalization);

struct DesignWeights {
    std::vector<Placement> placements;
    std::vector<double> weights;
    Eigen::MatrixXd B_star;
    double log_det = 0.0;
    double h_star_nats = 0.0;
    // Kiefer-Wolfowitz certificate max_j tr(B^-1 I_j) - n; zero at the optimum.
    double gap = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// log det via Cholesky; -inf when the matrix is not positive definite.
double log_det_spd(const Eigen::MatrixXd& m);

// -1/2 log det(B) + (n/2) log(2 pi e).
double h_star(const Eigen::MatrixXd& B_star);

// Maximises log det(sum_j w_j I_j) over the simplex.
DesignWeights solve_doptimal(const CandidateInformationSet& set, double tol = 1e-8,
                             std::size_t max_iter = 100000);

// Information per unit cost of a design run with trial frequencies w:
// sum_j w_j I_j / sum_j w_j E(C_j). Uses the raw matrices of the set.
Eigen::MatrixXd information_per_cost(const CandidateInformationSet& set, std::span<const double> weights);

// Averaged Fisher information sum_j w_j I_{x_j}(theta0) of a fixed design.
Eigen::MatrixXd offline_reference(const ObservationModel& model, std::span<const double> theta0,
                                  const DesignWeights& design);

// (1/|X|) integral over the placement interval of I_x(theta0) dx.
Eigen::MatrixXd offline_reference_uniform(const ObservationModel& model, std::span<const double> theta0);

}  // namespace seqdesign
