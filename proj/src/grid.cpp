#include "seqdesign/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqdesign/error.hpp"

namespace seqdesign {

ParameterGrid::ParameterGrid(std::vector<double> lower, std::vector<double> upper,
                             std::vector<std::size_t> cells)
    : lower_(std::move(lower)), upper_(std::move(upper)), cells_(std::move(cells)) {
    const std::size_t n = lower_.size();
    if (n == 0 || upper_.size() != n || cells_.size() != n) {
        throw Error(ErrorKind::parameter, "grid bounds and cell counts must share a nonzero dimension");
    }
    size_ = 1;
    cell_volume_ = 1.0;
    spacing_.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
        if (!(upper_[a] > lower_[a]) || !std::isfinite(lower_[a]) || !std::isfinite(upper_[a])) {
            throw Error(ErrorKind::parameter, "grid axis " + std::to_string(a) + " has empty extent");
        }
        if (cells_[a] == 0) {
            throw Error(ErrorKind::parameter, "grid axis " + std::to_string(a) + " has no cells");
        }
        spacing_[a] = (upper_[a] - lower_[a]) / static_cast<double>(cells_[a]);
        cell_volume_ *= spacing_[a];
        size_ *= cells_[a];
    }

    // Last axis varies fastest.
    points_.resize(size_ * n);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t i = 0; i < size_; ++i) {
        for (std::size_t a = 0; a < n; ++a) {
            points_[i * n + a] = lower_[a] + (static_cast<double>(idx[a]) + 0.5) * spacing_[a];
        }
        for (std::size_t a = n; a-- > 0;) {
            if (++idx[a] < cells_[a]) break;
            idx[a] = 0;
        }
    }
}

ParameterGrid ParameterGrid::line(double lower, double upper, std::size_t cells) {
    return ParameterGrid({lower}, {upper}, {cells});
}

double ParameterGrid::volume() const {
    double v = 1.0;
    for (std::size_t a = 0; a < dimension(); ++a) v *= upper_[a] - lower_[a];
    return v;
}

double ParameterGrid::diameter() const {
    double s = 0.0;
    for (std::size_t a = 0; a < dimension(); ++a) {
        double d = upper_[a] - lower_[a];
        s += d * d;
    }
    return std::sqrt(s);
}

bool ParameterGrid::contains(std::span<const double> theta) const {
    if (theta.size() != dimension()) return false;
    for (std::size_t a = 0; a < dimension(); ++a) {
        if (!(theta[a] >= lower_[a] && theta[a] <= upper_[a])) return false;
    }
    return true;
}

std::size_t ParameterGrid::nearest_index(std::span<const double> theta) const {
    std::size_t index = 0;
    for (std::size_t a = 0; a < dimension(); ++a) {
        double pos = std::floor((theta[a] - lower_[a]) / spacing_[a]);
        auto k = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(cells_[a] - 1)));
        index = index * cells_[a] + k;
    }
    return index;
}

}  // namespace seqdesign
