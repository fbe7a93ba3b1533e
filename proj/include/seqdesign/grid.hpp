#pragma once
#include <cstddef>
#include <span>
#include <vector>

namespace seqdesign {

// Cell-centred tensor grid over a compact box. Point i sits at the centre of
// its cell, so every cell carries the same volume and the uniform
// distribution over cells has differential entropy log(volume).
class ParameterGrid {
public:
    ParameterGrid(std::vector<double> lower, std::vector<double> upper,
                  std::vector<std::size_t> cells);

    static ParameterGrid line(double lower, double upper, std::size_t cells);

    std::size_t dimension() const { return lower_.size(); }
    std::size_t size() const { return size_; }
    std::size_t cells(std::size_t axis) const { return cells_[axis]; }
    double spacing(std::size_t axis) const { return spacing_[axis]; }
    double cell_volume() const { return cell_volume_; }
    double volume() const;
    double diameter() const;

    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }

    std::span<const double> point(std::size_t i) const {
        return {points_.data() + i * dimension(), dimension()};
    }
    // Row-major size() x dimension() coordinates.
    std::span<const double> points() const { return points_; }

    bool contains(std::span<const double> theta) const;
    std::size_t nearest_index(std::span<const double> theta) const;

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<std::size_t> cells_;
    std::vector<double> spacing_;
    double cell_volume_ = 0.0;
    std::size_t size_ = 0;
    std::vector<double> points_;
};

}  // namespace seqdesign
