#include "seqdesign/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace seqdesign::kernels {

namespace {

inline double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

std::size_t block_count(std::size_t n) { return (n + reduction_block - 1) / reduction_block; }

template <class BlockFn>
double blocked_sum(std::size_t n, BlockFn&& fn) {
    const std::size_t blocks = block_count(n);
    std::vector<double> partial(blocks, 0.0);
    const auto count = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < count; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * reduction_block;
        const std::size_t hi = std::min(n, lo + reduction_block);
        partial[static_cast<std::size_t>(b)] = fn(lo, hi);
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

}  // namespace

namespace serial {

double max_value(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    return m;
}

double normalize_log_weights(std::span<double> log_weights) {
    const double m = max_value(log_weights);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double l : log_weights) s += std::exp(l - m);
    const double shift = m + std::log(s);
    for (double& l : log_weights) l -= shift;
    return shift;
}

double entropy_of_log_weights(std::span<const double> log_weights) {
    double h = 0.0;
    for (double l : log_weights) {
        double w = std::exp(l);
        if (w > 0.0) h -= w * l;
    }
    return h;
}

void add_into(std::span<double> acc, std::span<const double> inc) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += inc[i];
}

}  // namespace serial

namespace parallel {

double max_value(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    const auto n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static) reduction(max : m)
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, v[static_cast<std::size_t>(i)]);
    return m;
}

double normalize_log_weights(std::span<double> log_weights) {
    const double m = max_value(log_weights);
    if (!std::isfinite(m)) return m;
    const double s = blocked_sum(log_weights.size(), [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += std::exp(log_weights[i] - m);
        return acc;
    });
    const double shift = m + std::log(s);
    const auto n = static_cast<std::ptrdiff_t>(log_weights.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) log_weights[static_cast<std::size_t>(i)] -= shift;
    return shift;
}

double entropy_of_log_weights(std::span<const double> log_weights) {
    return blocked_sum(log_weights.size(), [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            double w = std::exp(log_weights[i]);
            if (w > 0.0) acc -= w * log_weights[i];
        }
        return acc;
    });
}

void add_into(std::span<double> acc, std::span<const double> inc) {
    const auto n = static_cast<std::ptrdiff_t>(acc.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        acc[static_cast<std::size_t>(i)] += inc[static_cast<std::size_t>(i)];
    }
}

}  // namespace parallel

double discrete_mutual_information(std::span<const double> w, std::span<const double> probs,
                                   std::size_t outcomes, std::span<double> predictive_out) {
    const std::size_t m = w.size();
    double conditional = 0.0;
    double marginal = 0.0;
    for (std::size_t k = 0; k < outcomes; ++k) {
        const double* row = probs.data() + k * m;
        double pk = 0.0;
        double hk = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            pk += w[i] * row[i];
            hk -= w[i] * xlogx(row[i]);
        }
        if (!predictive_out.empty()) predictive_out[k] = pk;
        conditional += hk;
        marginal -= xlogx(pk);
    }
    return std::max(0.0, marginal - conditional);
}

double discrete_mutual_information_kl(std::span<const double> w, std::span<const double> probs,
                                      std::size_t outcomes) {
    const std::size_t m = w.size();
    std::vector<double> pred(outcomes, 0.0);
    for (std::size_t k = 0; k < outcomes; ++k) {
        for (std::size_t i = 0; i < m; ++i) pred[k] += w[i] * probs[k * m + i];
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double kl = 0.0;
        for (std::size_t k = 0; k < outcomes; ++k) {
            double p = probs[k * m + i];
            if (p > 0.0) kl += p * std::log(p / pred[k]);
        }
        total += w[i] * kl;
    }
    return total;
}

}  // namespace seqdesign::kernels
