#pragma once
#include <cstddef>
#include <exception>
#include <span>

#include <omp.h>

// Data-parallel inner loops shared by the posterior and the placement
// strategies. Every kernel has a plain serial reference in `serial` and an
// OpenMP version in `parallel`; tests hold the two against each other and
// bench/ times them.
//
// Parallel reductions sum fixed-size blocks and then combine the block
// partials in block order, so results do not depend on the thread count.

namespace seqdesign::kernels {

enum class Execution { serial, parallel };

inline constexpr std::size_t reduction_block = 2048;

namespace serial {

double max_value(std::span<const double> v);
// Subtracts log-sum-exp in place; returns the subtracted amount.
double normalize_log_weights(std::span<double> log_weights);
// -sum exp(l) * l over entries with exp(l) > 0.
double entropy_of_log_weights(std::span<const double> log_weights);
void add_into(std::span<double> acc, std::span<const double> inc);

template <class F>
void for_each_index(std::size_t n, F&& f) {
    for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace serial

namespace parallel {

double max_value(std::span<const double> v);
double normalize_log_weights(std::span<double> log_weights);
double entropy_of_log_weights(std::span<const double> log_weights);
void add_into(std::span<double> acc, std::span<const double> inc);

// Exceptions cannot cross the parallel region; the first one is rethrown after it.
template <class F>
void for_each_index(std::size_t n, F&& f) {
    const auto count = static_cast<std::ptrdiff_t>(n);
    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(seqdesign_for_each_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace parallel

template <class F>
void for_each_index(Execution ex, std::size_t n, F&& f) {
    if (ex == Execution::parallel) {
        parallel::for_each_index(n, f);
    } else {
        serial::for_each_index(n, f);
    }
}

// Mutual information between the parameter (weights w over m cells) and a
// discrete outcome with K values; probs is K x m row-major, p(y_k | theta_i).
// Entropy-difference form, clamped at zero.
double discrete_mutual_information(std::span<const double> w, std::span<const double> probs,
                                   std::size_t outcomes, std::span<double> predictive_out);

// The same quantity as sum_i w_i KL(p(.|theta_i) || predictive).
double discrete_mutual_information_kl(std::span<const double> w, std::span<const double> probs,
                                      std::size_t outcomes);

}  // namespace seqdesign::kernels
