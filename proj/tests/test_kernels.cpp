#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "seqdesign/kernels.hpp"
#include "seqdesign/rng.hpp"

using namespace seqdesign;
namespace k = seqdesign::kernels;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = -30.0 * uniform01(rng);
    return v;
}

}  // namespace

TEST_CASE("serial and parallel reductions agree across block boundaries") {
    for (std::size_t n : {1u, 2u, 2047u, 2048u, 2049u, 6000u, 100000u}) {
        CAPTURE(n);
        auto a = random_values(n, n);
        if (n > 5) a[3] = -std::numeric_limits<double>::infinity();
        auto b = a;
        CHECK(k::serial::max_value(a) == k::parallel::max_value(a));
        const double sa = k::serial::normalize_log_weights(a);
        const double sb = k::parallel::normalize_log_weights(b);
        CHECK(sa == doctest::Approx(sb).epsilon(1e-14));
        for (std::size_t i = 0; i < n; ++i) REQUIRE((a[i] == b[i] || std::abs(a[i] - b[i]) < 1e-12));
        double total = 0.0;
        for (double x : a) total += std::exp(x);
        CHECK(std::abs(total - 1.0) < 1e-12);
        CHECK(k::serial::entropy_of_log_weights(a) ==
              doctest::Approx(k::parallel::entropy_of_log_weights(b)).epsilon(1e-13));
    }
}

TEST_CASE("parallel reduction is reproducible") {
    auto a = random_values(50000, 3);
    auto b = a;
    CHECK(k::parallel::normalize_log_weights(a) == k::parallel::normalize_log_weights(b));
    CHECK(k::parallel::entropy_of_log_weights(a) == k::parallel::entropy_of_log_weights(b));
}

TEST_CASE("entropy of uniform log weights is log n") {
    std::vector<double> v(4096, 0.0);
    k::serial::normalize_log_weights(v);
    CHECK(k::serial::entropy_of_log_weights(v) == doctest::Approx(std::log(4096.0)));
    CHECK(k::parallel::entropy_of_log_weights(v) == doctest::Approx(std::log(4096.0)));
}

TEST_CASE("add_into and for_each_index") {
    std::vector<double> acc(5000, 1.0), inc(5000);
    for (std::size_t i = 0; i < inc.size(); ++i) inc[i] = static_cast<double>(i);
    auto acc2 = acc;
    k::serial::add_into(acc, inc);
    k::parallel::add_into(acc2, inc);
    CHECK(acc == acc2);
    CHECK(acc[4999] == 5000.0);

    std::vector<int> hits(1000, 0);
    k::for_each_index(k::Execution::parallel, hits.size(), [&](std::size_t i) { hits[i] += 1; });
    k::for_each_index(k::Execution::serial, hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) REQUIRE(h == 2);
}

TEST_CASE("discrete mutual information") {
    std::vector<double> pred(2);
    SUBCASE("perfectly informative binary test on two equally likely cells") {
        const std::vector<double> w{0.5, 0.5};
        const std::vector<double> probs{0.0, 1.0,   // y = 0
                                        1.0, 0.0};  // y = 1
        CHECK(k::discrete_mutual_information(w, probs, 2, pred) == doctest::Approx(std::numbers::ln2));
        CHECK(k::discrete_mutual_information_kl(w, probs, 2) == doctest::Approx(std::numbers::ln2));
        CHECK(pred[0] == doctest::Approx(0.5));
    }
    SUBCASE("uninformative test") {
        const std::vector<double> w{0.3, 0.7};
        const std::vector<double> probs{0.4, 0.4, 0.6, 0.6};
        CHECK(k::discrete_mutual_information(w, probs, 2, pred) == 0.0);
        CHECK(std::abs(k::discrete_mutual_information_kl(w, probs, 2)) < 1e-16);
    }
    SUBCASE("two forms agree on random inputs") {
        Rng rng(4);
        for (int rep = 0; rep < 100; ++rep) {
            const std::size_t m = 1 + uniform_index(rng, 50);
            const std::size_t K = 2 + uniform_index(rng, 4);
            std::vector<double> w(m), probs(K * m);
            double z = 0.0;
            for (auto& x : w) z += (x = uniform01(rng));
            for (auto& x : w) x /= z;
            for (std::size_t i = 0; i < m; ++i) {
                double s = 0.0;
                for (std::size_t y = 0; y < K; ++y) s += (probs[y * m + i] = uniform01(rng));
                for (std::size_t y = 0; y < K; ++y) probs[y * m + i] /= s;
            }
            std::vector<double> p(K);
            const double a = k::discrete_mutual_information(w, probs, K, p);
            const double b = k::discrete_mutual_information_kl(w, probs, K);
            REQUIRE(a >= 0.0);
            REQUIRE(std::abs(a - b) < 1e-10);
            REQUIRE(a <= std::log(static_cast<double>(K)) + 1e-12);
        }
    }
}
