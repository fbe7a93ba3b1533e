#include <doctest.h>

#include <cmath>
#include <numbers>

#include <functional>
#include <tuple>

#include "seqdesign/cost.hpp"
#include "seqdesign/diagnostics.hpp"
#include "seqdesign/doptimal.hpp"
#include "seqdesign/grid.hpp"
#include "seqdesign/models.hpp"
#include "seqdesign/rng.hpp"
#include "seqdesign/error.hpp"
#include "seqdesign/posterior.hpp"
#include "seqdesign/strategies.hpp"

using namespace seqdesign;

namespace {

TrialRecord scalar_record(std::size_t t, double info, double cost, double cum, double gain = 0.0) {
    TrialRecord r;
    r.t = t;
    r.cost = cost;
    r.cum_cost = cum;
    r.gain_nats = gain;
    r.observed_info = Eigen::MatrixXd::Constant(1, 1, info);
    r.fisher_at_truth = r.observed_info;
    return r;
}

// Sequential twenty-questions run; `allowed(t)` restricts the candidates of trial t.
TrialTrace twenty_questions_run(std::size_t bits, double cheap, double costly, std::size_t trials,
                                const std::function<bool(std::size_t, Placement)>& allowed) {
    TwentyQuestionsModel m(bits);
    const auto cost = CostModel::custom(
        [&m, cheap, costly](double, double x) { return m.channel(x) == 0 ? cheap : costly; }, std::min(cheap, costly),
        std::max(cheap, costly), "channel");
    auto grid = std::make_shared<const ParameterGrid>(ParameterGrid::line(0.5, m.size() + 0.5, m.size()));
    const auto all = m.placements().candidates(0);
    Rng rng(3);
    TrialTrace trace;
    auto post = GridPosterior::uniform(grid);
    std::vector<double> theta{static_cast<double>(1 + uniform_index(rng, m.size()))};
    double h = differential_entropy(post), cum = 0.0;
    for (std::size_t t = 1; t <= trials; ++t) {
        if (h <= 1e-12) {
            theta[0] = static_cast<double>(1 + uniform_index(rng, m.size()));
            post = GridPosterior::uniform(grid);
            h = differential_entropy(post);
        }
        std::vector<Placement> cand;
        for (Placement x : all) {
            if (allowed(t, x)) cand.push_back(x);
        }
        const auto d = choose_myopic_cost_aware(post, m, cost, cand);
        const double y = m.sample(theta, d.x, rng);
        post = bayes_update(post, m, d.x, y);
        const double h_new = differential_entropy(post);
        TrialRecord r;
        r.t = t;
        r.x = d.x;
        r.cost = cost.cost_given(y, d.x);
        cum += r.cost;
        r.cum_cost = cum;
        r.gain_nats = h - h_new;
        r.entropy_nats = h_new;
        trace.push_back(r);
        h = h_new;
    }
    return trace;
}

}  // namespace

TEST_CASE("proportion measure") {
    CHECK(rho([](std::int64_t) { return true; }, -5, 17) == 1.0);
    CHECK(rho([](std::int64_t k) { return k % 2 == 0; }, 0, 1000) == 0.5);
    CHECK(rho([](std::int64_t k) { return k % 3 == 0; }, 1, 10) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(rho([](std::int64_t) { return true; }, 3, 3), Error);

    // finite additivity on adjacent windows
    auto sq = [](std::int64_t k) {
        const auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(std::max<std::int64_t>(k, 0))));
        return r * r == k;
    };
    for (auto [a, b, c] : {std::tuple{0, 10, 100}, std::tuple{-7, 3, 1000}, std::tuple{5, 6, 7}}) {
        const double whole = rho(sq, a, c);
        const double split = ((b - a) * rho(sq, a, b) + (c - b) * rho(sq, b, c)) / double(c - a);
        CHECK(whole == doctest::Approx(split).epsilon(1e-15));
    }
}

TEST_CASE("most-trials convergence") {
    SUBCASE("constant series") {
        const std::vector<double> s(500, 2.0);
        const auto r = most_trials_converges(s, 2.0, 0.1);
        CHECK(r.fraction == 1.0);
        CHECK(r.verdict);
    }
    SUBCASE("exceptions at powers of two become negligible") {
        double prev = 0.0;
        for (std::size_t T : {64u, 1024u, 65536u}) {
            std::vector<double> s(T, 1.0);
            for (std::size_t p = 1; p <= T; p *= 2) s[p - 1] = 5.0;
            const double f = most_trials_converges(s, 1.0, 0.5, 1.0).fraction;
            CHECK(f > prev);
            prev = f;
        }
        CHECK(prev > 0.999);
    }
    SUBCASE("limit + 1/k") {
        std::vector<double> s;
        for (int k = 1; k <= 1000; ++k) s.push_back(3.0 + 1.0 / k);
        CHECK(most_trials_converges(s, 3.0, 0.01).fraction == 1.0);
        CHECK(most_trials_converges(s, 3.0, 0.01, 1.0).fraction < 1.0);
    }
    SUBCASE("argument checks") {
        const std::vector<double> s{1.0};
        CHECK_THROWS_AS(most_trials_converges({}, 0.0, 0.1), Error);
        CHECK_THROWS_AS(most_trials_converges(s, 0.0, 0.0), Error);
    }
}

TEST_CASE("B_t tracking") {
    SUBCASE("psychometric placements at the truth give 1/4 every trial") {
        PsychometricModel m;
        Rng rng(1);
        const std::vector<double> th{50};
        TrialTrace tr;
        for (std::size_t t = 1; t <= 200; ++t) {
            const double y = m.sample(th, 50, rng);
            tr.push_back(scalar_record(t, m.neg_hessian(y, th, 50)(0, 0), 1.0, static_cast<double>(t)));
        }
        for (const auto& B : track_B(tr, Clock::unit_time)) REQUIRE(B(0, 0) == 0.25);
    }
    SUBCASE("two alternating placements average their information") {
        TrialTrace tr;
        for (std::size_t t = 1; t <= 1000; ++t) {
            tr.push_back(scalar_record(t, t % 2 ? 0.1 : 0.3, 1.0, static_cast<double>(t)));
        }
        const auto B = track_B(tr, Clock::unit_time);
        CHECK(B.back()(0, 0) == doctest::Approx(0.2));
        const auto F = track_fisher_average(tr);
        CHECK(F.back()(0, 0) == doctest::Approx(0.2));
    }
    SUBCASE("unit costs make both clocks agree") {
        TrialTrace tr;
        for (std::size_t t = 1; t <= 50; ++t) tr.push_back(scalar_record(t, 0.1 * (t % 7), 1.0, double(t)));
        const auto a = track_B(tr, Clock::unit_time);
        const auto b = track_B(tr, Clock::cost);
        for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(a[k](0, 0) == b[k](0, 0));
    }
    SUBCASE("cost clock divides by total cost") {
        TrialTrace tr;
        double cum = 0.0;
        for (std::size_t t = 1; t <= 10; ++t) {
            const double c = t % 2 ? 1.0 : 4.0;
            cum += c;
            tr.push_back(scalar_record(t, 0.25, c, cum));
        }
        CHECK(track_B(tr, Clock::cost).back()(0, 0) == doctest::Approx(2.5 / 25.0));
    }
}

TEST_CASE("entropy residual") {
    // Posterior exactly N(., 1/(B* t)) has zero residual.
    const double B = 0.25;
    const double hs = h_star(Eigen::MatrixXd::Constant(1, 1, B));
    TrialTrace tr;
    for (std::size_t t = 1; t <= 100; ++t) {
        TrialRecord r = scalar_record(t, B, 2.0, 2.0 * t);
        r.entropy_nats = 0.5 * std::log(2 * std::numbers::pi * std::numbers::e / (B * t));
        tr.push_back(r);
    }
    for (double v : entropy_residual(tr, hs, Clock::unit_time, 1)) REQUIRE(std::abs(v) < 1e-12);
    // The cost clock runs twice as fast: residual (1/2) log 2.
    for (double v : entropy_residual(tr, hs, Clock::cost, 1)) {
        REQUIRE(v == doctest::Approx(0.5 * std::numbers::ln2));
    }
}

TEST_CASE("gain-to-cost ratio in the twenty-questions scenario") {
    const std::size_t bits = 8;
    SUBCASE("cheap questions only, cost 1") {
        const auto tr = twenty_questions_run(bits, 1.0, 2.0, 200, [](std::size_t, Placement) { return true; });
        for (double r : gain_cost_ratio(tr)) REQUIRE(std::abs(r - std::numbers::ln2) < 1e-12);
        for (const auto& rec : tr) REQUIRE(rec.x < bits);
    }
    SUBCASE("every question costs 2") {
        const auto tr = twenty_questions_run(bits, 2.0, 2.0, 200, [](std::size_t, Placement) { return true; });
        for (double r : gain_cost_ratio(tr)) REQUIRE(std::abs(r - std::numbers::ln2 / 2) < 1e-12);
    }
    SUBCASE("mixing in the costly channel lowers the ratio") {
        const auto tr = twenty_questions_run(bits, 1.0, 2.0, 3000, [bits](std::size_t t, Placement x) {
            return t % 3 == 0 ? x >= bits : true;
        });
        const auto ratio = gain_cost_ratio(tr);
        double tail_max = 0.0;
        for (std::size_t k = 0; k < ratio.size(); ++k) {
            REQUIRE(ratio[k] <= std::numbers::ln2 + 1e-12);
            if (k >= ratio.size() / 2) tail_max = std::max(tail_max, ratio[k]);
        }
        CHECK(tail_max < std::numbers::ln2 - 0.05);
    }
}

TEST_CASE("logarithmic information budget") {
    SUBCASE("bounded excess passes") {
        std::vector<double> cum;
        for (int t = 1; t <= 2000; ++t) cum.push_back(std::log(static_cast<double>(t)) + 1.0 - 1.0 / t);
        const auto r = info_budget_check(cum, 1);
        CHECK(r.verdict);
        CHECK(r.c_fit <= 1.0);
    }
    SUBCASE("growth like 2 n log t fails") {
        std::vector<double> cum;
        for (int t = 1; t <= 2000; ++t) cum.push_back(2.0 * 2.0 * std::log(static_cast<double>(t)));
        CHECK(!info_budget_check(cum, 2).verdict);
    }
    SUBCASE("finite parameter set: gain never exceeds m log 2") {
        const auto tr = twenty_questions_run(6, 1.0, 1.0, 5, [](std::size_t, Placement) { return true; });
        double g = 0.0;
        for (const auto& r : tr) g += r.gain_nats;
        CHECK(g <= 6 * std::numbers::ln2 + 1e-12);
    }
    SUBCASE("too short") {
        const std::vector<double> cum(50, 0.0);
        CHECK_THROWS_AS(info_budget_check(cum, 1), Error);
    }
}

TEST_CASE("report series match the trace length") {
    TrialTrace tr;
    for (std::size_t t = 1; t <= 300; ++t) {
        TrialRecord r = scalar_record(t, 0.25, 1.0, double(t), 0.001);
        r.entropy_nats = 2.0 - 0.5 * std::log(double(t));
        tr.push_back(r);
    }
    const auto rep = build_report(tr, 1, true, 2.0, 2.0, DiagnosticOptions{});
    CHECK(rep.det_B_unit.size() == tr.size());
    CHECK(rep.det_B_cost.size() == tr.size());
    CHECK(rep.residual_unit.size() == tr.size());
    CHECK(rep.residual_cost.size() == tr.size());
    CHECK(rep.ratio.size() == tr.size());
    CHECK(rep.info_budget.size() == tr.size());
    CHECK(rep.most_trials_unit.fraction == 1.0);
    const auto rough = build_report(tr, 1, false, 0.0, 0.0, DiagnosticOptions{});
    CHECK(rough.det_B_unit.empty());
    CHECK(rough.ratio.size() == tr.size());
}
