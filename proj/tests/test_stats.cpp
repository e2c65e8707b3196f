#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mda/rng.hpp"
#include "mda/stats.hpp"

using namespace mda;

TEST_SUITE_BEGIN("stats");

TEST_CASE("ks statistic basics") {
    // samples at target quantiles (i - 0.5)/n -> KS = 0.5/n
    const int n = 50;
    std::vector<double> lattice(n);
    for (int i = 0; i < n; ++i) lattice[i] = (i + 0.5) / n;
    auto uniform = [](double x) { return std::min(1.0, std::max(0.0, x)); };
    CHECK(ks_statistic(lattice, uniform) == doctest::Approx(0.5 / n).epsilon(1e-12));

    // point mass vs uniform
    std::vector<double> point(100, 0.5);
    CHECK(ks_statistic(point, uniform) >= 0.5);

    // 1e4 uniform draws: below the 99% Kolmogorov bound
    Rng rng(123);
    std::vector<double> draws(10000);
    for (auto& v : draws) v = rng.uniform();
    CHECK(ks_statistic(draws, uniform) < 0.0193);

    CHECK_THROWS_AS(ks_statistic(std::vector<double>{0.5}, uniform), std::invalid_argument);
}

TEST_CASE("ks invariance under monotone transforms") {
    Rng rng(321);
    std::vector<double> draws(2000);
    for (auto& v : draws) v = rng.uniform();
    auto uniform = [](double x) { return std::min(1.0, std::max(0.0, x)); };
    double base = ks_statistic(draws, uniform);
    // apply x -> x^3 to both samples and target
    std::vector<double> cubed(draws);
    for (auto& v : cubed) v = v * v * v;
    auto cdf = [](double x) { return std::min(1.0, std::max(0.0, std::cbrt(x))); };
    CHECK(ks_statistic(cubed, cdf) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("two-sample ks") {
    std::vector<double> a{0.1, 0.2, 0.3, 0.4};
    CHECK(ks_two_sample(a, a) == doctest::Approx(0.0));
    std::vector<double> b{10.0, 11.0, 12.0};
    CHECK(ks_two_sample(a, b) == doctest::Approx(1.0));
}

TEST_CASE("chi square uniform") {
    CHECK(chi_square_uniform({100, 100, 100}).statistic == doctest::Approx(0.0));
    auto lop = chi_square_uniform({10, 0});
    CHECK(lop.statistic == doctest::Approx(10.0));
    CHECK(lop.dof == 1);

    // permutation invariance
    auto x = chi_square_uniform({30, 50, 40});
    auto y = chi_square_uniform({50, 40, 30});
    CHECK(x.statistic == doctest::Approx(y.statistic));

    CHECK_THROWS_AS(chi_square_uniform({2, 1}), std::invalid_argument);

    // simulated uniform 3 classes, n = 3000: below the 99% critical value in
    // the overwhelming majority of seeds (check a fixed batch)
    int fails = 0;
    for (int seed = 0; seed < 50; ++seed) {
        Rng rng(9000 + seed);
        std::vector<long long> counts(3, 0);
        for (int i = 0; i < 3000; ++i) counts[rng.below(3)]++;
        if (chi_square_uniform(counts).statistic >= 9.2103) ++fails;
    }
    CHECK(fails <= 2);
}

TEST_CASE("chi square critical values") {
    CHECK(chi_square_critical_99(2) == doctest::Approx(9.2103).epsilon(1e-4));
    CHECK(chi_square_critical_99(7) == doctest::Approx(18.475).epsilon(5e-3));
    CHECK(chi_square_critical_99(25) == doctest::Approx(44.314).epsilon(2e-3));
}

TEST_CASE("power-law fits") {
    std::vector<double> T{10, 12, 14, 16, 18};
    std::vector<double> exact(T.size());
    for (size_t i = 0; i < T.size(); ++i) exact[i] = 3.0 * T[i] * T[i];
    auto fit = fit_power_law(T, exact, 2);
    CHECK(fit.coefficient == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.rel_residual == doctest::Approx(0.0).epsilon(1e-12));

    // wrong exponent leaves a visible residual
    auto wrong = fit_power_law(T, exact, 1);
    CHECK(wrong.rel_residual > 0.10);

    // noisy linear data recovers the planted coefficient within 5%
    Rng rng(17);
    std::vector<double> noisy(T.size());
    for (size_t i = 0; i < T.size(); ++i) noisy[i] = 7.0 * T[i] * (1.0 + 0.05 * rng.gaussian());
    auto rec = fit_power_law(T, noisy, 1);
    CHECK(std::fabs(rec.coefficient - 7.0) / 7.0 < 0.05);

    CHECK_THROWS_AS(fit_power_law({1, 2}, {1, 2}, 1), std::invalid_argument);
}

TEST_CASE("report construction") {
    auto r = TestReport::below("ks", 0.03, 0.05, 1000, "uniform", 7);
    CHECK(r.pass);
    auto f = TestReport::below("ks", 0.06, 0.05, 1000, "uniform", 7);
    CHECK_FALSE(f.pass);
    auto e = TestReport::exact("sets", true, "equality");
    CHECK(e.pass);
}

TEST_SUITE_END();
