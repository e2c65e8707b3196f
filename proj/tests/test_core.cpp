#include <doctest.h>

#include <cmath>

#include "mda/core.hpp"
#include "mda/dd.hpp"
#include "mda/rng.hpp"

using namespace mda;

TEST_SUITE_BEGIN("core");

TEST_CASE("block_norm basic values") {
    std::vector<double> zero{0, 0, 0};
    CHECK(block_norm(zero, NormKind::Sup) == 0.0);
    std::vector<double> pyth{3, -4};
    CHECK(block_norm(pyth, NormKind::Euclidean) == doctest::Approx(5.0));
    std::vector<double> v{1.5, -2.25};
    CHECK(block_norm(v, NormKind::Sup) == doctest::Approx(2.25));
    CHECK(block_norm(v, NormKind::Taxicab) == doctest::Approx(3.75));
    CHECK_THROWS_AS(block_norm(std::vector<double>{}, NormKind::Sup), std::invalid_argument);
}

TEST_CASE("norm homogeneity and triangle inequality on random samples") {
    Rng rng(11);
    for (NormKind kind : {NormKind::Sup, NormKind::Euclidean, NormKind::Taxicab}) {
        for (int rep = 0; rep < 200; ++rep) {
            int dim = 1 + static_cast<int>(rng.below(4));
            std::vector<double> a(dim), b(dim);
            for (auto& x : a) x = rng.uniform(-5, 5);
            for (auto& x : b) x = rng.uniform(-5, 5);
            double c = rng.uniform(-3, 3);
            std::vector<double> ca(dim), ab(dim);
            for (int i = 0; i < dim; ++i) {
                ca[i] = c * a[i];
                ab[i] = a[i] + b[i];
            }
            CHECK(block_norm(ca, kind) ==
                  doctest::Approx(std::fabs(c) * block_norm(a, kind)).epsilon(1e-12));
            CHECK(block_norm(ab, kind) <=
                  block_norm(a, kind) + block_norm(b, kind) + 1e-12);
        }
    }
}

TEST_CASE("nonzero integer vectors have norm >= 1 under all kinds") {
    Rng rng(13);
    for (int rep = 0; rep < 500; ++rep) {
        int dim = 1 + static_cast<int>(rng.below(4));
        std::vector<double> v(dim, 0.0);
        bool nonzero = false;
        for (auto& x : v) {
            long long c = static_cast<long long>(rng.below(7)) - 3;
            x = static_cast<double>(c);
            nonzero |= (c != 0);
        }
        if (!nonzero) continue;
        for (NormKind kind : {NormKind::Sup, NormKind::Euclidean, NormKind::Taxicab})
            CHECK(block_norm(v, kind) >= 1.0);
    }
}

TEST_CASE("project_blocks splits and reassembles") {
    std::vector<double> x{7.5, -2.0};
    auto parts = project_blocks(x, {1, 1});
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == std::vector<double>{7.5});
    CHECK(parts[1] == std::vector<double>{-2.0});

    std::vector<double> y{1, 2, 3};
    auto ny = project_blocks(y, {2, 1});
    CHECK(ny[0] == std::vector<double>{1, 2});
    CHECK(ny[1] == std::vector<double>{3});

    auto single = project_blocks(y, {3});
    CHECK(single[0] == y);

    CHECK_THROWS_AS(project_blocks(y, {2, 2}), std::invalid_argument);

    // partition property on random inputs
    Rng rng(17);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<int> ps;
        int total = 0;
        int nblocks = 1 + static_cast<int>(rng.below(3));
        for (int b = 0; b < nblocks; ++b) {
            int w = 1 + static_cast<int>(rng.below(3));
            ps.push_back(w);
            total += w;
        }
        std::vector<double> v(total);
        for (auto& c : v) c = rng.uniform(-9, 9);
        auto blocks = project_blocks(v, ps);
        std::vector<double> re;
        for (auto& b : blocks) re.insert(re.end(), b.begin(), b.end());
        CHECK(re == v);
    }
}

TEST_CASE("gcd_all") {
    CHECK(gcd_all(std::vector<long long>{6, 10, 15}) == 1);
    CHECK(gcd_all(std::vector<long long>{4, 8, 12}) == 4);
    CHECK(gcd_all(std::vector<long long>{}) == 0);
    CHECK(gcd_all(std::vector<long long>{0, 0}) == 0);
    CHECK(gcd_all(std::vector<long long>{-6, 9}) == 3);
}

TEST_CASE("decomposition bookkeeping") {
    Decomposition dec({1, 2}, {3});
    CHECK(dec.k() == 2);
    CHECK(dec.r() == 1);
    CHECK(dec.m() == 3);
    CHECK(dec.n() == 3);
    CHECK(dec.d() == 6);
    CHECK(dec.m_offset(1) == 1);
    CHECK_THROWS_AS(Decomposition({}, {1}), std::invalid_argument);
    CHECK_THROWS_AS(Decomposition({0}, {1}), std::invalid_argument);
}

TEST_CASE("target storage is exact and precision-tagged") {
    Target t = Target::from_doubles(1, 1, {0.61803398875});
    CHECK(t.at_d(0, 0) == 0.61803398875);
    Target r = Target::random(2, 3, 42);
    CHECK(r.entries.size() == 6);
    for (const auto& e : r.entries) {
        CHECK(to_double(e) > 0.0);
        CHECK(to_double(e) < 1.0);
    }
    // same seed, same entries
    Target r2 = Target::random(2, 3, 42);
    CHECK(r.entries == r2.entries);
}

TEST_CASE("double-double arithmetic carries ~106 bits") {
    // (1 + 2^-60) * 3 needs more than 53 bits to distinguish from 3.
    DD a = dd_add(DD(1.0), DD(0x1.0p-60));
    DD b = dd_mul(a, DD(3.0));
    double lo = dd_sub(b, DD(3.0)).value();
    CHECK(lo == doctest::Approx(3.0 * 0x1.0p-60).epsilon(1e-10));

    DD q = dd_from_i64((1LL << 60) + 1);
    CHECK(q.hi == doctest::Approx(std::pow(2.0, 60)));
    CHECK(q.lo == 1.0);
}

TEST_CASE("unit ball volumes per kind") {
    CHECK(unit_ball_volume_1(NormKind::Sup, 2) == doctest::Approx(4.0));
    CHECK(unit_ball_volume_1(NormKind::Euclidean, 2) == doctest::Approx(M_PI));
    CHECK(unit_ball_volume_1(NormKind::Taxicab, 2) == doctest::Approx(2.0));
}

TEST_SUITE_END();
