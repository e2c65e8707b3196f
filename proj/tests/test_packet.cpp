#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mda/enumerate.hpp"
#include "mda/measure.hpp"
#include "mda/packet.hpp"

using namespace mda;

TEST_SUITE_BEGIN("packet");

namespace {

const double kGolden = 0.61803398875;

Params params_d2() {
    Params p;
    p.epsilon = 0.5;
    p.etas = {0.4};
    p.shape_index = 2;
    return p;
}

} // namespace

TEST_CASE("error_term values and degenerate signal") {
    Target t = Target::from_doubles(1, 1, {kGolden});
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    auto err = error_term(t, std::vector<long long>{-8}, std::vector<long long>{13}, dec, ns);
    REQUIRE(err.has_value());
    CHECK(*err == doctest::Approx(0.44774410).epsilon(1e-7));

    // p + theta q = 0 exactly -> degenerate
    Target half = Target::from_doubles(1, 1, {0.5});
    auto degen = error_term(half, std::vector<long long>{-1}, std::vector<long long>{2}, dec, ns);
    CHECK_FALSE(degen.has_value());

    // column target, two unit m-blocks
    Target col = Target::from_doubles(2, 1, {0.3, 0.7});
    Decomposition dec2({1, 1}, {1});
    NormSpec ns2 = NormSpec::all(NormKind::Sup, dec2);
    auto e2 = error_term(col, std::vector<long long>{-1, -2}, std::vector<long long>{3}, dec2, ns2);
    REQUIRE(e2.has_value());
    CHECK(*e2 == doctest::Approx(0.03).epsilon(1e-9));
}

TEST_CASE("sphere projection directions") {
    Target t = Target::from_doubles(1, 1, {kGolden});
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    auto pr = sphere_projection(t, std::vector<long long>{-8}, std::vector<long long>{13}, dec, ns);
    REQUIRE(pr.has_value());
    CHECK((*pr)[0] == doctest::Approx(1.0));
    CHECK((*pr)[1] == doctest::Approx(1.0));
    auto neg = sphere_projection(t, std::vector<long long>{8}, std::vector<long long>{-13}, dec, ns);
    CHECK((*neg)[0] == doctest::Approx(-1.0));
    CHECK((*neg)[1] == doctest::Approx(-1.0));

    // euclidean block normalizes 3-4-5
    Target zero = Target::from_doubles(2, 1, {0.0, 0.0});
    Decomposition dec2({2}, {1});
    NormSpec ns2{{NormKind::Euclidean, NormKind::Sup}};
    auto pe = sphere_projection(zero, std::vector<long long>{3, -4}, std::vector<long long>{1},
                                dec2, ns2);
    REQUIRE(pe.has_value());
    CHECK((*pe)[0] == doctest::Approx(0.6));
    CHECK((*pe)[1] == doctest::Approx(-0.8));
    CHECK((*pe)[2] == doctest::Approx(1.0));
}

TEST_CASE("proj odd symmetry and error evenness on a stream") {
    Target t = Target::random(1, 1, 12);
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    EnumConfig cfg;
    cfg.T = 8.0;
    auto stream = enumerate_direct(t, params_d2(), dec, ns, cfg);
    REQUIRE(!stream.members.empty());
    for (const auto& a : stream.members) {
        std::vector<long long> np{-a.p[0]}, nq{-a.q[0]};
        auto f = sphere_projection(t, a.p, a.q, dec, ns);
        auto g = sphere_projection(t, np, nq, dec, ns);
        REQUIRE(f.has_value());
        REQUIRE(g.has_value());
        for (size_t i = 0; i < f->size(); ++i) CHECK((*f)[i] == -(*g)[i]);
        auto e1 = error_term(t, a.p, a.q, dec, ns);
        auto e2 = error_term(t, np, nq, dec, ns);
        CHECK(*e1 == *e2);
        CHECK(*e1 > 0.0);
        CHECK(*e1 <= params_d2().epsilon);
    }
}

TEST_CASE("congruence residues") {
    std::vector<long long> p{-8}, q{13};
    CHECK(congruence_residues(p, q, 5) == std::vector<int>{2, 3});
    CHECK(congruence_residues(p, q, 2) == std::vector<int>{0, 1});
    // primitive pair stays primitive mod N
    for (int N : {2, 3, 4, 5, 6}) {
        auto res = congruence_residues(p, q, N);
        long long g = N;
        for (int v : res) g = std::gcd(g, static_cast<long long>(v));
        CHECK(g == 1);
    }
}

TEST_CASE("lambda_theta basis: covolume and image") {
    Target t = Target::from_doubles(1, 1, {kGolden});
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    std::vector<long long> p{-8}, q{13};
    auto basis = lattice_lambda_theta(t, p, q, dec, ns);
    REQUIRE(basis.has_value());
    double det = mat_det(*basis);
    CHECK(std::fabs(det) == doctest::Approx(1.0 / 0.44774410).epsilon(1e-6));
    CHECK(std::fabs(det) == doctest::Approx(2.2334).epsilon(1e-4));
    // image of (p, q) is the projection vector
    auto pr = sphere_projection(t, p, q, dec, ns);
    std::vector<double> pq{-8.0, 13.0};
    auto img = mat_vec(*basis, pq);
    for (int i = 0; i < 2; ++i) CHECK(img[i] == doctest::Approx((*pr)[i]).epsilon(1e-12));
}

TEST_CASE("axis normalizer properties") {
    // identity and sign cases
    std::vector<double> ej{0.0, 1.0};
    Mat A = axis_normalizer(ej, 1.0, 2);
    CHECK(A(0, 0) == doctest::Approx(1.0));
    CHECK(A(1, 1) == doctest::Approx(1.0));
    CHECK(A(0, 1) == doctest::Approx(0.0));

    std::vector<double> mej{0.0, -1.0};
    Mat B = axis_normalizer(mej, 1.0, 2);
    auto img = mat_vec(B, mej);
    CHECK(img[0] == doctest::Approx(0.0));
    CHECK(img[1] == doctest::Approx(-1.0));
    CHECK(std::fabs(mat_det(B)) == doctest::Approx(1.0));

    // random d = 2,3,4: A x = sign(x_j) e_j, A e_i = c e_i, |det| = gamma
    Rng rng(99);
    for (int d = 2; d <= 4; ++d) {
        for (int rep = 0; rep < 200; ++rep) {
            auto spec = marginal_sphere_block(d, NormKind::Euclidean);
            auto x = sample_marginal(spec, rng);
            int j = 1 + static_cast<int>(rng.below(d));
            if (std::fabs(x[j - 1]) < 1e-6) continue;
            double gamma = rng.uniform(0.05, 2.0);
            Mat M = axis_normalizer(x, gamma, j);
            CHECK(std::fabs(std::fabs(mat_det(M)) - gamma) < 1e-12);
            auto ix = mat_vec(M, x);
            for (int i = 0; i < d; ++i) {
                double want = (i == j - 1) ? (x[j - 1] > 0 ? 1.0 : -1.0) : 0.0;
                CHECK(ix[i] == doctest::Approx(want).epsilon(1e-10));
            }
        }
    }

    std::vector<double> bad{1.0, 0.0};
    CHECK_THROWS_AS(axis_normalizer(bad, 1.0, 2), std::invalid_argument);
}

TEST_CASE("shape lattice: unimodular, contains e_j primitively, reduction map") {
    int checked = 0;
    for (int seed = 1; seed <= 40 && checked < 1000; ++seed) {
        Target t = Target::random(1, 1, 1000 + seed);
        Decomposition dec({1}, {1});
        NormSpec ns = NormSpec::all(NormKind::Sup, dec);
        Params params = params_d2();
        EnumConfig cfg;
        cfg.T = 9.0;
        auto stream = enumerate_direct(t, params, dec, ns, cfg);
        for (const auto& a : stream.members) {
            auto basis = shape_lattice_basis(t, a.p, a.q, params, dec, ns);
            REQUIRE(basis.has_value());
            CHECK(std::fabs(std::fabs(mat_det(*basis)) - 1.0) < 1e-9);
            // integer solve of basis z = e_j
            auto z = mat_solve(*basis, {0.0, 1.0});
            std::vector<long long> zi{static_cast<long long>(std::llround(z[0])),
                                      static_cast<long long>(std::llround(z[1]))};
            CHECK(std::fabs(z[0] - zi[0]) < 1e-9 * std::max(1.0, std::fabs(z[0])));
            CHECK(std::fabs(z[1] - zi[1]) < 1e-9 * std::max(1.0, std::fabs(z[1])));
            CHECK(gcd_all(zi) == 1);

            // reduction map: lambda_1 = A_1 A_2^{-1} lambda_2
            auto proj = sphere_projection(t, a.p, a.q, dec, ns);
            auto err = error_term(t, a.p, a.q, dec, ns);
            Params pj = params;
            pj.shape_index = 1;
            auto lam1 = shape_lattice_basis(t, a.p, a.q, pj, dec, ns);
            REQUIRE(lam1.has_value());
            Mat map = mat_mul(axis_normalizer(*proj, *err, 1),
                              mat_inverse(axis_normalizer(*proj, *err, 2)));
            Mat via = mat_mul(map, *basis);
            for (int i = 0; i < 4; ++i)
                CHECK(std::fabs(via.a[i] - lam1->a[i]) < 1e-9);
            ++checked;
        }
    }
    CHECK(checked >= 100);

    // d = 3 case
    for (int seed = 1; seed <= 6; ++seed) {
        Target t = Target::random(2, 1, 2000 + seed);
        Decomposition dec({1, 1}, {1});
        NormSpec ns = NormSpec::all(NormKind::Sup, dec);
        Params params;
        params.epsilon = 0.5;
        params.etas = {0.4, 0.4};
        params.shape_index = 3;
        EnumConfig cfg;
        cfg.T = 6.0;
        auto stream = enumerate_direct(t, params, dec, ns, cfg);
        for (const auto& a : stream.members) {
            auto basis = shape_lattice_basis(t, a.p, a.q, params, dec, ns);
            REQUIRE(basis.has_value());
            CHECK(std::fabs(std::fabs(mat_det(*basis)) - 1.0) < 1e-9);
            auto z = mat_solve(*basis, {0.0, 0.0, 1.0});
            std::vector<long long> zi(3);
            for (int c = 0; c < 3; ++c) {
                zi[c] = static_cast<long long>(std::llround(z[c]));
                CHECK(std::fabs(z[c] - zi[c]) < 1e-9 * std::max(1.0, std::fabs(z[c])));
            }
            CHECK(gcd_all(zi) == 1);
        }
    }
}

TEST_CASE("shape lattice at d = 4 stays unimodular with primitive e_j") {
    Target t = Target::random(2, 2, 777);
    Decomposition dec({1, 1}, {1, 1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    Params params;
    params.epsilon = 0.7;
    params.etas = {0.45, 0.45};
    params.shape_index = 4;
    EnumConfig cfg;
    cfg.T = 3.0;
    auto stream = enumerate_direct(t, params, dec, ns, cfg);
    int checked = 0;
    for (const auto& a : stream.members) {
        auto basis = shape_lattice_basis(t, a.p, a.q, params, dec, ns);
        if (!basis) continue; // q_2 = 0 members are shape-undefined for j = 4
        CHECK(std::fabs(std::fabs(mat_det(*basis)) - 1.0) < 1e-9);
        auto z = mat_solve(*basis, {0.0, 0.0, 0.0, 1.0});
        std::vector<long long> zi(4);
        for (int c = 0; c < 4; ++c) {
            zi[c] = static_cast<long long>(std::llround(z[c]));
            CHECK(std::fabs(z[c] - zi[c]) < 1e-9 * std::max(1.0, std::fabs(z[c])));
        }
        CHECK(gcd_all(zi) == 1);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("torus coordinate charts") {
    Mat id = Mat::identity(2);
    CHECK(torus_coordinate(id) == doctest::Approx(0.0));

    Mat b(2);
    b(0, 0) = 1;
    b(1, 0) = 0.25;
    b(1, 1) = 1;
    CHECK(torus_coordinate(b) == doctest::Approx(0.25));

    Mat c(2);
    c(0, 0) = -1;
    c(1, 0) = 0.3;
    c(1, 1) = -1;
    CHECK(torus_coordinate(c) == doctest::Approx(0.7));

    // golden member: beta = 5/13
    Target t = Target::from_doubles(1, 1, {kGolden});
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    auto basis = shape_lattice_basis(t, std::vector<long long>{-8}, std::vector<long long>{13},
                                     params_d2(), dec, ns);
    REQUIRE(basis.has_value());
    CHECK(torus_coordinate(*basis) == doctest::Approx(5.0 / 13.0).epsilon(1e-9));

    // exact route agrees
    BigRat theta = rat_from_double(kGolden);
    CHECK(torus_coordinate_exact(theta, BigInt(-8), BigInt(13)) ==
          doctest::Approx(5.0 / 13.0).epsilon(1e-12));

    // negative pair gives the same shape lattice and the same beta
    CHECK(torus_coordinate_exact(theta, BigInt(8), BigInt(-13)) ==
          doctest::Approx(5.0 / 13.0).epsilon(1e-12));

    Mat bad(2);
    bad(0, 0) = 1.0;
    bad(0, 1) = 0.5;
    bad(1, 1) = 1.0;
    CHECK_THROWS_AS(torus_coordinate(bad), std::runtime_error);
}

TEST_CASE("exact and floating torus coordinates agree along a stream") {
    Target t = Target::random(1, 1, 321);
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    Params params = params_d2();
    EnumConfig cfg;
    cfg.T = 10.0;
    auto stream = enumerate_direct(t, params, dec, ns, cfg);
    BigRat theta = t.at(0, 0);
    REQUIRE(!stream.members.empty());
    for (const auto& a : stream.members) {
        auto basis = shape_lattice_basis(t, a.p, a.q, params, dec, ns);
        REQUIRE(basis.has_value());
        double viaFloat = torus_coordinate(*basis);
        double viaExact = torus_coordinate_exact(theta, BigInt(static_cast<long>(a.p[0])),
                                                 BigInt(static_cast<long>(a.q[0])));
        double diff = std::fabs(viaFloat - viaExact);
        diff = std::min(diff, 1.0 - diff); // circle distance
        CHECK(diff < 1e-6);
    }
}

TEST_CASE("packet assembly and determinism") {
    Target t = Target::from_doubles(1, 1, {kGolden});
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    Params params = params_d2();
    Approximate a;
    a.p = {-8};
    a.q = {13};
    a.height = 13;
    auto pk1 = compute_packet(t, a, params, dec, ns);
    auto pk2 = compute_packet(t, a, params, dec, ns);
    REQUIRE(pk1.has_value());
    REQUIRE(pk2.has_value());
    CHECK(pk1->error == pk2->error);
    CHECK(pk1->proj == pk2->proj);
    CHECK(pk1->shape_basis.a == pk2->shape_basis.a);
    CHECK(pk1->torus_beta == pk2->torus_beta);
    CHECK(pk1->residues.at(2) == std::vector<int>{0, 1});
    CHECK(pk1->residues.at(3) == std::vector<int>{1, 1});
}

TEST_SUITE_END();
