#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "mda/enumerate.hpp"
#include "mda/packet.hpp"

using namespace mda;

TEST_SUITE_BEGIN("enumerate");

namespace {

const double kGolden = 0.61803398875;

Params golden_params() {
    Params p;
    p.epsilon = 0.5;
    p.etas = {0.4};
    p.shape_index = 2;
    return p;
}

using PairSet = std::set<std::pair<std::vector<long long>, std::vector<long long>>>;

PairSet to_set(const ApproximateStream& s) {
    PairSet out;
    for (const auto& a : s.members) out.insert({a.p, a.q});
    return out;
}

// Naive oracle: double loop over the full (p, q) box, definition applied
// verbatim. Independent of the candidate-window logic under test.
PairSet brute_force(const Target& target, const Params& params, const Decomposition& dec,
                    const NormSpec& norms, double T) {
    PairSet out;
    double H = std::exp(T);
    long long QB = static_cast<long long>(std::floor(H));
    double thetaMax = 0.0;
    for (const auto& e : target.entries) thetaMax = std::max(thetaMax, std::fabs(to_double(e)));
    double etaMax = *std::max_element(params.etas.begin(), params.etas.end());
    long long PB = static_cast<long long>(std::floor(thetaMax * dec.n() * H + etaMax + 1.0));

    std::vector<long long> q(dec.n(), -QB), p(dec.m(), -PB);
    auto nextVec = [](std::vector<long long>& v, long long lim) {
        int c = static_cast<int>(v.size()) - 1;
        while (c >= 0 && v[c] == lim) v[c--] = -lim;
        if (c < 0) return false;
        ++v[c];
        return true;
    };
    std::vector<NormKind> nk(norms.kinds.begin() + dec.k(), norms.kinds.end());
    while (true) {
        std::vector<double> qd(q.begin(), q.end());
        if (compound_norm(qd, dec.n_parts, nk) <= H) {
            std::fill(p.begin(), p.end(), -PB);
            while (true) {
                BlockNorms bn;
                if (is_epsilon_approximate(target, p, q, params, dec, norms, &bn) &&
                    !bn.degenerate)
                    out.insert({p, q});
                if (!nextVec(p, PB)) break;
            }
        }
        if (!nextVec(q, QB)) break;
    }
    return out;
}

} // namespace

TEST_CASE("is_epsilon_approximate on the golden-ratio target") {
    Target t = Target::from_doubles(1, 1, {kGolden});
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    Params params = golden_params();

    BlockNorms bn;
    CHECK(is_epsilon_approximate(t, std::vector<long long>{-8}, std::vector<long long>{13},
                                 params, dec, ns, &bn));
    CHECK(bn.err_blocks[0] == doctest::Approx(0.0344419).epsilon(1e-5));
    CHECK(bn.error == doctest::Approx(0.44774410).epsilon(1e-6));

    CHECK(is_epsilon_approximate(t, std::vector<long long>{-1}, std::vector<long long>{2},
                                 params, dec, ns, &bn));
    CHECK(bn.err_blocks[0] == doctest::Approx(0.2360680).epsilon(1e-6));
    CHECK(bn.error == doctest::Approx(0.4721360).epsilon(1e-6));

    CHECK_FALSE(is_epsilon_approximate(t, std::vector<long long>{1}, std::vector<long long>{1},
                                       params, dec, ns, &bn));
    CHECK(bn.err_blocks[0] == doctest::Approx(1.618).epsilon(1e-3));
}

TEST_CASE("enumerate_direct at T=4 equals brute force on the golden target") {
    Target t = Target::from_doubles(1, 1, {kGolden});
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    Params params = golden_params();
    EnumConfig cfg;
    cfg.T = 4.0;

    auto stream = enumerate_direct(t, params, dec, ns, cfg);
    auto oracle = brute_force(t, params, dec, ns, 4.0);
    CHECK(to_set(stream) == oracle);

    // All convergents q = 1,2,3,5,8,13,21,34 qualify at eps = 1/2 (golden-ratio
    // errors approach 1/sqrt(5) ~ 0.447 from both sides; q = 1 has error
    // 0.382), both signs each.
    CHECK(stream.members.size() == 16);
    PairSet expect;
    for (auto [p, q] : std::vector<std::pair<long long, long long>>{
             {-1, 1}, {-1, 2}, {-2, 3}, {-3, 5}, {-5, 8}, {-8, 13}, {-13, 21}, {-21, 34}}) {
        expect.insert({{p}, {q}});
        expect.insert({{-p}, {-q}});
    }
    CHECK(to_set(stream) == expect);
}

TEST_CASE("empty stream when no height-one candidate qualifies") {
    Target t = Target::from_doubles(1, 1, {0.5});
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    Params params;
    params.epsilon = 0.2;
    params.etas = {0.3};
    params.shape_index = 2;
    EnumConfig cfg;
    cfg.T = 0.5; // e^T < 2, and q = +-1 leaves |p + theta q| >= 1/2 > eta
    auto stream = enumerate_direct(t, params, dec, ns, cfg);
    CHECK(stream.members.empty());
}

TEST_CASE("oracle equality on random targets, d = 2 and d = 3") {
    for (int seed = 1; seed <= 4; ++seed) {
        Target t2 = Target::random(1, 1, seed);
        Decomposition d2({1}, {1});
        NormSpec n2 = NormSpec::all(NormKind::Sup, d2);
        Params p2 = golden_params();
        EnumConfig cfg;
        cfg.T = 5.0;
        CHECK(to_set(enumerate_direct(t2, p2, d2, n2, cfg)) ==
              brute_force(t2, p2, d2, n2, cfg.T));

        Target t3 = Target::random(2, 1, 100 + seed);
        Decomposition d3({1, 1}, {1});
        NormSpec n3 = NormSpec::all(NormKind::Sup, d3);
        Params p3;
        p3.epsilon = 0.5;
        p3.etas = {0.4, 0.4};
        p3.shape_index = 3;
        EnumConfig cfg3;
        cfg3.T = 3.5;
        CHECK(to_set(enumerate_direct(t3, p3, d3, n3, cfg3)) ==
              brute_force(t3, p3, d3, n3, cfg3.T));
    }
}

TEST_CASE("oracle equality at d = 4 (two row blocks, two column blocks)") {
    Target t = Target::random(2, 2, 555);
    Decomposition dec({1, 1}, {1, 1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    Params params;
    params.epsilon = 0.7;
    params.etas = {0.45, 0.45};
    params.shape_index = 4;
    EnumConfig cfg;
    cfg.T = 2.5;
    auto stream = enumerate_direct(t, params, dec, ns, cfg);
    CHECK(to_set(stream) == brute_force(t, params, dec, ns, cfg.T));
}

TEST_CASE("oracle equality with a two-part column split (r = 2)") {
    Target t = Target::random(1, 2, 77);
    Decomposition dec({1}, {1, 1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    Params params;
    params.epsilon = 0.6;
    params.etas = {0.45};
    params.shape_index = 3;
    EnumConfig cfg;
    cfg.T = 2.5;
    auto stream = enumerate_direct(t, params, dec, ns, cfg);
    CHECK(to_set(stream) == brute_force(t, params, dec, ns, cfg.T));
    CHECK(!stream.members.empty());
}

TEST_CASE("oracle equality under euclidean and taxicab block norms") {
    Target t = Target::random(2, 1, 3131);
    Decomposition dec({2}, {1});
    Params params;
    params.epsilon = 1.2;
    params.etas = {0.9};
    params.shape_index = 3;
    for (NormKind kind : {NormKind::Euclidean, NormKind::Taxicab}) {
        NormSpec ns{{kind, NormKind::Sup}};
        EnumConfig cfg;
        cfg.T = 3.0;
        CHECK(to_set(enumerate_direct(t, params, dec, ns, cfg)) ==
              brute_force(t, params, dec, ns, cfg.T));
    }
}

TEST_CASE("stream symmetry and epsilon monotonicity") {
    Target t = Target::random(1, 1, 5);
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    Params params = golden_params();
    EnumConfig cfg;
    cfg.T = 9.0;
    auto stream = enumerate_direct(t, params, dec, ns, cfg);
    auto set = to_set(stream);
    for (const auto& [p, q] : set) {
        std::vector<long long> np(p), nq(q);
        for (auto& v : np) v = -v;
        for (auto& v : nq) v = -v;
        CHECK(set.count({np, nq}) == 1);
    }
    Params tighter = params;
    tighter.epsilon = 0.3;
    auto sub = to_set(enumerate_direct(t, tighter, dec, ns, cfg));
    for (const auto& m : sub) CHECK(set.count(m) == 1);
    CHECK(sub.size() < set.size());
}

TEST_CASE("divisor filter: members divisible by s, quotient qualifies rescaled") {
    Target t = Target::from_doubles(1, 1, {kGolden});
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    Params params;
    params.epsilon = 2.0; // room for doubled members: 4 * err <= 2
    params.etas = {0.45};
    params.shape_index = 2;
    EnumConfig cfg;
    cfg.T = 4.0;
    cfg.mode = EnumMode::EpsilonStar;
    cfg.s = 2;
    auto stream = enumerate_direct(t, params, dec, ns, cfg);
    CHECK(!stream.members.empty());
    Params quarter;
    quarter.epsilon = params.epsilon / 4.0; // eps / s^d
    quarter.etas = {params.etas[0] / 2.0};
    quarter.shape_index = 2;
    for (const auto& a : stream.members) {
        CHECK(a.p[0] % 2 == 0);
        CHECK(a.q[0] % 2 == 0);
        std::vector<long long> hp{a.p[0] / 2}, hq{a.q[0] / 2};
        BlockNorms bn;
        is_epsilon_approximate(t, hp, hq, quarter, dec, ns, &bn);
        CHECK(bn.error <= quarter.epsilon + 1e-12);
        CHECK(bn.err_blocks[0] <= quarter.etas[0] + 1e-12);
    }
    // and the doubled members satisfy the original bound
    for (const auto& a : stream.members) {
        BlockNorms bn;
        is_epsilon_approximate(t, a.p, a.q, params, dec, ns, &bn);
        CHECK(bn.error <= params.epsilon + 1e-12);
    }
}

TEST_CASE("precision envelope is enforced") {
    Target t = Target::random(1, 1, 9);
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    Params params = golden_params();
    EnumConfig cfg;
    cfg.T = 19.0;
    CHECK_THROWS_AS(enumerate_direct(t, params, dec, ns, cfg), EnvelopeError);
    cfg.T = 46.0;
    Target tdd = Target::random(1, 1, 9, Precision::DoubleDouble);
    CHECK_THROWS_AS(enumerate_direct(tdd, params, dec, ns, cfg), EnvelopeError);
}

TEST_CASE("worker count does not change the stream") {
    Target t = Target::random(1, 1, 31);
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    Params params = golden_params();
    EnumConfig cfg;
    cfg.T = 10.0;
    auto one = enumerate_direct(t, params, dec, ns, cfg);
    cfg.workers = 3;
    cfg.chunk = 1000;
    auto three = enumerate_direct(t, params, dec, ns, cfg);
    REQUIRE(one.members.size() == three.members.size());
    for (size_t i = 0; i < one.members.size(); ++i) {
        CHECK(one.members[i].p == three.members[i].p);
        CHECK(one.members[i].q == three.members[i].q);
    }
}

TEST_CASE("order_stream by increasing height and by decreasing error block") {
    Target t = Target::from_doubles(1, 1, {kGolden});
    Decomposition dec({1}, {1});
    NormSpec ns = NormSpec::all(NormKind::Sup, dec);
    Params params = golden_params();
    EnumConfig cfg;
    cfg.T = 4.0;
    auto stream = enumerate_direct(t, params, dec, ns, cfg);

    auto inc = order_stream(stream, Ordering::ByIncreasingQNorm, t, params, dec, ns);
    for (size_t i = 0; i + 1 < inc.members.size(); ++i)
        CHECK(inc.members[i].height <= inc.members[i + 1].height);

    auto dec_ord = order_stream(stream, Ordering::ByDecreasingErrorBlock, t, params, dec, ns);
    // one representative per +/- pair, the one with positive q (j = 2)
    CHECK(dec_ord.members.size() == stream.members.size() / 2);
    for (const auto& a : dec_ord.members) CHECK(a.q[0] > 0);
    for (size_t i = 0; i + 1 < dec_ord.members.size(); ++i) {
        double e1 = std::fabs(-static_cast<double>(dec_ord.members[i].p[0]) -
                              kGolden * dec_ord.members[i].q[0]);
        double e2 = std::fabs(-static_cast<double>(dec_ord.members[i + 1].p[0]) -
                              kGolden * dec_ord.members[i + 1].q[0]);
        CHECK(e1 >= e2);
    }

    // singleton stream maps to itself
    ApproximateStream single;
    single.members.push_back(stream.members.front());
    auto same = order_stream(single, Ordering::ByIncreasingQNorm, t, params, dec, ns);
    CHECK(same.members.size() == 1);

    // sign rule keeps (-8, 13) over (8, -13)
    ApproximateStream pair;
    Approximate a;
    a.p = {-8};
    a.q = {13};
    a.height = 13;
    Approximate b;
    b.p = {8};
    b.q = {-13};
    b.height = 13;
    pair.members = {a, b};
    auto kept = order_stream(pair, Ordering::ByDecreasingErrorBlock, t, params, dec, ns);
    REQUIRE(kept.members.size() == 1);
    CHECK(kept.members[0].q[0] == 13);
}

TEST_CASE("cf agrees with direct on rational targets") {
    for (int seed = 1; seed <= 3; ++seed) {
        Target t = Target::random_rational(seed, 512);
        Decomposition dec({1}, {1});
        NormSpec ns = NormSpec::all(NormKind::Sup, dec);
        Params params;
        params.epsilon = 0.45;
        params.etas = {0.4};
        params.shape_index = 2;
        CfOptions cf;
        cf.T = 10.0;
        auto viaCf = enumerate_cf(t, params, cf);
        EnumConfig cfg;
        cfg.T = 10.0;
        auto direct = enumerate_direct(t, params, dec, ns, cfg);
        CHECK(to_set(viaCf) == to_set(direct));
    }
}

TEST_CASE("cf handles terminating expansions without error") {
    Target t;
    t.rows = t.cols = 1;
    t.precision = Precision::Rational;
    t.entries = {BigRat(1, 3)};
    Params params;
    params.epsilon = 0.4;
    params.etas = {0.4};
    params.shape_index = 2;
    CfOptions cf;
    cf.T = 0.1; // envelope: needs tiny T for a 2-bit denominator
    CfStats stats;
    auto stream = enumerate_cf(t, params, cf, &stats);
    CHECK(stats.convergents >= 1);
    // (0, 1): |0 + 1/3| = 1/3 <= eta and error 1/3 <= eps
    CHECK(stream.members.size() == 2);
}

TEST_CASE("cf of a golden-like target is empty at eps = 0.4") {
    // all partial quotients 1: theta = F_39 / F_40 has error block
    // q_l |q_l theta - p_l| >= 0.4377 > 0.4 for every convergent
    long f1 = 1, f2 = 1;
    for (int i = 2; i <= 40; ++i) {
        long t = f1 + f2;
        f1 = f2;
        f2 = t;
    }
    Target t;
    t.rows = t.cols = 1;
    t.precision = Precision::Rational;
    t.entries = {BigRat(f1, f2)};
    Params params;
    params.epsilon = 0.4;
    params.etas = {0.3}; // excludes the q = 1 convergent (|delta| = 0.382)
    params.shape_index = 2;
    CfOptions cf;
    cf.T = 4.0; // 27-bit denominator clears the 4T/ln2 = 24-bit envelope
    auto stream = enumerate_cf(t, params, cf);
    CHECK(stream.members.empty());
}

TEST_CASE("cf envelope checks") {
    Target t = Target::random_rational(4, 64);
    Params params;
    params.epsilon = 0.45;
    params.etas = {0.4};
    params.shape_index = 2;
    CfOptions cf;
    cf.T = 50.0; // needs ~289 bits
    CHECK_THROWS_AS(enumerate_cf(t, params, cf), EnvelopeError);
    params.epsilon = 0.6;
    cf.T = 5.0;
    CHECK_THROWS_AS(enumerate_cf(t, params, cf), EnvelopeError);
}

TEST_SUITE_END();
