#include "mda/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "mda/measure.hpp"
#include "mda/packet.hpp"
#include "mda/rng.hpp"

namespace mda {

double FlowTime::last_exponent(const Decomposition& dec) const {
    int k = dec.k(), r = dec.r();
    double s = 0.0;
    for (int j = 0; j + 1 < r; ++j) s += dec.n_parts[j] * comps[k + j];
    for (int i = 0; i < k; ++i) s -= dec.m_parts[i] * comps[i];
    return s / dec.n_parts[r - 1];
}

Mat flow_apply(const FlowTime& time, const Mat& basis, const Decomposition& dec) {
    int k = dec.k(), r = dec.r(), d = dec.d();
    if (static_cast<int>(time.comps.size()) != k + r - 1)
        throw std::invalid_argument("flow_apply: time dimension mismatch");
    if (basis.n != d) throw std::invalid_argument("flow_apply: basis dimension mismatch");
    std::vector<double> expo(d);
    for (int i = 0; i < k; ++i)
        for (int t = 0; t < dec.m_parts[i]; ++t) expo[dec.m_offset(i) + t] = time.comps[i];
    for (int j = 0; j + 1 < r; ++j)
        for (int t = 0; t < dec.n_parts[j]; ++t)
            expo[dec.m() + dec.n_offset(j) + t] = -time.comps[k + j];
    double last = time.last_exponent(dec);
    for (int t = 0; t < dec.n_parts[r - 1]; ++t)
        expo[dec.m() + dec.n_offset(r - 1) + t] = last;
    for (double e : expo)
        if (std::fabs(e) > 700.0)
            throw std::invalid_argument("flow_apply: exponent beyond overflow guard (700)");
    Mat out(d);
    for (int i = 0; i < d; ++i) {
        double f = std::exp(expo[i]);
        for (int j = 0; j < d; ++j) out(i, j) = f * basis(i, j);
    }
    return out;
}

Mat theta_lattice_basis(const Target& target, const Decomposition& dec) {
    int d = dec.d(), m = dec.m();
    Mat b = Mat::identity(d);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < dec.n(); ++j) b(i, m + j) = target.at_d(i, j);
    return b;
}

namespace {

// Lagrange/LLL-style size reduction by integer column operations; the column
// lattice is unchanged. Keeps the coefficient boxes of skew bases small.
void size_reduce(Mat& b) {
    int d = b.n;
    auto colNorm2 = [&](int c) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += b(i, c) * b(i, c);
        return s;
    };
    auto reduceAgainst = [&](int c, int against) {
        double dot = 0.0;
        for (int i = 0; i < d; ++i) dot += b(i, c) * b(i, against);
        double n2 = colNorm2(against);
        if (n2 == 0.0) return false;
        double mu = dot / n2;
        long long t = static_cast<long long>(std::llround(mu));
        if (t == 0) return false;
        for (int i = 0; i < d; ++i) b(i, c) -= static_cast<double>(t) * b(i, against);
        return true;
    };
    // The pass cap must cover the Euclidean dynamics of very skew inputs
    // (roughly 2T/log(golden) passes for a flowed basis at time T).
    for (int pass = 0; pass < 512; ++pass) {
        bool changed = false;
        // order columns by length, reduce longer against shorter
        std::vector<int> idx(d);
        for (int i = 0; i < d; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int c) { return colNorm2(a) < colNorm2(c); });
        for (int a = 1; a < d; ++a)
            for (int s = 0; s < a; ++s) changed |= reduceAgainst(idx[a], idx[s]);
        if (!changed) break;
    }
}

} // namespace

std::vector<LatticePoint> lattice_points_in_box(const Mat& basis, const Box& box,
                                                long long cell_budget) {
    int d = basis.n;
    if (static_cast<int>(box.lo.size()) != d || static_cast<int>(box.hi.size()) != d)
        throw std::invalid_argument("lattice_points_in_box: box dimension mismatch");
    for (int i = 0; i < d; ++i)
        if (box.lo[i] > box.hi[i]) return {};

    Mat red = basis;
    size_reduce(red);
    // Track the coordinate change exactly: red = basis * U with U unimodular.
    // Solving in the reduced basis and mapping back via U is unnecessary: we
    // return coefficients w.r.t. the reduced basis; they describe the same
    // lattice points, and primitivity of the coefficient vector is preserved
    // under unimodular change of basis.
    Mat inv = mat_inverse(red);

    // Coefficient bounds via interval arithmetic on inv * box.
    std::vector<long long> lo(d), hi(d);
    long long cells = 1;
    for (int i = 0; i < d; ++i) {
        double a = 0.0, b = 0.0;
        for (int j = 0; j < d; ++j) {
            double c = inv(i, j);
            if (c >= 0) {
                a += c * box.lo[j];
                b += c * box.hi[j];
            } else {
                a += c * box.hi[j];
                b += c * box.lo[j];
            }
        }
        lo[i] = static_cast<long long>(std::ceil(a - 1e-9));
        hi[i] = static_cast<long long>(std::floor(b + 1e-9));
        long long w = std::max<long long>(0, hi[i] - lo[i] + 1);
        if (w == 0) return {};
        if (cells > cell_budget / std::max<long long>(w, 1))
            throw CellBudgetExceeded("lattice_points_in_box: candidate cells exceed budget");
        cells *= w;
    }
    if (cells > cell_budget)
        throw CellBudgetExceeded("lattice_points_in_box: candidate cells exceed budget");

    std::vector<LatticePoint> out;
    std::vector<long long> z(d, 0);
    std::vector<double> x(d, 0.0);
    std::function<void(int)> rec = [&](int c) {
        if (c == d) {
            for (int i = 0; i < d; ++i) {
                double s = 0.0;
                for (int j = 0; j < d; ++j) s += red(i, j) * static_cast<double>(z[j]);
                x[i] = s;
            }
            if (box.contains(x)) out.push_back({z, x});
            return;
        }
        for (long long v = lo[c]; v <= hi[c]; ++v) {
            z[c] = v;
            rec(c + 1);
        }
    };
    rec(0);
    return out;
}

long long primitive_points_in_box(const Mat& basis, const Box& W, long long cell_budget) {
    auto pts = lattice_points_in_box(basis, W, cell_budget);
    long long count = 0;
    for (const auto& p : pts) {
        if (p.is_zero()) continue;
        if (gcd_all(p.coeff) == 1) ++count;
    }
    return count;
}

std::vector<VisitRecord> visit_times(const ApproximateStream& stream, const Target& target,
                                     const Params& params, const Decomposition& dec,
                                     const NormSpec& norms) {
    std::vector<VisitRecord> out;
    out.reserve(stream.members.size());
    int k = dec.k(), r = dec.r();
    for (size_t idx = 0; idx < stream.members.size(); ++idx) {
        const auto& a = stream.members[idx];
        BlockNorms bn;
        is_epsilon_approximate(target, a.p, a.q, params, dec, norms, &bn);
        if (bn.degenerate) continue;
        VisitRecord rec;
        rec.member_index = idx;
        rec.time.comps.resize(k + r - 1);
        for (int i = 0; i < k; ++i) rec.time.comps[i] = -std::log(bn.err_blocks[i]);
        for (int j = 0; j + 1 < r; ++j) rec.time.comps[k + j] = std::log(bn.q_blocks[j]);

        // Flow the distinguished vector and test section membership.
        double resid = 0.0;
        for (int i = 0; i < k; ++i) {
            double scaled = std::exp(rec.time.comps[i]) * bn.err_blocks[i];
            resid = std::max(resid, std::fabs(scaled - 1.0));
        }
        for (int j = 0; j + 1 < r; ++j) {
            double scaled = std::exp(-rec.time.comps[k + j]) * bn.q_blocks[j];
            resid = std::max(resid, std::fabs(scaled - 1.0));
        }
        double lastExp = rec.time.last_exponent(dec);
        double lastNorm = std::exp(lastExp) * bn.q_blocks[r - 1];
        double lastPow = std::pow(lastNorm, dec.n_parts[r - 1]);
        rec.residual = resid;
        rec.verified = (resid < 1e-9) && (lastPow <= params.epsilon + 1e-9);
        out.push_back(rec);
    }
    return out;
}

long long visit_time_collisions(const std::vector<VisitRecord>& records,
                                const ApproximateStream& stream) {
    std::map<std::vector<double>, std::vector<size_t>> groups;
    for (const auto& r : records) groups[r.time.comps].push_back(r.member_index);
    long long bad = 0;
    for (const auto& [t, idxs] : groups) {
        if (idxs.size() != 2) {
            ++bad;
            continue;
        }
        const auto& a = stream.members[idxs[0]];
        const auto& b = stream.members[idxs[1]];
        bool neg = true;
        for (size_t i = 0; i < a.p.size() && neg; ++i) neg = (a.p[i] == -b.p[i]);
        for (size_t i = 0; i < a.q.size() && neg; ++i) neg = (a.q[i] == -b.q[i]);
        if (!neg) ++bad;
    }
    return bad;
}

BirkhoffResult birkhoff_average(const Target& target, const Box& W, const Decomposition& dec,
                                const NormSpec& norms, double T, long long min_nodes,
                                std::uint64_t grid_seed) {
    norms.validate(dec);
    if (T <= 0) throw std::invalid_argument("birkhoff_average: T > 0 required");
    int k = dec.k(), r = dec.r();
    int dim = k + r - 1;

    // Bounding box of the time polytope: m-side coordinates up to n*T/m_i,
    // n-side coordinates up to T.
    std::vector<double> hi(dim);
    for (int i = 0; i < k; ++i) hi[i] = dec.n() * T / dec.m_parts[i];
    for (int j = 0; j + 1 < r; ++j) hi[k + j] = T;

    double boxVol = 1.0;
    for (double h : hi) boxVol *= h;
    double polyVol = time_polytope_volume(T, dec);
    // Step chosen so the expected in-polytope node count clears min_nodes.
    double step = std::pow(polyVol / (static_cast<double>(min_nodes) * 1.25), 1.0 / dim);

    std::vector<long long> counts(dim);
    for (int i = 0; i < dim; ++i)
        counts[i] = std::max<long long>(1, static_cast<long long>(std::floor(hi[i] / step)));

    Rng rng(grid_seed);
    std::vector<double> offset(dim);
    for (auto& o : offset) o = rng.uniform(0.25, 0.75); // randomized half-cell shift

    Mat base = theta_lattice_basis(target, dec);
    BirkhoffResult res;
    res.polytope_volume = polyVol;

    std::vector<long long> node(dim, 0);
    std::vector<double> t(dim, 0.0);
    double sum = 0.0;
    long long inside = 0;
    std::function<void(int)> rec = [&](int c) {
        if (c == dim) {
            if (!time_polytope_contains(t, T, dec)) return;
            FlowTime ft;
            ft.comps = t;
            Mat flowed = flow_apply(ft, base, dec);
            sum += static_cast<double>(primitive_points_in_box(flowed, W));
            ++inside;
            return;
        }
        for (long long i = 0; i < counts[c]; ++i) {
            t[c] = (static_cast<double>(i) + offset[c]) * (hi[c] / counts[c]);
            rec(c + 1);
        }
    };
    rec(0);

    res.grid_nodes = inside;
    res.average = inside > 0 ? sum / static_cast<double>(inside) : 0.0;
    return res;
}

} // namespace mda
