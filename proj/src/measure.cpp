#include "mda/measure.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mda {

double Prediction::value_at(double T) const {
    return leading_constant * std::pow(T, exponent);
}

long long counting_constant(const std::vector<int>& n_parts, int k) {
    int r = static_cast<int>(n_parts.size());
    if (k < 1 || r < 1) throw std::invalid_argument("counting_constant: k,r >= 1");
    int K = k + r - 1;
    long long total = 0;
    for (unsigned mask = 0; mask < (1u << r); ++mask) {
        long long base = 0;
        int bits = 0;
        for (int j = 0; j < r; ++j)
            if (mask & (1u << j)) {
                base += n_parts[j];
                ++bits;
            }
        long long pw = 1;
        for (int i = 0; i < K; ++i) pw *= base;
        total += ((r - bits) % 2 == 0 ? pw : -pw);
    }
    return total;
}

double time_polytope_volume(double T, const Decomposition& dec) {
    if (T <= 0) throw std::invalid_argument("time_polytope_volume: T > 0 required");
    int K = dec.k() + dec.r() - 1;
    double denom = 1.0;
    for (int v : dec.m_parts) denom *= v;
    for (int j = 0; j + 1 < dec.r(); ++j) denom *= dec.n_parts[j];
    double fact = 1.0;
    for (int i = 2; i <= K; ++i) fact *= i;
    return std::pow(T, K) * static_cast<double>(counting_constant(dec.n_parts, dec.k())) /
           (denom * fact);
}

bool time_polytope_contains(std::span<const double> t, double T, const Decomposition& dec) {
    int k = dec.k(), r = dec.r();
    if (static_cast<int>(t.size()) != k + r - 1)
        throw std::invalid_argument("time_polytope_contains: dimension mismatch");
    double bal = 0.0;
    for (int i = 0; i < k; ++i) {
        if (t[i] < 0) return false;
        bal += dec.m_parts[i] * t[i];
    }
    for (int j = 0; j + 1 < r; ++j) {
        double v = t[k + j];
        if (v < 0 || v > T) return false;
        bal -= dec.n_parts[j] * v;
    }
    return bal >= 0 && bal <= dec.n_parts[r - 1] * T;
}

double unit_ball_volume(const Decomposition& dec, const NormSpec& norms) {
    norms.validate(dec);
    double v = 1.0;
    for (int i = 0; i < dec.k(); ++i)
        v *= unit_ball_volume_1(norms.kinds[i], dec.m_parts[i]);
    for (int j = 0; j < dec.r(); ++j)
        v *= unit_ball_volume_1(norms.kinds[dec.k() + j], dec.n_parts[j]);
    return v;
}

double riemann_zeta(int d) {
    if (d < 2) throw std::invalid_argument("riemann_zeta: d >= 2 required");
    // Direct series to N, then Euler-Maclaurin correction terms. With N = 64
    // the B_2 and B_4 terms already leave an error below 1e-14 for d >= 2.
    const int N = 64;
    double s = 0.0;
    for (int n = 1; n < N; ++n) s += std::pow(static_cast<double>(n), -d);
    double Nd = std::pow(static_cast<double>(N), -d);
    s += Nd * N / (d - 1.0);                         // integral tail
    s += 0.5 * Nd;                                   // boundary term
    double t1 = d / (12.0 * N) * Nd;                 // B_2 term
    double t2 = d * (d + 1) * (d + 2) / (720.0 * N * N * N) * Nd; // B_4 term
    return s + t1 - t2;
}

long long primitive_residue_count(long long t, int d) {
    if (t < 2 || d < 1) throw std::invalid_argument("primitive_residue_count: t >= 2, d >= 1");
    long long result = 1;
    long long rem = t;
    for (long long p = 2; p * p <= rem; ++p) {
        if (rem % p) continue;
        int s = 0;
        while (rem % p == 0) {
            rem /= p;
            ++s;
        }
        long long pd = 1;
        for (int i = 0; i < d * s; ++i) pd *= p;
        long long pdm = 1;
        for (int i = 0; i < d * (s - 1); ++i) pdm *= p;
        result *= (pd - pdm);
    }
    if (rem > 1) {
        long long pd = 1;
        for (int i = 0; i < d; ++i) pd *= rem;
        result *= (pd - 1);
    }
    return result;
}

Prediction predicted_count(const Params& params, const Decomposition& dec,
                           const NormSpec& norms, EnumMode mode, long long s) {
    params.validate(dec);
    if (s < 1) throw std::invalid_argument("predicted_count: s >= 1");
    int K = dec.k() + dec.r() - 1;
    double fact = 1.0;
    for (int i = 2; i <= K; ++i) fact *= i;
    double c = static_cast<double>(counting_constant(dec.n_parts, dec.k()));
    double vol = unit_ball_volume(dec, norms);
    Prediction pred;
    pred.exponent = K;
    std::ostringstream desc;
    if (mode == EnumMode::EpsilonStar) {
        pred.leading_constant =
            params.epsilon / std::pow(static_cast<double>(s), dec.d()) * vol * c / fact;
        desc << "divisible-pair count, s=" << s;
    } else {
        pred.leading_constant = params.epsilon * vol * c / (fact * riemann_zeta(dec.d()));
        desc << "primitive-pair count";
    }
    desc << ", T^" << K << " law";
    pred.description = desc.str();
    return pred;
}

std::string MarginalSpec::describe() const {
    std::ostringstream s;
    switch (kind) {
        case MarginalKind::SphereBlock:
            s << "cone measure on " << norm_kind_name(norm) << " sphere, dim " << dim;
            break;
        case MarginalKind::ErrorTerm:
            s << "uniform(0," << epsilon << ")";
            break;
        case MarginalKind::Congruence:
            s << "uniform over primitive classes mod " << modulus << " in dim " << d;
            break;
        case MarginalKind::TorusShape:
            s << "uniform[0,1) torus coordinate";
            break;
    }
    return s.str();
}

MarginalSpec marginal_error(const Params& params) {
    MarginalSpec s;
    s.kind = MarginalKind::ErrorTerm;
    s.epsilon = params.epsilon;
    return s;
}

MarginalSpec marginal_sphere_block(int dim, NormKind norm) {
    MarginalSpec s;
    s.kind = MarginalKind::SphereBlock;
    s.dim = dim;
    s.norm = norm;
    return s;
}

MarginalSpec marginal_congruence(int modulus, int d) {
    MarginalSpec s;
    s.kind = MarginalKind::Congruence;
    s.modulus = modulus;
    s.d = d;
    return s;
}

MarginalSpec marginal_torus() {
    MarginalSpec s;
    s.kind = MarginalKind::TorusShape;
    return s;
}

std::vector<double> sample_marginal(const MarginalSpec& spec, Rng& rng) {
    switch (spec.kind) {
        case MarginalKind::ErrorTerm:
            return {rng.uniform(0.0, spec.epsilon)};
        case MarginalKind::TorusShape:
            return {rng.uniform()};
        case MarginalKind::SphereBlock: {
            if (spec.dim == 1) return {rng.sign() > 0 ? 1.0 : -1.0};
            // Cone measure: uniform point of the unit ball, projected radially.
            std::vector<double> x(spec.dim);
            while (true) {
                for (auto& c : x) c = rng.uniform(-1.0, 1.0);
                double nrm = block_norm(x, spec.norm);
                if (nrm <= 1.0 && nrm > 1e-12) {
                    for (auto& c : x) c /= nrm;
                    return x;
                }
            }
        }
        case MarginalKind::Congruence: {
            std::vector<long long> v(spec.d);
            while (true) {
                long long g = 0;
                for (auto& c : v) {
                    c = static_cast<long long>(rng.below(spec.modulus));
                    g = std::gcd(g, c);
                }
                if (std::gcd(g, static_cast<long long>(spec.modulus)) == 1) break;
            }
            return std::vector<double>(v.begin(), v.end());
        }
    }
    return {};
}

} // namespace mda
