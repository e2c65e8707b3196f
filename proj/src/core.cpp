#include "mda/core.hpp"

#include <cmath>

namespace mda {

std::string norm_kind_name(NormKind k) {
    switch (k) {
        case NormKind::Sup: return "sup";
        case NormKind::Euclidean: return "euclidean";
        case NormKind::Taxicab: return "taxicab";
    }
    return "?";
}

NormKind norm_kind_from_name(const std::string& s) {
    if (s == "sup") return NormKind::Sup;
    if (s == "euclidean") return NormKind::Euclidean;
    if (s == "taxicab") return NormKind::Taxicab;
    throw std::invalid_argument("unknown norm kind: " + s);
}

std::string precision_name(Precision p) {
    switch (p) {
        case Precision::F64: return "f64";
        case Precision::DoubleDouble: return "dd";
        case Precision::Rational: return "rational";
    }
    return "?";
}

Precision precision_from_name(const std::string& s) {
    if (s == "f64") return Precision::F64;
    if (s == "dd") return Precision::DoubleDouble;
    if (s == "rational") return Precision::Rational;
    throw std::invalid_argument("unknown precision: " + s);
}

Decomposition::Decomposition(std::vector<int> mp, std::vector<int> np)
    : m_parts(std::move(mp)), n_parts(std::move(np)) {
    if (m_parts.empty() || n_parts.empty())
        throw std::invalid_argument("decomposition needs k >= 1 and r >= 1");
    for (int v : m_parts)
        if (v < 1) throw std::invalid_argument("m_parts entries must be >= 1");
    for (int v : n_parts)
        if (v < 1) throw std::invalid_argument("n_parts entries must be >= 1");
    m_offsets_.reserve(m_parts.size());
    for (int v : m_parts) {
        m_offsets_.push_back(m_);
        m_ += v;
    }
    n_offsets_.reserve(n_parts.size());
    for (int v : n_parts) {
        n_offsets_.push_back(n_);
        n_ += v;
    }
}

void NormSpec::validate(const Decomposition& dec) const {
    if (static_cast<int>(kinds.size()) != dec.k() + dec.r())
        throw std::invalid_argument("NormSpec needs k+r block kinds");
}

void Params::validate(const Decomposition& dec) const {
    if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
    if (static_cast<int>(etas.size()) != dec.k())
        throw std::invalid_argument("need one eta per m-block");
    for (double e : etas)
        if (e <= 0) throw std::invalid_argument("etas must be positive");
    if (shape_index < 1 || shape_index > dec.d())
        throw std::invalid_argument("shape_index must lie in [1, d]");
    for (int n : congruence_moduli)
        if (n < 2) throw std::invalid_argument("congruence moduli must be >= 2");
}

Target Target::from_doubles(int rows, int cols, const std::vector<double>& vals,
                            Precision prec) {
    if (static_cast<int>(vals.size()) != rows * cols)
        throw std::invalid_argument("target entry count mismatch");
    Target t;
    t.rows = rows;
    t.cols = cols;
    t.precision = prec;
    t.entries.reserve(vals.size());
    for (double v : vals) t.entries.push_back(rat_from_double(v));
    return t;
}

Target Target::random(int rows, int cols, std::uint64_t seed, Precision prec) {
    Rng rng(seed);
    std::vector<double> vals(static_cast<size_t>(rows) * cols);
    for (auto& v : vals) v = rng.uniform_open();
    Target t = from_doubles(rows, cols, vals, prec);
    t.seed = seed;
    return t;
}

Target Target::random_rational(std::uint64_t seed, unsigned bits) {
    Rng rng(seed);
    Target t;
    t.rows = 1;
    t.cols = 1;
    t.precision = Precision::Rational;
    t.seed = seed;
    t.seed_bits = bits;
    t.entries.push_back(random_dyadic(rng, bits));
    return t;
}

double Target::at_d(int i, int j) const { return to_double(at(i, j)); }

DD Target::at_dd(int i, int j) const { return to_dd(at(i, j)); }

std::vector<double> Target::to_doubles() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(to_double(e));
    return out;
}

double block_norm(std::span<const double> v, NormKind kind) {
    if (v.empty()) throw std::invalid_argument("block_norm: empty vector");
    switch (kind) {
        case NormKind::Sup: {
            double m = 0.0;
            for (double x : v) m = std::max(m, std::fabs(x));
            return m;
        }
        case NormKind::Euclidean: {
            double s = 0.0;
            for (double x : v) s += x * x;
            return std::sqrt(s);
        }
        case NormKind::Taxicab: {
            double s = 0.0;
            for (double x : v) s += std::fabs(x);
            return s;
        }
    }
    return 0.0;
}

std::vector<std::vector<double>> project_blocks(std::span<const double> x,
                                                const std::vector<int>& parts) {
    int total = 0;
    for (int p : parts) total += p;
    if (static_cast<int>(x.size()) != total)
        throw std::invalid_argument("project_blocks: length mismatch");
    std::vector<std::vector<double>> out;
    out.reserve(parts.size());
    int off = 0;
    for (int p : parts) {
        out.emplace_back(x.begin() + off, x.begin() + off + p);
        off += p;
    }
    return out;
}

long long gcd_all(std::span<const long long> v) {
    long long g = 0;
    for (long long x : v) {
        long long a = x < 0 ? -x : x;
        g = std::gcd(g, a);
        if (g == 1) break;
    }
    return g;
}

double compound_norm(std::span<const double> x, const std::vector<int>& parts,
                     std::span<const NormKind> kinds) {
    double best = 0.0;
    int off = 0;
    for (size_t b = 0; b < parts.size(); ++b) {
        best = std::max(best, block_norm(x.subspan(off, parts[b]), kinds[b]));
        off += parts[b];
    }
    return best;
}

double unit_ball_volume_1(NormKind kind, int l) {
    switch (kind) {
        case NormKind::Sup:
            return std::pow(2.0, l);
        case NormKind::Euclidean:
            return std::pow(M_PI, l / 2.0) / std::tgamma(l / 2.0 + 1.0);
        case NormKind::Taxicab: {
            double f = 1.0;
            for (int i = 1; i <= l; ++i) f *= i;
            return std::pow(2.0, l) / f;
        }
    }
    return 0.0;
}

} // namespace mda
