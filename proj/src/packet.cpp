#include "mda/packet.hpp"

#include <cmath>

namespace mda {

namespace {

// Flattened p + theta q at the target's precision.
std::vector<double> displacement(const Target& target, std::span<const long long> p,
                                 std::span<const long long> q, const Decomposition& dec) {
    std::vector<double> disp(dec.m());
    if (target.precision == Precision::F64) {
        for (int i = 0; i < dec.m(); ++i) {
            double s = static_cast<double>(p[i]);
            for (int j = 0; j < dec.n(); ++j) s += target.at_d(i, j) * static_cast<double>(q[j]);
            disp[i] = s;
        }
    } else {
        for (int i = 0; i < dec.m(); ++i) {
            DD s = dd_from_i64(p[i]);
            for (int j = 0; j < dec.n(); ++j)
                s = dd_add(s, dd_mul(target.at_dd(i, j), dd_from_i64(q[j])));
            disp[i] = s.value();
        }
    }
    return disp;
}

struct BlockData {
    std::vector<double> disp;   // p + theta q
    std::vector<double> errN;   // per m-block norms
    std::vector<double> qN;     // per n-block norms
    bool degenerate = false;
};

BlockData block_data(const Target& target, std::span<const long long> p,
                     std::span<const long long> q, const Decomposition& dec,
                     const NormSpec& norms) {
    BlockData b;
    b.disp = displacement(target, p, q, dec);
    b.errN.resize(dec.k());
    b.qN.resize(dec.r());
    for (int i = 0; i < dec.k(); ++i) {
        std::vector<double> blk(b.disp.begin() + dec.m_offset(i),
                                b.disp.begin() + dec.m_offset(i) + dec.m_parts[i]);
        b.errN[i] = block_norm(blk, norms.m_block(i));
        if (b.errN[i] == 0.0) b.degenerate = true;
    }
    for (int j = 0; j < dec.r(); ++j) {
        std::vector<double> blk(dec.n_parts[j]);
        for (int t = 0; t < dec.n_parts[j]; ++t)
            blk[t] = static_cast<double>(q[dec.n_offset(j) + t]);
        b.qN[j] = block_norm(blk, norms.n_block(dec, j));
        if (b.qN[j] == 0.0) b.degenerate = true;
    }
    return b;
}

} // namespace

std::optional<double> error_term(const Target& target, std::span<const long long> p,
                                 std::span<const long long> q, const Decomposition& dec,
                                 const NormSpec& norms) {
    auto b = block_data(target, p, q, dec, norms);
    if (b.degenerate) return std::nullopt;
    double prod = 1.0;
    for (int i = 0; i < dec.k(); ++i)
        for (int t = 0; t < dec.m_parts[i]; ++t) prod *= b.errN[i];
    for (int j = 0; j < dec.r(); ++j)
        for (int t = 0; t < dec.n_parts[j]; ++t) prod *= b.qN[j];
    return prod;
}

std::optional<std::vector<double>> sphere_projection(const Target& target,
                                                     std::span<const long long> p,
                                                     std::span<const long long> q,
                                                     const Decomposition& dec,
                                                     const NormSpec& norms) {
    auto b = block_data(target, p, q, dec, norms);
    if (b.degenerate) return std::nullopt;
    std::vector<double> out(dec.d());
    for (int i = 0; i < dec.k(); ++i)
        for (int t = 0; t < dec.m_parts[i]; ++t) {
            int c = dec.m_offset(i) + t;
            out[c] = b.disp[c] / b.errN[i];
        }
    for (int j = 0; j < dec.r(); ++j)
        for (int t = 0; t < dec.n_parts[j]; ++t) {
            int c = dec.n_offset(j) + t;
            out[dec.m() + c] = static_cast<double>(q[c]) / b.qN[j];
        }
    return out;
}

std::vector<int> congruence_residues(std::span<const long long> p,
                                     std::span<const long long> q, int modulus) {
    std::vector<int> out;
    out.reserve(p.size() + q.size());
    auto reduce = [modulus](long long v) {
        long long r = v % modulus;
        if (r < 0) r += modulus;
        return static_cast<int>(r);
    };
    for (long long v : p) out.push_back(reduce(v));
    for (long long v : q) out.push_back(reduce(v));
    return out;
}

std::optional<Mat> lattice_lambda_theta(const Target& target, std::span<const long long> p,
                                        std::span<const long long> q,
                                        const Decomposition& dec, const NormSpec& norms) {
    auto b = block_data(target, p, q, dec, norms);
    if (b.degenerate) return std::nullopt;
    int d = dec.d(), m = dec.m();
    // D * [[I_m, theta],[0, I_n]] with D = blockdiag of inverse block norms.
    std::vector<double> scale(d);
    for (int i = 0; i < dec.k(); ++i)
        for (int t = 0; t < dec.m_parts[i]; ++t) scale[dec.m_offset(i) + t] = 1.0 / b.errN[i];
    for (int j = 0; j < dec.r(); ++j)
        for (int t = 0; t < dec.n_parts[j]; ++t)
            scale[m + dec.n_offset(j) + t] = 1.0 / b.qN[j];
    Mat basis(d);
    for (int i = 0; i < d; ++i) basis(i, i) = scale[i];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < dec.n(); ++j) basis(i, m + j) = scale[i] * target.at_d(i, j);
    return basis;
}

Mat axis_normalizer(std::span<const double> x, double gamma, int j) {
    int d = static_cast<int>(x.size());
    if (j < 1 || j > d) throw std::invalid_argument("axis_normalizer: j out of range");
    if (gamma <= 0) throw std::invalid_argument("axis_normalizer: gamma must be positive");
    double xj = x[j - 1];
    if (xj == 0.0)
        throw std::invalid_argument("axis_normalizer: coordinate j of x vanishes");
    double c = std::pow(gamma * std::fabs(xj), 1.0 / (d - 1));
    Mat A(d);
    for (int i = 0; i < d; ++i)
        if (i != j - 1) A(i, i) = c;
    // Column j sends x to sign(x_j) e_j given the other axes scale by c.
    for (int i = 0; i < d; ++i)
        if (i != j - 1) A(i, j - 1) = -c * x[i] / xj;
    A(j - 1, j - 1) = 1.0 / std::fabs(xj);
    return A;
}

std::optional<Mat> shape_lattice_basis(const Target& target, std::span<const long long> p,
                                       std::span<const long long> q, const Params& params,
                                       const Decomposition& dec, const NormSpec& norms) {
    auto proj = sphere_projection(target, p, q, dec, norms);
    auto err = error_term(target, p, q, dec, norms);
    auto lam = lattice_lambda_theta(target, p, q, dec, norms);
    if (!proj || !err || !lam) return std::nullopt;
    int j = params.shape_index;
    if ((*proj)[j - 1] == 0.0) return std::nullopt; // shape-undefined
    Mat A = axis_normalizer(*proj, *err, j);
    return mat_mul(A, *lam);
}

double torus_coordinate(const Mat& basis) {
    if (basis.n != 2) throw std::invalid_argument("torus_coordinate: d = 2 only");
    // Integer coordinates of e2 in this basis.
    auto z = mat_solve(basis, {0.0, 1.0});
    long long z0 = static_cast<long long>(std::llround(z[0]));
    long long z1 = static_cast<long long>(std::llround(z[1]));
    if (std::fabs(z[0] - static_cast<double>(z0)) > 1e-6 ||
        std::fabs(z[1] - static_cast<double>(z1)) > 1e-6)
        throw std::runtime_error("torus_coordinate: basis does not contain e2");
    long long g = gcd_all(std::vector<long long>{z0, z1});
    if (g != 1) throw std::runtime_error("torus_coordinate: e2 is not primitive");
    // Extend z to a unimodular integer matrix [u | z]; then B [u | z] has
    // second column e2 and first column (+-1, w).
    long long x = 1, y = 0, x1 = 0, y1 = 1, a = z1, b = z0;
    while (b != 0) {
        long long t = a / b;
        a -= t * b;
        std::swap(a, b);
        x -= t * x1;
        std::swap(x, x1);
        y -= t * y1;
        std::swap(y, y1);
    }
    // a = +-1 with x * z1 + y * z0 = a, so u = (x, -y) gives
    // u0 * z1 - u1 * z0 = +-1.
    long long u0 = x, u1 = -y;
    double g0 = basis(0, 0) * u0 + basis(0, 1) * u1;
    double g1 = basis(1, 0) * u0 + basis(1, 1) * u1;
    double sign = g0 > 0 ? 1.0 : -1.0;
    double beta = std::fmod(g1 * sign, 1.0);
    if (beta < 0) beta += 1.0;
    if (beta >= 1.0) beta -= 1.0;
    return beta;
}

std::optional<Packet> compute_packet(const Target& target, const Approximate& a,
                                     const Params& params, const Decomposition& dec,
                                     const NormSpec& norms) {
    auto err = error_term(target, a.p, a.q, dec, norms);
    auto proj = sphere_projection(target, a.p, a.q, dec, norms);
    auto shape = shape_lattice_basis(target, a.p, a.q, params, dec, norms);
    if (!err || !proj || !shape) return std::nullopt;
    Packet pk;
    pk.error = *err;
    pk.proj = *proj;
    pk.shape_basis = *shape;
    pk.shape_index = params.shape_index;
    for (int N : params.congruence_moduli)
        pk.residues[N] = congruence_residues(a.p, a.q, N);
    if (dec.d() == 2) pk.torus_beta = torus_coordinate(pk.shape_basis);
    return pk;
}

double torus_coordinate_exact(const BigRat& theta, const BigInt& p, const BigInt& q) {
    if (q == 0) throw std::invalid_argument("torus_coordinate_exact: q = 0");
    // Shape basis for d = 2, j = 2 applied to the generator u completing
    // (p, q) to a unimodular pair: the first column is (sigma, u2/|q|) with
    // sigma = +-1; beta = sigma * u2 / |q| mod 1.
    BigInt g, u2, mu1;
    mpz_gcdext(g.get_mpz_t(), u2.get_mpz_t(), mu1.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    if (g != 1) throw std::invalid_argument("torus_coordinate_exact: (p,q) not primitive");
    // u2 * p + mu1 * q = 1, i.e. u = (u1, u2) with u1 = -mu1 satisfies
    // u2 * p - u1 * q = 1 (determinant convention det[u | (p,q)] = +-1).
    BigInt u1 = -mu1;
    BigInt absq = abs(q);
    // sigma = |q| (u1 + theta u2) - sign(p + theta q) sign(q) |p + theta q| u2,
    // evaluated exactly; it always collapses to +-1.
    BigRat e = BigRat(p) + theta * BigRat(q);
    if (e == 0) throw std::invalid_argument("torus_coordinate_exact: degenerate pair");
    BigRat absE = e >= 0 ? e : BigRat(-e);
    int se = (e >= 0) ? 1 : -1;
    int sq = (q > 0) ? 1 : -1;
    BigRat sigma = BigRat(absq) * (BigRat(u1) + theta * BigRat(u2)) -
                   BigRat(se * sq) * absE * BigRat(u2);
    if (!(sigma == 1 || sigma == -1))
        throw std::runtime_error("torus_coordinate_exact: normalization failed");
    int ssig = (sigma == 1) ? 1 : -1;
    BigRat beta(BigInt(ssig) * u2, absq);
    beta.canonicalize();
    // reduce mod 1 into [0,1)
    BigInt flr;
    mpz_fdiv_q(flr.get_mpz_t(), BigInt(beta.get_num()).get_mpz_t(),
               BigInt(beta.get_den()).get_mpz_t());
    beta -= BigRat(flr);
    return to_double(beta);
}

} // namespace mda
