#include "mda/enumerate.hpp"

#include <cmath>
#include <sstream>

namespace mda {

namespace {

void check_cf_envelope(const Target& target, const Params& params, const CfOptions& opts) {
    if (target.rows != 1 || target.cols != 1)
        throw EnvelopeError("continued-fraction enumeration requires m = n = 1");
    if (target.precision != Precision::Rational)
        throw EnvelopeError("continued-fraction enumeration requires a rational target");
    if (params.epsilon >= 0.5)
        throw EnvelopeError("continued-fraction enumeration requires epsilon < 1/2 "
                            "(all solutions are then convergents)");
    if (params.etas.at(0) >= 0.5)
        throw EnvelopeError("continued-fraction enumeration requires eta < 1/2");
    if (opts.T <= 0) throw std::invalid_argument("cf: T > 0 required");
    const BigRat& th = target.at(0, 0);
    size_t bits = mpz_sizeinbase(BigInt(th.get_den()).get_mpz_t(), 2);
    double need = 4.0 * opts.T / M_LN2;
    if (static_cast<double>(bits) < need) {
        std::ostringstream msg;
        msg << "rational target carries " << bits << " denominator bits; T = " << opts.T
            << " needs at least " << static_cast<long long>(std::ceil(need))
            << " for the expansion to match a generic real up to e^T";
        throw EnvelopeError(msg.str());
    }
}

} // namespace

void enumerate_cf_visit(const Target& target, const Params& params, const CfOptions& opts,
                        const std::function<void(const CfMember&)>& visit, CfStats* stats) {
    params.validate(Decomposition({1}, {1}));
    check_cf_envelope(target, params, opts);

    BigRat theta = target.at(0, 0);
    // Shift into (0,1); a member (p, q) of the shifted value maps back with
    // p -> p - shift*q.
    BigInt shift;
    mpz_fdiv_q(shift.get_mpz_t(), BigInt(theta.get_num()).get_mpz_t(),
               BigInt(theta.get_den()).get_mpz_t());
    theta -= BigRat(shift);

    const BigInt num = theta.get_num();
    const BigInt den = theta.get_den();
    const BigRat epsR = rat_from_double(params.epsilon);
    const BigRat etaR = rat_from_double(params.etas[0]);
    const double logDen = log_abs(den);
    const long long sDiv = (opts.mode == EnumMode::EpsilonStar) ? opts.s : 1;

    CfStats st;

    auto consider = [&](const BigInt& h, const BigInt& k) {
        ++st.convergents;
        BigInt D = num * k - den * h; // theta*k - h = D / den
        if (D == 0) {
            st.terminated = true; // expansion reached the rational exactly
            return;
        }
        BigInt absD = abs(D);
        BigRat delta(absD, den);
        delta.canonicalize();
        // Multiples g of the convergent: error scales by g^2, the error block
        // by g, the height by g; all three bounds are monotone in g.
        for (long long g = sDiv;; g += sDiv) {
            long gl = static_cast<long>(g);
            BigRat gdelta = delta * gl;
            if (gdelta > etaR) break;
            BigRat err = gdelta * BigRat(k * gl);
            if (err > epsR) break;
            double logq = log_abs(k) + std::log(static_cast<double>(g));
            if (logq > opts.T) break;
            CfMember mb;
            mb.q = k * gl;
            mb.p = BigInt(-h - shift * k) * gl;
            mb.log_q = logq;
            mb.log_err = log_abs(BigInt(absD * gl)) - logDen;
            mb.error = to_double(err);
            mb.sign_err = (D > 0) ? 1 : -1;
            mb.multiple = g;
            mb.primitive = (g == 1);
            ++st.members;
            visit(mb);
            if (opts.mode == EnumMode::Epsilon) break; // primitive only
        }
    };

    // Convergent recurrence h_l = a_l h_{l-1} + h_{l-2}, same for k.
    BigInt hPrev = 1, kPrev = 0; // virtual index -1
    BigInt h = 0, k = 1;         // index 0: a_0 = 0
    consider(h, k);
    BigInt A = num, B = den;
    while (A != 0 && !st.terminated) {
        BigInt a, r;
        mpz_fdiv_qr(a.get_mpz_t(), r.get_mpz_t(), B.get_mpz_t(), A.get_mpz_t());
        B = A;
        A = r;
        BigInt hNew = a * h + hPrev;
        BigInt kNew = a * k + kPrev;
        hPrev = h;
        kPrev = k;
        h = hNew;
        k = kNew;
        if (log_abs(k) > opts.T) break;
        consider(h, k);
    }

    if (stats) *stats = st;
}

ApproximateStream enumerate_cf(const Target& target, const Params& params,
                               const CfOptions& opts, CfStats* stats) {
    ApproximateStream out;
    enumerate_cf_visit(target, params, opts, [&](const CfMember& mb) {
        if (!mb.p.fits_slong_p() || !mb.q.fits_slong_p())
            throw EnvelopeError("cf member exceeds the 64-bit coordinate width; "
                                "use the visitor interface for large T");
        long long p = mb.p.get_si();
        long long q = mb.q.get_si();
        Approximate a;
        a.p = {p};
        a.q = {q};
        a.primitive = mb.primitive;
        a.height = static_cast<double>(q);
        Approximate neg;
        neg.p = {-p};
        neg.q = {-q};
        neg.primitive = mb.primitive;
        neg.height = a.height;
        out.members.push_back(std::move(a));
        out.members.push_back(std::move(neg));
    }, stats);
    std::sort(out.members.begin(), out.members.end(), [](const Approximate& a, const Approximate& b) {
        if (a.height != b.height) return a.height < b.height;
        if (a.q != b.q) return a.q < b.q;
        return a.p < b.p;
    });
    return out;
}

} // namespace mda
