#include "mda/enumerate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <sstream>
#include <thread>

namespace mda {

namespace {

// ---- evaluation policies ---------------------------------------------------

struct EvalF64 {
    using V = double;
    std::vector<double> th; // row-major m x n
    int m, n;

    explicit EvalF64(const Target& t) : th(t.to_doubles()), m(t.rows), n(t.cols) {}

    void theta_q(const long long* q, V* x) const {
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            const double* row = th.data() + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) s += row[j] * static_cast<double>(q[j]);
            x[i] = s;
        }
    }
    static double collapse(V v) { return v; }
    static double displaced(V x, long long p) { return static_cast<double>(p) + x; }
};

struct EvalDD {
    using V = DD;
    std::vector<DD> th;
    int m, n;

    explicit EvalDD(const Target& t) : m(t.rows), n(t.cols) {
        th.reserve(t.entries.size());
        for (const auto& e : t.entries) th.push_back(to_dd(e));
    }
    void theta_q(const long long* q, V* x) const {
        for (int i = 0; i < m; ++i) {
            DD s(0.0);
            const DD* row = th.data() + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) s = dd_add(s, dd_mul(row[j], dd_from_i64(q[j])));
            x[i] = s;
        }
    }
    static double collapse(V v) { return v.value(); }
    static double displaced(V x, long long p) { return dd_add(x, dd_from_i64(p)).value(); }
};

// ---- envelope --------------------------------------------------------------

double max_abs_theta(const Target& t) {
    double m = 0.0;
    for (const auto& e : t.entries) m = std::max(m, std::fabs(to_double(e)));
    return m;
}

void check_direct_envelope(const Target& target, double T, const Decomposition& dec,
                           const Params& params) {
    if (target.precision == Precision::F64 && T > 18.0) {
        std::ostringstream msg;
        msg << "precision f64 is validated for T <= 18, requested T = " << T
            << "; use precision dd (T <= 45) or rational";
        throw EnvelopeError(msg.str());
    }
    if (T > 45.0) {
        std::ostringstream msg;
        msg << "direct enumeration is validated for T <= 45 at double-double precision, "
               "requested T = " << T;
        throw EnvelopeError(msg.str());
    }
    double H = std::exp(T);
    double maxEta = 0.0;
    for (double e : params.etas) maxEta = std::max(maxEta, e);
    double pBound = max_abs_theta(target) * dec.n() * H + maxEta + 2.0;
    if (H > 4.6e18 || pBound > 4.6e18) {
        std::ostringstream msg;
        msg << "T = " << T << " would overflow the 64-bit coordinate width "
            << "(|q| <= e^T = " << H << ", |p| <= " << pBound << ")";
        throw EnvelopeError(msg.str());
    }
}

// ---- generic scan ----------------------------------------------------------

// visit(p, q, norms, gcd): called for every pair with (p,q) != 0 satisfying
// the eta conditions and the weighted product bound (max{1,.} convention).
template <class EV, class Visit>
struct GenericScan {
    const EV& ev;
    const Decomposition& dec;
    const NormSpec& norms;
    double eps;
    const std::vector<double>& etas;
    double H;
    Visit& visit;

    std::vector<long long> q, p;
    std::vector<typename EV::V> x;
    std::vector<double> disp;      // p + theta q, flattened
    std::vector<double> errBlocks; // per m-block norms
    std::vector<double> qBlocks;   // per n-block norms

    GenericScan(const EV& ev_, const Decomposition& d, const NormSpec& ns, double eps_,
                const std::vector<double>& etas_, double H_, Visit& v)
        : ev(ev_), dec(d), norms(ns), eps(eps_), etas(etas_), H(H_), visit(v),
          q(d.n(), 0), p(d.m(), 0), x(d.m()), disp(d.m(), 0.0),
          errBlocks(d.k(), 0.0), qBlocks(d.r(), 0.0) {}

    void run() { scan_q(0); }

    void scan_q(int coord) {
        if (coord == dec.n()) {
            handle_q();
            return;
        }
        long long B = static_cast<long long>(std::floor(H));
        for (long long v = -B; v <= B; ++v) {
            q[coord] = v;
            // prune when a q-block is complete and too long
            int j = block_of_n(coord);
            if (coord == dec.n_offset(j) + dec.n_parts[j] - 1) {
                std::vector<double> qd(q.begin() + dec.n_offset(j),
                                       q.begin() + dec.n_offset(j) + dec.n_parts[j]);
                if (block_norm(qd, norms.n_block(dec, j)) > H) continue;
            }
            scan_q(coord + 1);
        }
    }

    int block_of_n(int coord) const {
        for (int j = dec.r() - 1; j >= 0; --j)
            if (coord >= dec.n_offset(j)) return j;
        return 0;
    }

    void handle_q() {
        ev.theta_q(q.data(), x.data());
        for (int j = 0; j < dec.r(); ++j) {
            std::vector<double> qd(q.begin() + dec.n_offset(j),
                                   q.begin() + dec.n_offset(j) + dec.n_parts[j]);
            qBlocks[j] = block_norm(qd, norms.n_block(dec, j));
        }
        scan_p(0);
    }

    void scan_p(int block) {
        if (block == dec.k()) {
            finish();
            return;
        }
        scan_p_coord(block, dec.m_offset(block));
    }

    void scan_p_coord(int block, int coord) {
        int end = dec.m_offset(block) + dec.m_parts[block];
        if (coord == end) {
            // block complete: non-sup norms need the real block check
            std::vector<double> blk(disp.begin() + dec.m_offset(block), disp.begin() + end);
            double nb = block_norm(blk, norms.m_block(block));
            if (nb > etas[block]) return;
            errBlocks[block] = nb;
            scan_p(block + 1);
            return;
        }
        double center = -EV::collapse(x[coord]);
        double eta = etas[block];
        long long lo = static_cast<long long>(std::ceil(center - eta));
        long long hi = static_cast<long long>(std::floor(center + eta));
        for (long long v = lo; v <= hi; ++v) {
            p[coord] = v;
            disp[coord] = EV::displaced(x[coord], v);
            if (std::fabs(disp[coord]) > eta) continue;
            scan_p_coord(block, coord + 1);
        }
    }

    void finish() {
        bool allZero = true;
        for (long long v : p)
            if (v) { allZero = false; break; }
        if (allZero)
            for (long long v : q)
                if (v) { allZero = false; break; }
        if (allZero) return;

        BlockNorms bn;
        bn.err_blocks = errBlocks;
        bn.q_blocks = qBlocks;
        double prod = 1.0;
        for (int i = 0; i < dec.k(); ++i) {
            if (errBlocks[i] == 0.0) bn.degenerate = true;
            for (int t = 0; t < dec.m_parts[i]; ++t) prod *= errBlocks[i];
        }
        for (int j = 0; j < dec.r(); ++j) {
            if (qBlocks[j] == 0.0) {
                bn.degenerate = true;
                continue; // max{1, 0} = 1
            }
            for (int t = 0; t < dec.n_parts[j]; ++t) prod *= qBlocks[j];
        }
        bn.error = prod;
        if (prod > eps) return;

        std::vector<long long> all(p);
        all.insert(all.end(), q.begin(), q.end());
        long long g = gcd_all(all);
        visit(std::span<const long long>(p), std::span<const long long>(q), bn, g);
    }
};

// ---- fast kernel: n = 1, all m-parts = 1, all etas < 1/2 --------------------

bool kernel_applicable(const Decomposition& dec, const Params& params) {
    if (dec.n() != 1) return false;
    for (int v : dec.m_parts)
        if (v != 1) return false;
    for (double e : params.etas)
        if (e >= 0.5) return false;
    return true;
}

// visit(p (k entries), q scalar, error, gcd, degenerate); q > 0 only, caller
// supplies the +/- closure.
template <class EV, class Visit>
void kernel_scan(const EV& ev, int k, double eps, const double* etas, long long qLo,
                 long long qHi, Visit&& visit) {
    std::vector<long long> p(k);
    std::vector<long long> all(k + 1);
    std::vector<typename EV::V> x(k);
    long long qv[1];
    for (long long qq = qLo; qq <= qHi; ++qq) {
        qv[0] = qq;
        ev.theta_q(qv, x.data());
        double prod = static_cast<double>(qq);
        bool ok = true, degenerate = false;
        for (int i = 0; i < k; ++i) {
            double c = -EV::collapse(x[i]);
            long long pi = static_cast<long long>(std::floor(c + 0.5));
            double a = std::fabs(EV::displaced(x[i], pi));
            if (a > etas[i]) {
                ok = false;
                break;
            }
            p[i] = pi;
            if (a == 0.0) degenerate = true;
            prod *= a;
        }
        if (!ok || prod > eps) continue;
        for (int i = 0; i < k; ++i) all[i] = p[i];
        all[k] = qq;
        long long g = gcd_all(all);
        visit(p, qq, prod, g, degenerate);
    }
}

struct ChunkRange {
    long long lo, hi;
};

std::vector<ChunkRange> make_chunks(long long Q, long long chunk, int workers) {
    if (chunk <= 0) {
        long long target = std::max<long long>(1, Q / std::max(1, workers * 8));
        chunk = std::min<long long>(std::max<long long>(target, 1 << 16), Q > 0 ? Q : 1);
    }
    std::vector<ChunkRange> out;
    for (long long lo = 1; lo <= Q; lo += chunk)
        out.push_back({lo, std::min(Q, lo + chunk - 1)});
    return out;
}

bool canonical_less(const Approximate& a, const Approximate& b) {
    if (a.height != b.height) return a.height < b.height;
    if (a.q != b.q) return a.q < b.q;
    return a.p < b.p;
}

void canonical_sort(std::vector<Approximate>& v) {
    std::sort(v.begin(), v.end(), canonical_less);
}

// Kernel-path enumeration into a stream (q > 0 scanned, both signs emitted).
template <class EV>
void kernel_collect(const EV& ev, const Decomposition& dec, const Params& params,
                    double eps, double H, EnumMode mode, const EnumConfig& config,
                    ApproximateStream& out) {
    int k = dec.k();
    long long Q = static_cast<long long>(std::floor(H));
    auto chunks = make_chunks(Q, config.chunk, config.workers);
    std::vector<ApproximateStream> parts(chunks.size());

    auto work = [&](size_t ci) {
        auto& local = parts[ci];
        kernel_scan(ev, k, eps, params.etas.data(), chunks[ci].lo, chunks[ci].hi,
                    [&](const std::vector<long long>& p, long long q, double err, long long g,
                        bool degenerate) {
                        Approximate a;
                        a.p = p;
                        a.q = {q};
                        a.primitive = (g == 1);
                        a.height = static_cast<double>(q);
                        Approximate neg;
                        neg.p.resize(p.size());
                        for (size_t i = 0; i < p.size(); ++i) neg.p[i] = -p[i];
                        neg.q = {-q};
                        neg.primitive = a.primitive;
                        neg.height = a.height;
                        (void)err;
                        if (degenerate) {
                            local.degenerate.push_back(a);
                            local.degenerate.push_back(std::move(neg));
                        } else if (mode == EnumMode::Epsilon ? g == 1 : true) {
                            local.members.push_back(a);
                            local.members.push_back(std::move(neg));
                        }
                    });
    };

    int workers = std::max(1, config.workers);
    if (workers == 1 || chunks.size() <= 1) {
        for (size_t i = 0; i < chunks.size(); ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < chunks.size(); i = next.fetch_add(1))
                    work(i);
            });
        for (auto& t : pool) t.join();
    }

    for (auto& part : parts) {
        out.members.insert(out.members.end(), part.members.begin(), part.members.end());
        out.degenerate.insert(out.degenerate.end(), part.degenerate.begin(),
                              part.degenerate.end());
    }
}

template <class EV>
void generic_collect(const EV& ev, const Decomposition& dec, const NormSpec& norms,
                     double eps, const std::vector<double>& etas, double H, EnumMode mode,
                     ApproximateStream& out) {
    auto visit = [&](std::span<const long long> p, std::span<const long long> q,
                     const BlockNorms& bn, long long g) {
        Approximate a;
        a.p.assign(p.begin(), p.end());
        a.q.assign(q.begin(), q.end());
        a.primitive = (g == 1);
        std::vector<double> qd(q.begin(), q.end());
        std::vector<NormKind> nk(norms.kinds.begin() + dec.k(), norms.kinds.end());
        a.height = compound_norm(qd, dec.n_parts, nk);
        if (bn.degenerate)
            out.degenerate.push_back(std::move(a));
        else if (mode == EnumMode::Epsilon ? g == 1 : true)
            out.members.push_back(std::move(a));
    };
    GenericScan<EV, decltype(visit)> scan(ev, dec, norms, eps, etas, H, visit);
    scan.run();
}

} // namespace

bool is_epsilon_approximate(const Target& target, std::span<const long long> p,
                            std::span<const long long> q, const Params& params,
                            const Decomposition& dec, const NormSpec& norms,
                            BlockNorms* out) {
    params.validate(dec);
    norms.validate(dec);
    if (static_cast<int>(p.size()) != dec.m() || static_cast<int>(q.size()) != dec.n())
        throw std::invalid_argument("is_epsilon_approximate: dimension mismatch");

    std::vector<double> disp(dec.m());
    if (target.precision == Precision::F64) {
        EvalF64 ev(target);
        std::vector<double> x(dec.m());
        ev.theta_q(q.data(), x.data());
        for (int i = 0; i < dec.m(); ++i) disp[i] = EvalF64::displaced(x[i], p[i]);
    } else {
        EvalDD ev(target);
        std::vector<DD> x(dec.m());
        ev.theta_q(q.data(), x.data());
        for (int i = 0; i < dec.m(); ++i) disp[i] = EvalDD::displaced(x[i], p[i]);
    }

    BlockNorms bn;
    bn.err_blocks.resize(dec.k());
    bn.q_blocks.resize(dec.r());
    bool etaOk = true;
    double prod = 1.0;
    for (int i = 0; i < dec.k(); ++i) {
        std::vector<double> blk(disp.begin() + dec.m_offset(i),
                                disp.begin() + dec.m_offset(i) + dec.m_parts[i]);
        double a = block_norm(blk, norms.m_block(i));
        bn.err_blocks[i] = a;
        if (a > params.etas[i]) etaOk = false;
        if (a == 0.0) bn.degenerate = true;
        for (int t = 0; t < dec.m_parts[i]; ++t) prod *= a;
    }
    for (int j = 0; j < dec.r(); ++j) {
        std::vector<double> qd(q.begin() + dec.n_offset(j),
                               q.begin() + dec.n_offset(j) + dec.n_parts[j]);
        double b = block_norm(qd, norms.n_block(dec, j));
        bn.q_blocks[j] = b;
        if (b == 0.0) {
            bn.degenerate = true;
            continue;
        }
        for (int t = 0; t < dec.n_parts[j]; ++t) prod *= b;
    }
    bn.error = prod;
    if (out) *out = bn;
    if (!etaOk || prod > params.epsilon) return false;

    std::vector<long long> all(p.begin(), p.end());
    all.insert(all.end(), q.begin(), q.end());
    return gcd_all(all) == 1;
}

ApproximateStream enumerate_direct(const Target& target, const Params& params,
                                   const Decomposition& dec, const NormSpec& norms,
                                   const EnumConfig& config) {
    params.validate(dec);
    norms.validate(dec);
    if (config.T <= 0) throw std::invalid_argument("enumerate_direct: T > 0 required");
    if (config.s < 1) throw std::invalid_argument("enumerate_direct: s >= 1 required");
    check_direct_envelope(target, config.T, dec, params);

    long long s = (config.mode == EnumMode::EpsilonStar) ? config.s : 1;
    // Members divisible by s are s times the members of the rescaled problem
    // (epsilon / s^d, eta / s, height e^T / s).
    double eps = params.epsilon / std::pow(static_cast<double>(s), dec.d());
    std::vector<double> etas = params.etas;
    for (auto& e : etas) e /= static_cast<double>(s);
    double H = std::exp(config.T) / static_cast<double>(s);

    Params scaled = params;
    scaled.epsilon = eps;
    scaled.etas = etas;

    ApproximateStream raw;
    bool kernel = kernel_applicable(dec, scaled);
    if (target.precision == Precision::F64) {
        EvalF64 ev(target);
        if (kernel)
            kernel_collect(ev, dec, scaled, eps, H, config.mode, config, raw);
        else
            generic_collect(ev, dec, norms, eps, etas, H, config.mode, raw);
    } else {
        EvalDD ev(target);
        if (kernel)
            kernel_collect(ev, dec, scaled, eps, H, config.mode, config, raw);
        else
            generic_collect(ev, dec, norms, eps, etas, H, config.mode, raw);
    }

    if (s > 1) {
        for (auto* vecp : {&raw.members, &raw.degenerate})
            for (auto& a : *vecp) {
                for (auto& v : a.p) v *= s;
                for (auto& v : a.q) v *= s;
                a.primitive = false;
                a.height *= static_cast<double>(s);
            }
    }
    canonical_sort(raw.members);
    canonical_sort(raw.degenerate);
    return raw;
}

CountResult count_direct(const Target& target, const Params& params,
                         const Decomposition& dec, const NormSpec& norms,
                         const std::vector<double>& T_list, EnumMode mode, long long s,
                         int workers) {
    params.validate(dec);
    norms.validate(dec);
    if (T_list.empty()) throw std::invalid_argument("count_direct: empty T list");
    double Tmax = *std::max_element(T_list.begin(), T_list.end());
    check_direct_envelope(target, Tmax, dec, params);
    if (mode == EnumMode::Epsilon) s = 1;
    if (!kernel_applicable(dec, params))
        throw std::invalid_argument("count_direct requires n = 1, unit m-blocks, etas < 1/2");

    double eps = params.epsilon / std::pow(static_cast<double>(s), dec.d());
    std::vector<double> etas = params.etas;
    for (auto& e : etas) e /= static_cast<double>(s);

    // Height thresholds for the rescaled scan: q' <= e^{T_i} / s.
    std::vector<long long> qCut(T_list.size());
    for (size_t i = 0; i < T_list.size(); ++i)
        qCut[i] = static_cast<long long>(std::floor(std::exp(T_list[i]) / s));
    long long Q = *std::max_element(qCut.begin(), qCut.end());

    int k = dec.k();
    auto chunks = make_chunks(Q, 0, workers);
    std::vector<CountResult> parts(chunks.size());

    EvalF64 evF(target);
    std::optional<EvalDD> evD;
    if (target.precision != Precision::F64) evD.emplace(target);

    auto work = [&](size_t ci) {
        CountResult local;
        local.total.assign(T_list.size(), 0);
        local.primitive.assign(T_list.size(), 0);
        auto visit = [&](const std::vector<long long>&, long long q, double, long long g,
                         bool degenerate) {
            if (degenerate) return;
            for (size_t i = 0; i < qCut.size(); ++i)
                if (q <= qCut[i]) {
                    local.total[i] += 2; // both signs
                    if (g == 1) local.primitive[i] += 2;
                }
        };
        if (evD)
            kernel_scan(*evD, k, eps, etas.data(), chunks[ci].lo, chunks[ci].hi, visit);
        else
            kernel_scan(evF, k, eps, etas.data(), chunks[ci].lo, chunks[ci].hi, visit);
        parts[ci] = std::move(local);
    };

    int nw = std::max(1, workers);
    if (nw == 1 || chunks.size() <= 1) {
        for (size_t i = 0; i < chunks.size(); ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int w = 0; w < nw; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < chunks.size(); i = next.fetch_add(1))
                    work(i);
            });
        for (auto& t : pool) t.join();
    }

    CountResult out;
    out.total.assign(T_list.size(), 0);
    out.primitive.assign(T_list.size(), 0);
    for (const auto& part : parts)
        for (size_t i = 0; i < T_list.size(); ++i) {
            out.total[i] += part.total[i];
            out.primitive[i] += part.primitive[i];
        }
    return out;
}

std::optional<double> error_term_d(const Target& target, std::span<const long long> p,
                                   std::span<const long long> q, const Decomposition& dec,
                                   const NormSpec& norms) {
    std::vector<double> disp(dec.m());
    if (target.precision == Precision::F64) {
        EvalF64 ev(target);
        std::vector<double> x(dec.m());
        ev.theta_q(q.data(), x.data());
        for (int i = 0; i < dec.m(); ++i) disp[i] = EvalF64::displaced(x[i], p[i]);
    } else {
        EvalDD ev(target);
        std::vector<DD> x(dec.m());
        ev.theta_q(q.data(), x.data());
        for (int i = 0; i < dec.m(); ++i) disp[i] = EvalDD::displaced(x[i], p[i]);
    }
    double prod = 1.0;
    for (int i = 0; i < dec.k(); ++i) {
        std::vector<double> blk(disp.begin() + dec.m_offset(i),
                                disp.begin() + dec.m_offset(i) + dec.m_parts[i]);
        double a = block_norm(blk, norms.m_block(i));
        if (a == 0.0) return std::nullopt;
        for (int t = 0; t < dec.m_parts[i]; ++t) prod *= a;
    }
    for (int j = 0; j < dec.r(); ++j) {
        std::vector<double> qd(q.begin() + dec.n_offset(j),
                               q.begin() + dec.n_offset(j) + dec.n_parts[j]);
        double b = block_norm(qd, norms.n_block(dec, j));
        if (b == 0.0) return std::nullopt;
        for (int t = 0; t < dec.n_parts[j]; ++t) prod *= b;
    }
    return prod;
}

ApproximateStream order_stream(const ApproximateStream& stream, Ordering ordering,
                               const Target& target, const Params& params,
                               const Decomposition& dec, const NormSpec& norms) {
    ApproximateStream out = stream;
    if (ordering == Ordering::ByIncreasingQNorm) {
        canonical_sort(out.members);
        return out;
    }

    // Decreasing error-block norm; keep the +/- representative whose
    // shape_index coordinate of (p + theta q, q) is positive.
    int j = params.shape_index; // 1-based in [1, d]
    struct Keyed {
        double key;
        Approximate a;
    };
    std::vector<Keyed> keep;
    std::vector<NormKind> mk(norms.kinds.begin(), norms.kinds.begin() + dec.k());
    for (const auto& a : out.members) {
        std::vector<double> disp(dec.m());
        if (target.precision == Precision::F64) {
            EvalF64 ev(target);
            std::vector<double> x(dec.m());
            ev.theta_q(a.q.data(), x.data());
            for (int i = 0; i < dec.m(); ++i) disp[i] = EvalF64::displaced(x[i], a.p[i]);
        } else {
            EvalDD ev(target);
            std::vector<DD> x(dec.m());
            ev.theta_q(a.q.data(), x.data());
            for (int i = 0; i < dec.m(); ++i) disp[i] = EvalDD::displaced(x[i], a.p[i]);
        }
        double coordJ = (j <= dec.m()) ? disp[j - 1] : static_cast<double>(a.q[j - 1 - dec.m()]);
        if (!(coordJ > 0.0)) continue; // negative twin or shape-undefined
        double key = compound_norm(disp, dec.m_parts, mk);
        keep.push_back({key, a});
    }
    std::stable_sort(keep.begin(), keep.end(), [](const Keyed& x, const Keyed& y) {
        if (x.key != y.key) return x.key > y.key;
        if (x.a.q != y.a.q) return x.a.q < y.a.q;
        return x.a.p < y.a.p;
    });
    out.members.clear();
    for (auto& kv : keep) out.members.push_back(std::move(kv.a));
    return out;
}

} // namespace mda
