#include "mda/returns.hpp"

#include <algorithm>
#include <cmath>

#include "mda/stats.hpp"

namespace mda {

bool PacketConstraint::admits(const Packet& pk) const {
    if (error_range && (pk.error < error_range->first || pk.error > error_range->second))
        return false;
    if (proj_signs) {
        for (size_t i = 0; i < proj_signs->size() && i < pk.proj.size(); ++i) {
            int want = (*proj_signs)[i];
            if (want == 0) continue;
            if (want > 0 && !(pk.proj[i] > 0)) return false;
            if (want < 0 && !(pk.proj[i] < 0)) return false;
        }
    }
    if (residue_class) {
        auto it = pk.residues.find(residue_class->first);
        if (it == pk.residues.end() || it->second != residue_class->second) return false;
    }
    if (beta_range) {
        if (!pk.torus_beta) return false;
        if (*pk.torus_beta < beta_range->first || *pk.torus_beta > beta_range->second)
            return false;
    }
    return true;
}

namespace {

void finalize_series(ReturnSeries& s) {
    for (size_t i = 0; i + 1 < s.entries.size(); ++i) {
        s.entries[i].gap = s.entries[i + 1].t - s.entries[i].t;
        if (s.entries[i].gap == 0.0) ++s.tie_warnings;
    }
}

} // namespace

ReturnSeries build_return_series(const ApproximateStream& stream, const Target& target,
                                 const Params& params, const Decomposition& dec,
                                 const NormSpec& norms, const PacketConstraint& constraint) {
    if (dec.k() != 1 || dec.r() != 1)
        throw std::invalid_argument("build_return_series: k = r = 1 required");
    ReturnSeries series;
    series.m = dec.m();
    series.n = dec.n();

    auto ordered = order_stream(stream, Ordering::ByDecreasingErrorBlock, target, params,
                                dec, norms);
    series.total_members = ordered.members.size();

    std::vector<NormKind> mk(norms.kinds.begin(), norms.kinds.begin() + 1);
    for (const auto& a : ordered.members) {
        auto pk = compute_packet(target, a, params, dec, norms);
        if (!pk) {
            ++series.shape_undefined;
            continue;
        }
        if (!constraint.admits(*pk)) continue;
        ReturnEntry e;
        auto err = error_term(target, a.p, a.q, dec, norms);
        // error-block norm = error / q-block norm^n
        std::vector<double> qd(a.q.begin(), a.q.end());
        std::vector<NormKind> nk(norms.kinds.begin() + 1, norms.kinds.end());
        double qn = block_norm(qd, nk[0]);
        double errBlock = std::pow(*err / std::pow(qn, dec.n()), 1.0 / dec.m());
        e.t = -std::log(errBlock);
        e.log_q = std::log(qn);
        double ratio = static_cast<double>(dec.n()) / static_cast<double>(dec.m());
        e.error = std::exp(ratio * e.log_q - e.t);
        e.unit.assign(pk->proj.begin(), pk->proj.begin() + dec.m());
        e.packet = std::move(*pk);
        series.entries.push_back(std::move(e));
    }
    std::stable_sort(series.entries.begin(), series.entries.end(),
                     [](const ReturnEntry& a, const ReturnEntry& b) { return a.t < b.t; });
    finalize_series(series);
    return series;
}

ReturnSeries build_return_series_cf(const Target& target, const Params& params,
                                    const CfOptions& opts, const PacketConstraint& constraint,
                                    CfStats* stats) {
    ReturnSeries series;
    series.m = 1;
    series.n = 1;
    const BigRat& theta = target.at(0, 0);
    enumerate_cf_visit(target, params, opts, [&](const CfMember& mb) {
        // Sign-normalized representative: q > 0 (coordinate j = d = 2).
        ++series.total_members;
        Packet pk;
        pk.error = mb.error;
        pk.proj = {static_cast<double>(mb.sign_err), 1.0};
        pk.shape_index = 2;
        for (int N : params.congruence_moduli) {
            std::vector<int> res(2);
            BigInt t;
            mpz_fdiv_r_ui(t.get_mpz_t(), mb.p.get_mpz_t(), N);
            res[0] = static_cast<int>(t.get_ui());
            mpz_fdiv_r_ui(t.get_mpz_t(), mb.q.get_mpz_t(), N);
            res[1] = static_cast<int>(t.get_ui());
            pk.residues[N] = res;
        }
        if (mb.primitive) pk.torus_beta = torus_coordinate_exact(theta, mb.p, mb.q);
        if (!constraint.admits(pk)) return;
        ReturnEntry e;
        e.t = -mb.log_err;
        e.log_q = mb.log_q;
        e.error = std::exp(e.log_q - e.t);
        e.unit = {static_cast<double>(mb.sign_err)};
        e.packet = std::move(pk);
        series.entries.push_back(std::move(e));
    }, stats);
    std::stable_sort(series.entries.begin(), series.entries.end(),
                     [](const ReturnEntry& a, const ReturnEntry& b) { return a.t < b.t; });
    finalize_series(series);
    return series;
}

ShiftedSequence shifted_sequence(const ReturnSeries& series, int shift) {
    if (shift < 0) throw std::invalid_argument("shifted_sequence: shift >= 0");
    ShiftedSequence out;
    out.shift = shift;
    double ratio = static_cast<double>(series.n) / static_cast<double>(series.m);
    size_t count = series.entries.size();
    if (count <= static_cast<size_t>(shift)) return out;
    out.values.reserve(count - shift);
    for (size_t l = 0; l + shift < count; ++l) {
        const auto& here = series.entries[l];
        const auto& ahead = series.entries[l + shift];
        double scale = std::exp(ratio * ahead.log_q - here.t);
        std::vector<double> w(here.unit.size());
        for (size_t c = 0; c < w.size(); ++c) w[c] = scale * here.unit[c];
        out.values.push_back(std::move(w));
    }
    return out;
}

std::vector<double> ShiftedSequence::scalar() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(v.empty() ? 0.0 : v[0]);
    return out;
}

double empirical_stability(const std::vector<double>& values) {
    if (values.size() < 200)
        throw std::invalid_argument("empirical_stability: need at least 200 points");
    size_t half = values.size() / 2;
    std::vector<double> a(values.begin(), values.begin() + half);
    std::vector<double> b(values.begin() + half, values.end());
    return ks_two_sample(a, b);
}

} // namespace mda
