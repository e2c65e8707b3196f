#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mda/core.hpp"
#include "mda/measure.hpp"

namespace mda {

// Thrown when a (precision, T) request leaves the validated range of the
// selected arithmetic.
struct EnvelopeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Ordering { ByIncreasingQNorm, ByDecreasingErrorBlock };

struct EnumConfig {
    double T = 4.0;
    EnumMode mode = EnumMode::Epsilon;
    long long s = 1;                    // divisor filter, EpsilonStar mode only
    Ordering ordering = Ordering::ByIncreasingQNorm;
    long long chunk = 0;                // q-range chunk size; 0 = auto
    int workers = 1;
};

struct ApproximateStream {
    std::vector<Approximate> members;    // canonically sorted, no duplicates
    std::vector<Approximate> degenerate; // some q-block or (p + theta q)-block is 0
};

// Block norms of one candidate pair, the precursor of its packet.
struct BlockNorms {
    std::vector<double> err_blocks;  // |rho_i(p + theta q)| per m-block
    std::vector<double> q_blocks;    // |rho'_j(q)| per n-block
    double error = 0.0;              // product with the max{1,.} convention
    bool degenerate = false;
};

// Membership test for one pair under the primitive-mode definition:
// every m-block of p + theta q within its eta, weighted product <= epsilon,
// gcd over all d coordinates equal to 1.
bool is_epsilon_approximate(const Target& target, std::span<const long long> p,
                            std::span<const long long> q, const Params& params,
                            const Decomposition& dec, const NormSpec& norms,
                            BlockNorms* out = nullptr);

// All qualifying pairs with compound q-norm <= e^T, by direct scan over q
// with a bounded candidate window for p. Deterministic output independent of
// worker count.
ApproximateStream enumerate_direct(const Target& target, const Params& params,
                                   const Decomposition& dec, const NormSpec& norms,
                                   const EnumConfig& config);

// Counting-only variant: one scan, counts accumulated at each height
// threshold e^{T_i}. Returns, per threshold, the number of qualifying pairs
// (mode semantics as in enumerate_direct) and the number of primitive ones.
struct CountResult {
    std::vector<long long> total;
    std::vector<long long> primitive;
};
CountResult count_direct(const Target& target, const Params& params,
                         const Decomposition& dec, const NormSpec& norms,
                         const std::vector<double>& T_list, EnumMode mode,
                         long long s, int workers = 1);

// Re-sorts a stream. ByDecreasingErrorBlock keeps one representative per
// +/- pair, the one whose shape_index coordinate of (p + theta q, q) is
// positive; pairs whose coordinate vanishes are dropped (shape-undefined).
ApproximateStream order_stream(const ApproximateStream& stream, Ordering ordering,
                               const Target& target, const Params& params,
                               const Decomposition& dec, const NormSpec& norms);

// ---- Continued-fraction fast path (m = n = 1) ------------------------------

struct CfOptions {
    double T = 16.0;
    EnumMode mode = EnumMode::Epsilon;
    long long s = 1;
};

// One canonical member (q > 0); the negative is implied.
struct CfMember {
    BigInt p, q;
    double log_q = 0.0;       // log q
    double log_err = 0.0;     // log |p + theta q|
    double error = 0.0;       // exact q|p + theta q| rounded once
    int sign_err = 0;         // sign of p + theta q
    bool primitive = true;
    long long multiple = 1;   // gcd of the pair
};

struct CfStats {
    long long convergents = 0;
    long long members = 0;      // canonical members emitted
    bool terminated = false;    // expansion hit the rational target exactly
};

// Walks the convergents of the (rational) target and emits every qualifying
// member; valid for epsilon < 1/2 and eta < 1/2, where any solution of
// q|q theta - p| <= epsilon is a convergent. The rational representation must
// carry at least 4*T/ln2 denominator bits so its expansion matches a generic
// real up to height e^T.
void enumerate_cf_visit(const Target& target, const Params& params,
                        const CfOptions& opts,
                        const std::function<void(const CfMember&)>& visit,
                        CfStats* stats = nullptr);

// Materialized variant with the +/- closure, canonically sorted. Requires
// all coordinates to fit in 64 bits.
ApproximateStream enumerate_cf(const Target& target, const Params& params,
                               const CfOptions& opts, CfStats* stats = nullptr);

// Error term of one pair evaluated in double precision (plain product, no
// max convention); nullopt when some block vanishes.
std::optional<double> error_term_d(const Target& target, std::span<const long long> p,
                                   std::span<const long long> q, const Decomposition& dec,
                                   const NormSpec& norms);

} // namespace mda
