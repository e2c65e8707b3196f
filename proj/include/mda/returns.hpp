#pragma once

#include <optional>
#include <vector>

#include "mda/core.hpp"
#include "mda/enumerate.hpp"
#include "mda/packet.hpp"

namespace mda {

// Constraint over packet fields: the product of an error sub-interval, a
// direction sign cell, a residue class, and a torus-coordinate sub-interval.
// Unset components are unconstrained.
struct PacketConstraint {
    std::optional<std::pair<double, double>> error_range;
    std::optional<std::vector<int>> proj_signs;  // one per coordinate; 0 = free
    std::optional<std::pair<int, std::vector<int>>> residue_class; // modulus, class
    std::optional<std::pair<double, double>> beta_range;

    bool admits(const Packet& pk) const;
    bool trivial() const {
        return !error_range && !proj_signs && !residue_class && !beta_range;
    }
};

// One section visit in the k = r = 1 return series.
struct ReturnEntry {
    double t = 0.0;          // -log of the error-block norm, increasing
    double gap = 0.0;        // to the next constrained visit (0 for the last)
    double log_q = 0.0;      // log of the q-block norm
    double error = 0.0;      // exp(log_q * n/m - t); the s = 0 identity value
    std::vector<double> unit;// direction of p + theta q (unit block vector)
    Packet packet;
};

struct ReturnSeries {
    std::vector<ReturnEntry> entries; // constrained members only, t increasing
    size_t total_members = 0;         // sign-normalized members before the constraint
    size_t shape_undefined = 0;
    long long tie_warnings = 0;       // equal consecutive error-block norms
    int m = 1, n = 1;
};

// Builds the return series of a k = r = 1 stream: members are sign-normalized
// and ordered by decreasing error-block norm, packets evaluated, and the
// constraint applied; entries are the surviving members with their visit
// times and gaps.
ReturnSeries build_return_series(const ApproximateStream& stream, const Target& target,
                                 const Params& params, const Decomposition& dec,
                                 const NormSpec& norms, const PacketConstraint& constraint);

// Same series assembled from the continued-fraction path (m = n = 1); packets
// carry error, direction signs, residues, and the exact torus coordinate.
ReturnSeries build_return_series_cf(const Target& target, const Params& params,
                                    const CfOptions& opts, const PacketConstraint& constraint,
                                    CfStats* stats = nullptr);

// The shifted sequence w_l = |q_{l+s}|^(n/m) * (p_l + theta q_l) over the
// constrained subsequence; the shift runs inside the constrained indices.
struct ShiftedSequence {
    int shift = 0;
    std::vector<std::vector<double>> values; // m components each
    std::vector<double> scalar() const;      // first components (m = 1 use)
};
ShiftedSequence shifted_sequence(const ReturnSeries& series, int shift);

// Kolmogorov-Smirnov distance between the empirical distributions of the two
// halves of a sequence; needs at least 200 points.
double empirical_stability(const std::vector<double>& values);

} // namespace mda
