#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mda/core.hpp"
#include "mda/enumerate.hpp"
#include "mda/linalg.hpp"

namespace mda {

// Multi-parameter flow time: k exponents for the m-blocks and r-1 for the
// leading n-blocks; the last n-block exponent balances the determinant.
struct FlowTime {
    std::vector<double> comps; // s_1..s_k, t_1..t_{r-1}

    double last_exponent(const Decomposition& dec) const;
};

// Left-multiplication of a basis by the diagonal flow matrix: row scaling by
// the block exponentials. Throws on |exponent| > 700.
Mat flow_apply(const FlowTime& time, const Mat& basis, const Decomposition& dec);

// Basis of the standard theta-lattice [[I_m, theta],[0, I_n]] Z^d.
Mat theta_lattice_basis(const Target& target, const Decomposition& dec);

struct Box {
    std::vector<double> lo, hi;

    bool contains(std::span<const double> x) const {
        for (size_t i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
    double volume() const {
        double v = 1.0;
        for (size_t i = 0; i < lo.size(); ++i) v *= std::max(0.0, hi[i] - lo[i]);
        return v;
    }
};

struct CellBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LatticePoint {
    std::vector<long long> coeff; // w.r.t. an internally size-reduced basis
    std::vector<double> point;    // the lattice vector itself

    bool is_zero() const {
        for (long long v : coeff)
            if (v) return false;
        return true;
    }
};

// Lattice points of basis * Z^d inside the box. The basis is size-reduced
// first (integer column operations only, so the lattice is unchanged); the
// coefficients are then bounded through the inverse, and the budget caps the
// candidate cell count after reduction. Primitivity of the coefficient vector
// is invariant under the basis change.
std::vector<LatticePoint> lattice_points_in_box(const Mat& basis, const Box& box,
                                                long long cell_budget = 1000000);

struct VisitRecord {
    FlowTime time;
    size_t member_index = 0; // into the stream that produced it
    bool verified = false;   // flowed vector lies in the section window
    double residual = 0.0;   // max deviation of the unit-sphere blocks
};

// Visit times of the stream members: s_i = -log|rho_i(p + theta q)|,
// t_j = log|rho'_j(q)|; verification flows (p + theta q, q) and checks that
// the first k+r-1 blocks land on their unit spheres (within 1e-9) and the
// last block norm^{n_r} stays within epsilon + 1e-9.
std::vector<VisitRecord> visit_times(const ApproximateStream& stream, const Target& target,
                                     const Params& params, const Decomposition& dec,
                                     const NormSpec& norms);

// Groups visit records by exact time vector; each group should be one
// +/- pair. Returns the number of groups whose size differs from 2.
long long visit_time_collisions(const std::vector<VisitRecord>& records,
                                const ApproximateStream& stream);

struct BirkhoffResult {
    double average = 0.0;
    long long grid_nodes = 0;    // nodes inside the time polytope
    double polytope_volume = 0.0;
};

// Average of the primitive-vector count of the flowed theta-lattice in W over
// a regular grid (randomized half-cell offset) on the time polytope.
BirkhoffResult birkhoff_average(const Target& target, const Box& W, const Decomposition& dec,
                                const NormSpec& norms, double T, long long min_nodes,
                                std::uint64_t grid_seed);

// Primitive-vector count of basis * Z^d inside W.
long long primitive_points_in_box(const Mat& basis, const Box& W,
                                  long long cell_budget = 1000000);

} // namespace mda
