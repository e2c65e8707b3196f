#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mda/core.hpp"
#include "mda/rng.hpp"

namespace mda {

enum class EnumMode { Epsilon, EpsilonStar };

// Leading term of a counting law: count(T) ~ leading_constant * T^exponent.
struct Prediction {
    double leading_constant = 0.0;
    int exponent = 0;
    std::string description;

    double value_at(double T) const;
};

// Alternating sum over subsets S of the n-blocks of (-1)^(r-|S|) (sum_{j in S} n_j)^(k+r-1).
// Always a positive integer; equals the number of maps from a (k+r-1)-element
// set into [n] whose image meets every block.
long long counting_constant(const std::vector<int>& n_parts, int k);

// Volume of the time polytope {u in R_{>=0}^k, v in [0,T]^{r-1} :
// 0 <= sum m_i u_i - sum n_j v_j <= n_r T}.
double time_polytope_volume(double T, const Decomposition& dec);

// Membership test for the same polytope (u-coords first, then v-coords).
bool time_polytope_contains(std::span<const double> t, double T, const Decomposition& dec);

// Volume of the unit ball of the compound max-of-blocks norm on R^d.
double unit_ball_volume(const Decomposition& dec, const NormSpec& norms);

// Riemann zeta at integer d >= 2, 12+ correct digits (direct series plus
// Euler-Maclaurin tail).
double riemann_zeta(int d);

// Number of primitive residue vectors in (Z/t)^d: multiplicative over prime
// powers p^s || t with factor p^(ds) - p^(d(s-1)).
long long primitive_residue_count(long long t, int d);

// Predicted leading coefficient for the number of approximates of height
// <= e^T: mode EpsilonStar counts (p,q) with s | gcd, mode Epsilon counts
// primitive pairs (s forced to 1, extra 1/zeta(d)).
Prediction predicted_count(const Params& params, const Decomposition& dec,
                           const NormSpec& norms, EnumMode mode, long long s);

// ---- Limiting-marginal targets and samplers -------------------------------

enum class MarginalKind { SphereBlock, ErrorTerm, Congruence, TorusShape };

struct MarginalSpec {
    MarginalKind kind;
    // SphereBlock: dimension + norm of the block; Congruence: modulus + d.
    int dim = 1;
    NormKind norm = NormKind::Sup;
    double epsilon = 0.0;
    int modulus = 0;
    int d = 0;

    std::string describe() const;
};

MarginalSpec marginal_error(const Params& params);
MarginalSpec marginal_sphere_block(int dim, NormKind norm);
MarginalSpec marginal_congruence(int modulus, int d);
MarginalSpec marginal_torus();

// One draw from the marginal. SphereBlock returns `dim` coordinates (cone
// measure of the block norm); ErrorTerm/TorusShape return one coordinate;
// Congruence returns d residues as doubles.
std::vector<double> sample_marginal(const MarginalSpec& spec, Rng& rng);

} // namespace mda
