#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mda/core.hpp"
#include "mda/enumerate.hpp"
#include "mda/linalg.hpp"

namespace mda {

// The data packet of one approximate: error term, block directions,
// congruence residues, and the shape lattice basis for the configured index.
struct Packet {
    double error = 0.0;
    std::vector<double> proj;                 // d entries, block-wise unit vectors
    std::map<int, std::vector<int>> residues; // modulus -> residue vector in [0,N)^d
    Mat shape_basis;                          // d x d, unimodular, contains e_j
    int shape_index = 0;                      // 1-based j
    std::optional<double> torus_beta;         // d = 2 chart of the shape lattice
};

// Plain product of block norms (no max convention); nullopt when a block of
// p + theta q or of q vanishes.
std::optional<double> error_term(const Target& target, std::span<const long long> p,
                                 std::span<const long long> q, const Decomposition& dec,
                                 const NormSpec& norms);

// Block-wise radial projections of (p + theta q, q); nullopt on a vanishing
// block. Output is the concatenated d-vector.
std::optional<std::vector<double>> sphere_projection(const Target& target,
                                                     std::span<const long long> p,
                                                     std::span<const long long> q,
                                                     const Decomposition& dec,
                                                     const NormSpec& norms);

// Coordinate-wise residues of (p, q) in [0, N)^d.
std::vector<int> congruence_residues(std::span<const long long> p,
                                     std::span<const long long> q, int modulus);

// Basis of the block-rescaled lattice D * [[I_m, theta],[0, I_n]] * Z^d where
// D carries the inverse block norms; covolume is 1/error. nullopt on a
// degenerate block.
std::optional<Mat> lattice_lambda_theta(const Target& target, std::span<const long long> p,
                                        std::span<const long long> q,
                                        const Decomposition& dec, const NormSpec& norms);

// The unique matrix mapping x to sign(x_j) e_j that scales the complementary
// coordinate axes by a single positive factor c = (gamma |x_j|)^(1/(d-1)),
// which makes |det| = gamma. Throws std::invalid_argument when x_j = 0.
Mat axis_normalizer(std::span<const double> x, double gamma, int j);

// Shape lattice: axis_normalizer(projection, error) applied to
// lattice_lambda_theta; unimodular and contains e_j primitively. nullopt when
// degenerate or when coordinate j of (p + theta q, q) vanishes.
std::optional<Mat> shape_lattice_basis(const Target& target, std::span<const long long> p,
                                       std::span<const long long> q, const Params& params,
                                       const Decomposition& dec, const NormSpec& norms);

// d = 2 chart: writes the lattice as Z*(+-1, w) + Z*e2 by integer column
// operations and returns w * sign(first coordinate) mod 1 in [0,1).
// Throws std::runtime_error when the basis does not contain e2.
double torus_coordinate(const Mat& shape_basis);

// Full packet of one stream member.
std::optional<Packet> compute_packet(const Target& target, const Approximate& a,
                                     const Params& params, const Decomposition& dec,
                                     const NormSpec& norms);

// Exact d = 2, j = 2 torus coordinate for big members: beta of the shape
// lattice of (p, q), computed with rational arithmetic throughout.
double torus_coordinate_exact(const BigRat& theta, const BigInt& p, const BigInt& q);

} // namespace mda
