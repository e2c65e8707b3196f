#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mda/bigrational.hpp"
#include "mda/dd.hpp"
#include "mda/rng.hpp"

namespace mda {

enum class NormKind { Sup, Euclidean, Taxicab };

std::string norm_kind_name(NormKind k);
NormKind norm_kind_from_name(const std::string& s);

// Block structure of the approximation problem: the row space R^m splits into
// k blocks of sizes m_parts, the column space R^n into r blocks of sizes
// n_parts, and d = m + n.
struct Decomposition {
    std::vector<int> m_parts;
    std::vector<int> n_parts;

    Decomposition(std::vector<int> mp, std::vector<int> np);

    int k() const { return static_cast<int>(m_parts.size()); }
    int r() const { return static_cast<int>(n_parts.size()); }
    int m() const { return m_; }
    int n() const { return n_; }
    int d() const { return m_ + n_; }

    // Offset of block i within the m-side / n-side vector.
    int m_offset(int i) const { return m_offsets_[i]; }
    int n_offset(int j) const { return n_offsets_[j]; }

private:
    int m_ = 0, n_ = 0;
    std::vector<int> m_offsets_, n_offsets_;
};

// Per-block norm choice, k+r entries (m-blocks first, then n-blocks).
struct NormSpec {
    std::vector<NormKind> kinds;

    static NormSpec all(NormKind k, const Decomposition& dec) {
        return NormSpec{std::vector<NormKind>(dec.k() + dec.r(), k)};
    }
    NormKind m_block(int i) const { return kinds[i]; }
    NormKind n_block(const Decomposition& dec, int j) const { return kinds[dec.k() + j]; }
    void validate(const Decomposition& dec) const;
};

struct Params {
    double epsilon = 0.5;
    std::vector<double> etas;          // one per m-block
    int shape_index = 0;               // j in [1, d], 1-based
    std::vector<int> congruence_moduli = {2, 3};

    void validate(const Decomposition& dec) const;
};

enum class Precision { F64, DoubleDouble, Rational };

std::string precision_name(Precision p);
Precision precision_from_name(const std::string& s);

// Target matrix theta, stored exactly as rationals; the precision tag selects
// the arithmetic used when enumerating against it.
struct Target {
    int rows = 0, cols = 0;
    std::vector<BigRat> entries;       // row-major
    Precision precision = Precision::F64;
    std::uint64_t seed = 0;            // 0 when entries were given explicitly
    unsigned seed_bits = 0;

    static Target from_doubles(int rows, int cols, const std::vector<double>& vals,
                               Precision prec = Precision::F64);
    // Coordinate-wise uniform on (0,1), 53-bit dyadics.
    static Target random(int rows, int cols, std::uint64_t seed,
                         Precision prec = Precision::F64);
    // Single-entry rational target with `bits`-bit denominator (m = n = 1).
    static Target random_rational(std::uint64_t seed, unsigned bits);

    const BigRat& at(int i, int j) const { return entries[static_cast<size_t>(i) * cols + j]; }
    double at_d(int i, int j) const;
    DD at_dd(int i, int j) const;
    std::vector<double> to_doubles() const;
};

struct Approximate {
    std::vector<long long> p;
    std::vector<long long> q;
    bool primitive = false;
    double height = 0.0;               // compound norm of q
};

// Norm of a plain vector under one norm kind.
double block_norm(std::span<const double> v, NormKind kind);

// Splits x into consecutive blocks given part sizes; concatenation of the
// output reproduces x exactly.
std::vector<std::vector<double>> project_blocks(std::span<const double> x,
                                                const std::vector<int>& parts);

// gcd of absolute values; empty or all-zero input gives 0.
long long gcd_all(std::span<const long long> v);

// Compound norm: max over blocks of the per-block norms.
double compound_norm(std::span<const double> x, const std::vector<int>& parts,
                     std::span<const NormKind> kinds);

// Volume of the unit ball of one norm kind in dimension l.
double unit_ball_volume_1(NormKind kind, int l);

} // namespace mda
