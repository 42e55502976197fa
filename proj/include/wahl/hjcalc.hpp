#pragma once

// Hirzebruch-Jung continued-fraction calculus: expansion/evaluation,
// Wahl/T-chain recognition, discrepancies, and meridian exponents for
// cyclic quotient singularities. All arithmetic is exact.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace wahl {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// A cyclic quotient singularity 1/m(1,q), 0 < q < m, gcd(m,q) = 1.
struct CyclicQuotient {
    Int m;
    Int q;
    bool operator==(const CyclicQuotient& o) const { return m == o.m && q == o.q; }
};

// Parameters of a Wahl singularity 1/n^2(1, na-1), 0 < a < n, gcd(n,a) = 1.
struct WahlParams {
    Int n;
    Int a;
    bool operator==(const WahlParams& o) const { return n == o.n && a == o.a; }
};

// Parameters of a T-singularity 1/dn^2(1, dna-1), d >= 1.
struct TParams {
    Int d;
    Int n;
    Int a;
    bool operator==(const TParams& o) const { return d == o.d && n == o.n && a == o.a; }
};

// Thrown on invalid (m,q) pairs or chain entries < 2.
struct hj_input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// HJ expansion m/q = [e1,...,es], every e_i >= 2.
std::vector<Int> hj_expand(const Int& m, const Int& q);

// Inverse of hj_expand; returns the reduced (m,q).
CyclicQuotient hj_evaluate(const std::vector<Int>& chain);

// The chain of the Wahl singularity 1/n^2(1, na-1).
std::vector<Int> wahl_chain(const WahlParams& params);

// Recognize a chain as a Wahl chain, if it is one.
std::optional<WahlParams> recognize_wahl(const std::vector<Int>& chain);

// Recognize a chain as a T-chain 1/dn^2(1, dna-1), if it is one.
std::optional<TParams> recognize_T(const std::vector<Int>& chain);

// Discrepancies d_i of the exceptional curves: exact solution of
// (K + sum d_i E_i) . E_j = 0 with K . E_j = e_j - 2. Each -1 < d_i <= 0.
std::vector<Rat> discrepancies(const std::vector<Int>& chain);

// Mumford meridian exponents: t0 = 0, t1 = 1, t_{i+1} = e_i t_i - t_{i-1};
// exponents are (t1,...,ts) and the group order is t_{s+1} = m.
struct Meridians {
    std::vector<Int> exponents;
    Int order;
};
Meridians meridian_exponents(const std::vector<Int>& chain);

// Search prune for non-rational ambient surfaces: s <= 4 k2 + 1.
bool length_bound_ok(const Int& k2, std::size_t s);

// |det| of the s x s tridiagonal intersection matrix (diagonal -e_i,
// off-diagonal 1); equals m for the chain of m/q, and n^2 for Wahl chains.
Int chain_abs_determinant(const std::vector<Int>& chain);

// Fast exhaustive round-trip verification of hj_expand/hj_evaluate over all
// coprime pairs q < m <= limit, using run-length compression of 2-runs so
// chains like m/(m-1) = [2,...,2] cost O(1) instead of O(m). Returns the
// number of pairs verified; throws on the first mismatch.
std::uint64_t hj_roundtrip_exhaustive(std::int64_t limit);

} // namespace wahl
