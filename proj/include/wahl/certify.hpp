#pragma once

// End-to-end verification of a boxed construction: replay, Wahl chains,
// K_W^2, topology, canonical pullback and nefness on tracked curves,
// fundamental-group gcd certificates, obstruction dimensions, and the
// BMY-style relations.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wahl/arena.hpp"
#include "wahl/blowup.hpp"
#include "wahl/dsl.hpp"

namespace wahl {

// A realized Wahl chain inside the final arena X.
struct RealizedChain {
    std::vector<int> curves; // arena indices, in bracket order
    std::vector<Int> bracket;
    WahlParams params;
};

struct NefEntry {
    std::string curve;
    Rat value;
};

struct NefReport {
    std::vector<NefEntry> zero;     // K_W nef but not ample along these
    std::vector<NefEntry> negative; // failures
    long long positive = 0;         // count of strictly positive tracked curves
    bool untracked_not_verified = true; // explicit scope statement
};

struct Pi1Connector {
    std::string curve; // the tracked (-1)-curve joining the chains
    Int exponent_a;    // meridian exponent at its attachment in chain 1
    Int exponent_b;    // ... in chain 2
    Int gcd_a;         // gcd(exponent_a, n1)
    Int gcd_b;         // gcd(exponent_b, n2)
};

struct Pi1Report {
    Int gcd_indices = 0; // gcd(n1, n2)
    std::vector<Pi1Connector> connectors;
    bool certified = false;
    std::string note;
};

struct Certificate {
    int box_id = 0;
    std::string status = "fail"; // "pass" or "fail"
    std::vector<std::string> violations;

    // Replay.
    long long blowups = 0;
    long long kx2 = 0;
    long long chi_top_x = 0;

    // Chains.
    std::vector<RealizedChain> chains;
    long long kw2 = 0;

    // Topology of W.
    long long chi_top_w = 0;
    long long chi_o = 0;
    long long b_plus = 0;
    long long b_minus = 0;
    std::string parity = "undetermined"; // or "odd"

    // Subconfiguration bookkeeping on Z.
    Census census_z;
    PK pk_z;
    std::map<int, long long> t0; // exceptionals over k-points not in chains
    LogChern log_formula;
    LogChern log_resolved;
    BmyReport bmy;

    // Positivity and pi1.
    std::map<std::string, Rat> pullback; // chain member -> coefficient of pi*K_W
    NefReport nef;
    Pi1Report pi1;

    // Obstruction dimensions.
    long long h2_minus_h1 = 0;
    std::optional<long long> kernel_dim;

    // Recorded assumptions that exact bookkeeping cannot discharge.
    std::vector<std::string> assumptions;
};

// Chain-shape checks: each chain linear (consecutive members meet exactly
// once, other pairs in the same or different chains disjoint), every
// bracket recognized by recognize_wahl. Returns violations.
std::vector<std::string> verify_chains(const Arena& arena,
                                       const std::vector<RealizedChain>& chains);

// K_W^2 = K_X^2 + sum of chain lengths.
long long compute_kw2(const Arena& arena, const std::vector<RealizedChain>& chains);

// chi_top(W), chi(O_W), b+/b-, and the parity flag.
struct Topology {
    long long chi_top_w = 0;
    long long chi_o = 0;
    long long b_plus = 0;
    long long b_minus = 0;
    std::string parity;
};
Topology compute_topology(const Arena& arena, const std::vector<RealizedChain>& chains,
                          long long kw2, long long pg, long long q_irr);

// Coefficients of pi*K_W = K_X + sum c_i E_i over the chain members
// (c_i = -d_i with d_i the discrepancies); every c_i lies in (0,1) and
// pi*K_W . E = 0 exactly for every member E.
std::map<std::string, Rat> pullback_canonical(const Arena& arena,
                                              const std::vector<RealizedChain>& chains);

// Intersects pi*K_W with every tracked non-member curve.
NefReport nef_check(const Arena& arena, const std::vector<RealizedChain>& chains,
                    const std::map<std::string, Rat>& pullback);

// gcd certificate for simple connectivity (two-chain case).
Pi1Report pi1_certificate(const Arena& arena, const std::vector<RealizedChain>& chains);

// h2 - h1 = l + 2 K_W^2 - 10 chi(O_W); kernel_dim = exact nullity of the
// intersection matrix of the subconfiguration (in the unblown arena).
long long obstruction_h2_minus_h1(long long ell, long long kw2, long long chi_o);
long long kernel_dimension(const Arena& arena, const std::vector<int>& subset);

// Locate disjoint chains realizing the declared brackets in the final
// arena; returns nullopt when no disjoint assignment exists.
std::optional<std::vector<RealizedChain>> find_declared_chains(
    const Arena& x, const std::vector<DeclaredChain>& declared);

// All disjoint assignments (up to the cap); certify() tries each in turn
// so an ambiguous bracket cannot shadow a realization that certifies.
std::vector<std::vector<RealizedChain>> find_declared_chain_assignments(
    const Arena& x, const std::vector<DeclaredChain>& declared,
    std::size_t max_assignments = 64);

// The full pipeline for one parsed box over its base arena.
Certificate certify(const Arena& z, const BoxExample& box);

// JSON serialization of a certificate ("schema": "wahl-report/1").
std::string emit_report(const Certificate& cert);

} // namespace wahl
