#pragma once

// Systematic search for disjoint Wahl chains with prescribed K_W^2 inside a
// fixed arena: candidate enumeration, canonical deduplication, pruning, and
// numeric re-certification of every hit.

#include <string>
#include <vector>

#include "wahl/arena.hpp"
#include "wahl/certify.hpp"

namespace wahl {

struct SearchProblem {
    Arena arena;              // typically post-replay
    int ell = 2;              // number of chains (1 or 2)
    long long target_k2 = 0;  // K_W^2 to reach
    int max_len = 64;         // per-chain length cap
    bool prune = true;        // length/positivity prunes (result set invariant)
    int threads = 1;
};

struct SearchResult {
    std::vector<RealizedChain> chains;
    Certificate certificate; // numeric re-certification ("certified-numeric")
    std::string key;
};

struct SearchOutcome {
    bool feasible = true;
    std::string diagnostic; // set when infeasible
    std::vector<SearchResult> results; // sorted by key, deduplicated
};

// All simple paths in the curve-adjacency graph whose self-intersection
// sequence passes recognize_wahl, each reported once up to reversal
// (canonical orientation: lexicographically smaller index sequence).
std::vector<RealizedChain> enumerate_chains(const Arena& arena, int max_len);

// Equal for states identical up to chain reversal and chain reordering.
std::string canonical_key(const std::vector<RealizedChain>& chains);

// Exhaustive over selections of `ell` pairwise-disjoint enumerated chains
// with total length target_k2 - k2_current; every result re-certified
// numerically (chain shape, K_W^2, Noether, pullback, nef on tracked
// curves) and dropped unless that certificate has no violations.
SearchOutcome search(const SearchProblem& problem);

} // namespace wahl
