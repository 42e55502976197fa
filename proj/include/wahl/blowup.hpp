#pragma once

// Blow-up directives and their replay against an arena: single blow-ups at
// (possibly named) incidence points and infinitely-near chains
// [a1,...,an] x L ^ R.

#include <optional>
#include <string>
#include <vector>

#include "wahl/arena.hpp"

namespace wahl {

struct BlowupDirective {
    enum class Kind { Simple, Chain };
    Kind kind = Kind::Simple;
    std::vector<std::string> point_spec; // curve names, repeated for nodal branches
    std::string exc_name;                // optional name for the exceptional curve
    std::vector<long long> chain;        // entries a_i for Kind::Chain
};

struct replay_error : std::runtime_error {
    int directive_index;
    replay_error(int idx, const std::string& what)
        : std::runtime_error(what), directive_index(idx) {}
};

// Resolve a point spec against the arena: the unique active point whose
// branch multiset contains the given curves (with multiplicity given by
// repetition). Throws std::invalid_argument when absent or ambiguous.
int resolve_point(const Arena& arena, const std::vector<std::string>& spec);

// Contraction order of a chain [a1,...,an]: the sequence reduces to [1] by
// repeatedly deleting an entry equal to 1 while decrementing its neighbors.
// Returns for each deletion step the position within the then-current
// sequence (deterministic: leftmost-first, with backtracking), or nullopt.
std::optional<std::vector<int>> chain_valid(const std::vector<long long>& chain);

// Single blow-up directive: resolves the point and applies blow_up_point.
// Returns the new arena.
Arena blow_up(const Arena& arena, const BlowupDirective& directive);

// Chain directive: n blow-ups at successive intersections over L ^ R,
// producing exceptionals of self-intersections -a1,...,-an with the
// (-a1)-curve meeting L and the (-an)-curve meeting R. Realized as the fold
// of single blow-ups in the reverse contraction order.
Arena realize_chain(const Arena& arena, const BlowupDirective& directive);

struct ReplayRecord {
    long long blowups = 0;       // total B
    std::vector<int> exceptionals; // curve index per blow-up, in order
};

// Folds all directives; exceptional curves are auto-named e1, e2, ... unless
// the directive carries a name. Throws replay_error with the first failing
// directive index.
Arena replay(const Arena& arena, const std::vector<BlowupDirective>& directives,
             ReplayRecord* record = nullptr);

} // namespace wahl
