#include "wahl/blowup.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace wahl {

namespace {

std::string spec_to_string(const std::vector<std::string>& spec) {
    std::string s;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (i)
            s += " ^ ";
        s += spec[i];
    }
    return s;
}

// Unique active point containing both curves (used for the successive
// intersections inside a chain directive, where the pair determines the
// point unambiguously).
int unique_point_of_pair(const Arena& arena, int a, int b) {
    int found = -1;
    for (std::size_t pi = 0; pi < arena.points.size(); ++pi) {
        const IncidencePoint& p = arena.points[pi];
        if (p.consumed)
            continue;
        if (p.multiplicity_of(a) > 0 && p.multiplicity_of(b) > 0) {
            if (found >= 0)
                throw std::invalid_argument("ambiguous intersection of " +
                                            arena.curves[a].name + " and " +
                                            arena.curves[b].name);
            found = static_cast<int>(pi);
        }
    }
    if (found < 0)
        throw std::invalid_argument("no intersection of " + arena.curves[a].name +
                                    " and " + arena.curves[b].name);
    return found;
}

std::string next_exc_name(const Arena& arena, const std::string& requested) {
    if (!requested.empty())
        return requested;
    std::string name = "e" + std::to_string(arena.blowup_count + 1);
    while (arena.curve_index(name) >= 0)
        name += "x"; // avoid collisions with curated names
    return name;
}

bool contract_step(std::vector<std::pair<long long, int>>& seq,
                   std::vector<std::pair<int, int>>& steps) {
    if (seq.size() == 1)
        return seq[0].first == 1;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i].first != 1)
            continue;
        // Neighbors must stay >= 1 after the decrement.
        if (i > 0 && seq[i - 1].first <= 1)
            continue;
        if (i + 1 < seq.size() && seq[i + 1].first <= 1)
            continue;
        auto saved = seq;
        steps.emplace_back(static_cast<int>(i), seq[i].second);
        if (i > 0)
            seq[i - 1].first -= 1;
        if (i + 1 < seq.size())
            seq[i + 1].first -= 1;
        seq.erase(seq.begin() + static_cast<long>(i));
        if (contract_step(seq, steps))
            return true;
        steps.pop_back();
        seq = saved;
    }
    return false;
}

} // namespace

int resolve_point(const Arena& arena, const std::vector<std::string>& spec) {
    if (spec.empty())
        throw std::invalid_argument("empty point spec");
    std::map<int, int> want; // curve index -> required multiplicity
    for (const std::string& name : spec)
        want[arena.require_curve(name)] += 1;
    int found = -1;
    for (std::size_t pi = 0; pi < arena.points.size(); ++pi) {
        const IncidencePoint& p = arena.points[pi];
        if (p.consumed)
            continue;
        bool ok = true;
        for (auto& [c, m] : want)
            if (p.multiplicity_of(c) < m) {
                ok = false;
                break;
            }
        if (!ok)
            continue;
        if (found >= 0) {
            // Two matches are harmless when the points are indistinguishable
            // (identical branch multisets); keep the earliest one.
            if (arena.points[found].branches == p.branches)
                continue;
            throw std::invalid_argument("ambiguous point spec: " + spec_to_string(spec));
        }
        found = static_cast<int>(pi);
    }
    if (found < 0)
        throw std::invalid_argument("no active point matches: " + spec_to_string(spec));
    return found;
}

std::optional<std::vector<int>> chain_valid(const std::vector<long long>& chain) {
    if (chain.empty())
        return std::nullopt;
    for (long long a : chain)
        if (a < 1)
            return std::nullopt;
    std::vector<std::pair<long long, int>> seq;
    for (std::size_t i = 0; i < chain.size(); ++i)
        seq.emplace_back(chain[i], static_cast<int>(i));
    std::vector<std::pair<int, int>> steps;
    if (!contract_step(seq, steps))
        return std::nullopt;
    std::vector<int> order;
    for (auto& [pos, orig] : steps)
        order.push_back(pos);
    return order;
}

Arena blow_up(const Arena& arena, const BlowupDirective& directive) {
    if (directive.kind != BlowupDirective::Kind::Simple)
        throw std::invalid_argument("blow_up: expected a simple directive");
    Arena out = arena;
    int p = resolve_point(out, directive.point_spec);
    blow_up_point(out, p, next_exc_name(out, directive.exc_name));
    return out;
}

Arena realize_chain(const Arena& arena, const BlowupDirective& directive) {
    if (directive.kind != BlowupDirective::Kind::Chain)
        throw std::invalid_argument("realize_chain: expected a chain directive");
    if (directive.point_spec.size() != 2)
        throw std::invalid_argument("realize_chain: point spec must name two curves");

    // Recover the contraction order together with original indices.
    std::vector<std::pair<long long, int>> seq;
    for (std::size_t i = 0; i < directive.chain.size(); ++i)
        seq.emplace_back(directive.chain[i], static_cast<int>(i));
    std::vector<std::pair<int, int>> steps; // (position, original index)
    if (!contract_step(seq, steps))
        throw std::invalid_argument("realize_chain: invalid chain bracket");
    int survivor = seq[0].second;

    Arena out = arena;
    const int L = out.require_curve(directive.point_spec[0]);
    const int R = out.require_curve(directive.point_spec[1]);

    // First blow-up at L ^ R, then re-insert the deleted entries in reverse
    // contraction order; each insertion blows up the intersection of its
    // then-current chain neighbors.
    std::vector<int> exc_of(directive.chain.size(), -1);
    int p0 = resolve_point(out, directive.point_spec);
    exc_of[survivor] = blow_up_point(out, p0, next_exc_name(out, ""));
    std::vector<int> order = {survivor}; // original indices, chain order

    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        auto [pos, orig] = *it;
        int left = (pos == 0) ? L : exc_of[order[pos - 1]];
        int right = (pos == static_cast<int>(order.size())) ? R : exc_of[order[pos]];
        int pt = unique_point_of_pair(out, left, right);
        exc_of[orig] = blow_up_point(out, pt, next_exc_name(out, ""));
        order.insert(order.begin() + pos, orig);
    }

    // The realized exceptionals must carry self-intersections -a_i in order.
    for (std::size_t i = 0; i < directive.chain.size(); ++i)
        if (out.curves[exc_of[i]].self_int != -directive.chain[i])
            throw std::logic_error("realize_chain: self-intersection mismatch");
    return out;
}

Arena replay(const Arena& arena, const std::vector<BlowupDirective>& directives,
             ReplayRecord* record) {
    Arena out = arena;
    if (record)
        *record = ReplayRecord{};
    for (std::size_t i = 0; i < directives.size(); ++i) {
        long long before = out.blowup_count;
        std::size_t ncurves = out.curves.size();
        try {
            if (directives[i].kind == BlowupDirective::Kind::Simple)
                out = blow_up(out, directives[i]);
            else
                out = realize_chain(out, directives[i]);
        } catch (const std::exception& e) {
            throw replay_error(static_cast<int>(i),
                               "directive " + std::to_string(i + 1) + ": " + e.what());
        }
        if (record) {
            record->blowups += out.blowup_count - before;
            for (std::size_t c = ncurves; c < out.curves.size(); ++c)
                record->exceptionals.push_back(static_cast<int>(c));
        }
    }
    return out;
}

} // namespace wahl
