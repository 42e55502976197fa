#include "wahl/arena.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace wahl {

int Arena::curve_index(const std::string& name) const {
    for (std::size_t i = 0; i < curves.size(); ++i)
        if (curves[i].name == name)
            return static_cast<int>(i);
    return -1;
}

int Arena::require_curve(const std::string& name) const {
    int i = curve_index(name);
    if (i < 0)
        throw std::invalid_argument("unknown curve: " + name);
    return i;
}

namespace {

// Restriction of a point to a subset (given as a membership mask).
// Returns the restricted branches.
std::vector<std::pair<int, int>> restrict_point(const IncidencePoint& p,
                                                const std::vector<char>& member) {
    std::vector<std::pair<int, int>> out;
    for (auto& [c, m] : p.branches)
        if (member[c])
            out.emplace_back(c, m);
    return out;
}

std::vector<char> member_mask(const Arena& arena, const std::vector<int>& subset) {
    std::vector<char> mask(arena.curves.size(), 0);
    for (int i : subset) {
        if (i < 0 || i >= static_cast<int>(arena.curves.size()))
            throw std::invalid_argument("subset index out of range");
        mask[i] = 1;
    }
    return mask;
}

} // namespace

std::vector<std::string> validate(const Arena& arena) {
    std::vector<std::string> out;
    auto complain = [&](const std::string& s) { out.push_back(s); };

    if (arena.curves.empty())
        complain("arena has no curves");
    std::unordered_map<std::string, int> seen;
    for (std::size_t i = 0; i < arena.curves.size(); ++i) {
        const Curve& c = arena.curves[i];
        if (c.name.empty())
            complain("curve " + std::to_string(i) + " has empty name");
        else if (!seen.emplace(c.name, static_cast<int>(i)).second)
            complain("duplicate curve name: " + c.name);
        if (c.nodes < 0)
            complain("curve " + c.name + " has negative node count");
    }

    std::vector<long long> node_points(arena.curves.size(), 0);
    for (std::size_t pi = 0; pi < arena.points.size(); ++pi) {
        const IncidencePoint& p = arena.points[pi];
        if (p.consumed)
            continue;
        std::set<int> distinct;
        int k = 0;
        for (auto& [c, m] : p.branches) {
            if (c < 0 || c >= static_cast<int>(arena.curves.size())) {
                complain("point " + std::to_string(pi) + " references missing curve");
                continue;
            }
            if (m != 1 && m != 2)
                complain("point " + std::to_string(pi) + " has branch multiplicity " +
                         std::to_string(m) + " (expected 1 or 2)");
            if (!distinct.insert(c).second)
                complain("point " + std::to_string(pi) + " lists curve " +
                         arena.curves[c].name + " twice (use multiplicity 2)");
            if (m == 2)
                ++node_points[c];
            k += m;
        }
        if (k < 2)
            complain("point " + std::to_string(pi) + " has total multiplicity < 2");
    }
    for (std::size_t i = 0; i < arena.curves.size(); ++i)
        if (node_points[i] != arena.curves[i].nodes)
            complain("curve " + arena.curves[i].name + ": " +
                     std::to_string(arena.curves[i].nodes) + " nodes declared but " +
                     std::to_string(node_points[i]) + " nodal branches recorded");

    // Optional fiber-structure check: curves sharing a tag "fiber:<id>" form
    // one fiber; the fiber class has square 0 and meets each curve tagged
    // "section" exactly once.
    std::map<std::string, std::vector<int>> fibers;
    std::vector<int> sections;
    for (std::size_t i = 0; i < arena.curves.size(); ++i) {
        for (const std::string& t : arena.curves[i].tags)
            if (t.rfind("fiber:", 0) == 0)
                fibers[t].push_back(static_cast<int>(i));
        if (arena.curves[i].tags.count("section"))
            sections.push_back(static_cast<int>(i));
    }
    for (auto& [tag, comps] : fibers) {
        long long sq = 0;
        for (int a : comps) {
            sq += arena.curves[a].self_int;
            for (int b : comps)
                if (b != a)
                    sq += pairwise_int(arena, a, b);
        }
        if (sq != 0)
            complain("fiber " + tag + " has square " + std::to_string(sq));
        for (int s : sections) {
            long long hit = 0;
            for (int a : comps)
                hit += pairwise_int(arena, s, a);
            if (hit != 1)
                complain("section " + arena.curves[s].name + " meets fiber " + tag +
                         " " + std::to_string(hit) + " times");
        }
    }
    return out;
}

long long pairwise_int(const Arena& arena, int a, int b) {
    if (a == b)
        throw std::invalid_argument("pairwise_int: identical curves");
    if (a < 0 || b < 0 || a >= static_cast<int>(arena.curves.size()) ||
        b >= static_cast<int>(arena.curves.size()))
        throw std::invalid_argument("pairwise_int: unknown curve");
    long long total = 0;
    for (const IncidencePoint& p : arena.points) {
        if (p.consumed)
            continue;
        total += static_cast<long long>(p.multiplicity_of(a)) * p.multiplicity_of(b);
    }
    return total;
}

Census census(const Arena& arena, const std::vector<int>& subset) {
    std::vector<char> mask = member_mask(arena, subset);
    Census c;
    c.r = static_cast<long long>(subset.size());
    for (int i : subset)
        c.nu += arena.curves[i].nodes;
    for (const IncidencePoint& p : arena.points) {
        if (p.consumed)
            continue;
        auto res = restrict_point(p, mask);
        int k = 0;
        for (auto& [cv, m] : res)
            k += m;
        if (k < 2)
            continue;
        if (res.size() == 1 && res[0].second == 2)
            continue; // a bare node, accounted by nu
        ++c.t[k];
    }
    return c;
}

PK pk(const Arena& arena, const std::vector<int>& subset) {
    if (subset.empty())
        throw std::invalid_argument("pk: empty subset");
    Census c = census(arena, subset);
    long long sum_sq = 0;
    for (int i : subset)
        sum_sq += arena.curves[i].self_int;
    long long sum_kt = 0, sum_k1t = 0;
    for (auto& [k, tk] : c.t) {
        sum_kt += static_cast<long long>(k) * tk;
        sum_k1t += static_cast<long long>(k - 1) * tk;
    }
    PK out;
    out.P = sum_sq + 5 * c.r - sum_kt - 2 * c.nu;
    out.K = arena.k2_current() - 3 * c.r - sum_sq + sum_k1t + 2 * c.nu;
    return out;
}

PK pk_add_curve(PK base, long long e2, long long n, long long m) {
    return PK{base.P + e2 + 5 - 2 * n - m, base.K - e2 - 3 + n + m};
}

PK pk_transport(PK base, const std::map<int, long long>& t,
                const std::map<int, long long>& t0) {
    PK out = base;
    for (auto& [k, tk] : t) {
        if (k < 3)
            continue;
        long long tk0 = 0;
        if (auto it = t0.find(k); it != t0.end())
            tk0 = it->second;
        if (tk0 < 0 || tk0 > tk)
            throw std::invalid_argument("pk_transport: t_k0 out of range");
        out.P -= (2 * k - 4) * (tk - tk0);
        out.K += (k - 2) * (tk - tk0);
    }
    return out;
}

int blow_up_point(Arena& arena, int point_index, const std::string& exc_name) {
    if (point_index < 0 || point_index >= static_cast<int>(arena.points.size()))
        throw std::invalid_argument("blow_up_point: no such point");
    if (arena.points[point_index].consumed)
        throw std::invalid_argument("blow_up_point: point already blown up");

    // Mutate curves first; the branch list is copied because appending the
    // exceptional curve and new points invalidates references.
    std::vector<std::pair<int, int>> branches = arena.points[point_index].branches;
    for (auto& [c, m] : branches) {
        arena.curves[c].self_int -= static_cast<long long>(m) * m;
        if (m >= 2)
            arena.curves[c].nodes -= 1;
    }
    Curve exc;
    exc.name = exc_name;
    exc.self_int = -1;
    exc.nodes = 0;
    exc.tags.insert("exceptional");
    arena.curves.push_back(exc);
    int e = static_cast<int>(arena.curves.size()) - 1;

    arena.points[point_index].consumed = true;
    arena.points[point_index].exceptional = e;
    for (auto& [c, m] : branches)
        for (int i = 0; i < m; ++i) {
            IncidencePoint np;
            np.branches = {{e, 1}, {c, 1}};
            arena.points.push_back(np);
        }
    arena.blowup_count += 1;
    return e;
}

LogChern log_chern_resolved(const Arena& arena, const std::vector<int>& subset) {
    if (subset.empty())
        throw std::invalid_argument("log_chern_resolved: empty subset");
    LogChern flagged = log_chern_formula(arena, subset);

    Arena z = arena;
    std::vector<char> member = member_mask(z, subset);
    long long blowups = 0;

    // Repeatedly blow up any point whose restriction to the divisor has
    // total multiplicity >= 3 or contains a nodal branch; each exceptional
    // curve joins the divisor.
    for (;;) {
        int target = -1;
        for (std::size_t pi = 0; pi < z.points.size(); ++pi) {
            const IncidencePoint& p = z.points[pi];
            if (p.consumed)
                continue;
            int k = 0;
            bool nodal = false;
            for (auto& [c, m] : p.branches)
                if (member[c]) {
                    k += m;
                    nodal |= (m >= 2);
                }
            if (k >= 3 || nodal) {
                target = static_cast<int>(pi);
                break;
            }
        }
        if (target < 0)
            break;
        int e = blow_up_point(z, target, "_log" + std::to_string(++blowups));
        member.resize(z.curves.size(), 0);
        member[e] = 1;
        if (blowups > 4 * static_cast<long long>(z.points.size()) + 1000)
            throw std::logic_error("log_chern_resolved: resolution did not terminate");
    }

    // (K + D)^2 with K.C = -2 - C^2 for the now-smooth rational components,
    // plus chi_top(Z~) - chi(D~) with chi(D~) counted combinatorially.
    Int ksq = z.k2_current();
    Int sum_kc = 0, sum_sq = 0, pairs = 0;
    long long ncomp = 0;
    for (std::size_t i = 0; i < z.curves.size(); ++i) {
        if (!member[i])
            continue;
        if (z.curves[i].nodes != 0)
            throw std::logic_error("log_chern_resolved: unresolved node");
        ++ncomp;
        sum_kc += -2 - z.curves[i].self_int;
        sum_sq += z.curves[i].self_int;
    }
    for (const IncidencePoint& p : z.points) {
        if (p.consumed)
            continue;
        Int local = 0;
        for (std::size_t a = 0; a < p.branches.size(); ++a)
            for (std::size_t b = a + 1; b < p.branches.size(); ++b)
                if (member[p.branches[a].first] && member[p.branches[b].first])
                    local += Int(p.branches[a].second) * p.branches[b].second;
        pairs += local;
    }
    LogChern out;
    out.c1sq = ksq + 2 * sum_kc + sum_sq + 2 * pairs;
    out.c2 = Int(z.chi_top_current()) - (2 * ncomp - pairs);
    out.applicable = flagged.applicable;
    return out;
}

LogChern log_chern_formula(const Arena& arena, const std::vector<int>& subset) {
    std::vector<char> mask = member_mask(arena, subset);
    Census c = census(arena, subset);
    long long sum_sq = 0;
    for (int i : subset)
        sum_sq += arena.curves[i].self_int;
    Int sum3k4 = 0, sumk1 = 0;
    for (auto& [k, tk] : c.t) {
        sum3k4 += Int(3 * k - 4) * tk;
        sumk1 += Int(k - 1) * tk;
    }
    LogChern out;
    out.c1sq = Int(arena.k2_current()) - sum_sq + sum3k4 - 4 * c.r + 2 * c.nu;
    out.c2 = Int(arena.chi_top_current()) + sumk1 - 2 * c.r;
    out.applicable = true;
    for (const IncidencePoint& p : arena.points) {
        if (p.consumed)
            continue;
        bool member_node = false, other_member = false;
        for (auto& [cv, m] : p.branches) {
            if (mask[cv] && m >= 2)
                member_node = true;
            else if (mask[cv])
                other_member = true;
        }
        if (member_node && other_member)
            out.applicable = false;
    }
    return out;
}

BmyReport bmy_report(long long k2_z, long long pg, long long ell, long long r,
                     long long kw2, const std::map<int, long long>& t,
                     const std::map<int, long long>& t0, const Int& c1sq,
                     const Int& c2) {
    long long sum_k2_t0 = 0, sum_k1_t = 0;
    for (auto& [k, v] : t0)
        sum_k2_t0 += (k - 2) * v;
    for (auto& [k, v] : t)
        sum_k1_t += (k - 1) * v;

    BmyReport rep;
    auto add = [&](const std::string& label, Rat lhs, Rat rhs, bool bound) {
        BmyRelation rel;
        rel.label = label;
        rel.lhs = lhs;
        rel.rhs = rhs;
        rel.is_bound = bound;
        rel.pass = bound ? (lhs <= rhs) : (lhs == rhs);
        rep.relations.push_back(rel);
    };
    add("(i) K_W^2 <= 12(1+pg) - K_Z^2/3 - 2l/3 - r/3 + sum(k-2)t_k0/3", Rat(kw2),
        Rat(36 * (1 + pg) - k2_z - 2 * ell - r + sum_k2_t0, 3), true);
    add("(ii) c1bar^2 = K_Z^2 - l + r + 2 sum(k-2)t_k0", Rat(c1sq),
        Rat(k2_z - ell + r + 2 * sum_k2_t0), false);
    add("(iii) c2bar = 12(1+pg) - l - K_W^2 + sum(k-2)t_k0", Rat(c2),
        Rat(12 * (1 + pg) - ell - kw2 + sum_k2_t0), false);
    add("(iv) 2r = K_W^2 - K_Z^2 + l + sum(k-1)t_k - sum(k-2)t_k0", Rat(2 * r),
        Rat(kw2 - k2_z + ell + sum_k1_t - sum_k2_t0), false);
    return rep;
}

} // namespace wahl
