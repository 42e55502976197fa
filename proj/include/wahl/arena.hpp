#pragma once

// The configuration model: a surface snapshot (ambient invariants, tracked
// rational curves, incidence points) together with the closed-form
// combinatorial invariants computed from it (census, P/K, log Chern
// numbers, and the four BMY-style relations).

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wahl/hjcalc.hpp"

namespace wahl {

struct AmbientSurface {
    std::string name;
    long long k2 = 0;       // K_Z^2
    long long chi_top = 0;  // topological Euler characteristic
    long long pg = 0;       // geometric genus
    long long q_irr = 0;    // irregularity
};

struct Curve {
    std::string name;
    long long self_int = 0;
    long long nodes = 0; // remaining nodes (arithmetic genus of the curve)
    std::set<std::string> tags;
};

// A point where local branches of tracked curves cross pairwise
// transversally. A nodal curve passing through its own node contributes a
// single branch of multiplicity 2.
struct IncidencePoint {
    std::string name; // optional; empty if anonymous
    std::vector<std::pair<int, int>> branches; // (curve index, multiplicity)
    bool consumed = false;        // true once blown up
    int exceptional = -1;         // index of the curve the blow-up created

    int total_multiplicity() const {
        int k = 0;
        for (auto& [c, m] : branches)
            k += m;
        return k;
    }
    int multiplicity_of(int curve) const {
        for (auto& [c, m] : branches)
            if (c == curve)
                return m;
        return 0;
    }
};

struct Arena {
    AmbientSurface ambient;
    std::vector<Curve> curves;
    std::vector<IncidencePoint> points;
    long long blowup_count = 0;

    long long k2_current() const { return ambient.k2 - blowup_count; }
    long long chi_top_current() const { return ambient.chi_top + blowup_count; }

    int curve_index(const std::string& name) const; // -1 if absent
    int require_curve(const std::string& name) const; // throws if absent
};

struct Census {
    long long r = 0;
    long long nu = 0;
    std::map<int, long long> t; // t[k] = number of k-points, k >= 2

    long long t_at(int k) const {
        auto it = t.find(k);
        return it == t.end() ? 0 : it->second;
    }
};

struct PK {
    long long P = 0;
    long long K = 0;
    bool operator==(const PK& o) const { return P == o.P && K == o.K; }
};

struct LogChern {
    Int c1sq = 0;
    Int c2 = 0;
    bool applicable = true; // false when a member node lies on another member
};

// One relation of the BMY-style report: an exact equality or bound with
// both sides recorded.
struct BmyRelation {
    std::string label;
    Rat lhs;
    Rat rhs;
    bool is_bound = false; // lhs <= rhs instead of lhs == rhs
    bool pass = false;
};

struct BmyReport {
    std::vector<BmyRelation> relations;
    bool all_pass() const {
        for (auto& r : relations)
            if (!r.pass)
                return false;
        return true;
    }
};

// Structural validation; returns human-readable violations (empty = valid).
std::vector<std::string> validate(const Arena& arena);

// Intersection number of two distinct tracked curves, summed over active
// incidence points.
long long pairwise_int(const Arena& arena, int a, int b);

// (r, nu, t_k) of the subconfiguration. A point counts toward t_k when its
// restriction to the subset has total multiplicity k >= 2 and involves
// either two distinct curves or a curve beyond its own node; a bare node is
// accounted by nu only.
Census census(const Arena& arena, const std::vector<int>& subset);

// P and K of Definition-style bookkeeping:
//   P = sum C^2 + 5r - sum k t_k - 2 nu
//   K = K^2(current) - 3r - sum C^2 + sum (k-1) t_k + 2 nu
PK pk(const Arena& arena, const std::vector<int>& subset);

// Incremental update when a smooth rational curve E is appended to the
// divisor: E^2 = e2, meeting it at n smooth and m singular points.
PK pk_add_curve(PK base, long long e2, long long n, long long m);

// Transport of (P,K) when, over each k-point (k >= 3), t_k - t_k0 of the
// exceptional curves join the chains: P' = P - sum (2k-4)(t_k - t_k0),
// K' = K + sum (k-2)(t_k - t_k0).
PK pk_transport(PK base, const std::map<int, long long>& t,
                const std::map<int, long long>& t0);

// Log Chern numbers by explicit simulation of a log resolution.
LogChern log_chern_resolved(const Arena& arena, const std::vector<int>& subset);

// Closed-form log Chern numbers:
//   c1^2 = K^2 - sum C^2 + sum (3k-4) t_k - 4r + 2 nu
//   c2   = chi_top + sum (k-1) t_k - 2r
// applicable=false when a member node lies on another member curve; the
// resolved computation is authoritative in that regime.
LogChern log_chern_formula(const Arena& arena, const std::vector<int>& subset);

// The four exact relations tying K_W^2, the census and the log Chern
// numbers together (one bound and three identities).
BmyReport bmy_report(long long k2_z, long long pg, long long ell, long long r,
                     long long kw2, const std::map<int, long long>& t,
                     const std::map<int, long long>& t0, const Int& c1sq,
                     const Int& c2);

// Primitive transformation: blow up one incidence point. Every incident
// curve loses (local multiplicity)^2 from its self-intersection, a branch of
// multiplicity 2 consumes one node, and a new (-1)-curve is appended meeting
// each former branch transversally (a multiplicity-m branch yields m simple
// crossings with the new curve). Returns the index of the new curve.
int blow_up_point(Arena& arena, int point_index, const std::string& exc_name);

} // namespace wahl
