#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wahl/arena.hpp"
#include "wahl/dsl.hpp"

using namespace wahl;

static Arena load(const std::string& name) {
    return parse_arena(read_file(std::string(WAHL_DATA_DIR) + "/" + name));
}

static std::vector<int> all_curves(const Arena& a) {
    std::vector<int> s(a.curves.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = static_cast<int>(i);
    return s;
}

TEST_CASE("shipped arenas validate") {
    for (auto name : {"p2_blowup9.arena", "k3_2i8.arena", "re_k3base.arena"}) {
        Arena a = load(name);
        CHECK(validate(a).empty());
    }
}

TEST_CASE("ambient invariants of the shipped arenas") {
    Arena p2 = load("p2_blowup9.arena");
    CHECK(p2.ambient.k2 == 0);
    CHECK(p2.ambient.chi_top == 12);
    CHECK(p2.ambient.pg == 0);
    CHECK(p2.ambient.q_irr == 0);
    Arena k3 = load("k3_2i8.arena");
    CHECK(k3.ambient.k2 == 0);
    CHECK(k3.ambient.chi_top == 24);
    CHECK(k3.ambient.pg == 1);
}

TEST_CASE("census of the full 25-curve divisor") {
    Arena a = load("p2_blowup9.arena");
    REQUIRE(a.curves.size() == 25);
    Census c = census(a, all_curves(a));
    CHECK(c.r == 25);
    CHECK(c.nu == 0);
    CHECK(c.t_at(2) == 62);
    CHECK(c.t_at(3) == 0);
    CHECK(c.t_at(4) == 3);
    CHECK(c.t_at(5) == 1);

    // self-intersection histogram: twelve -2, eight -1, five 0
    int m2 = 0, m1 = 0, z = 0;
    for (auto& cu : a.curves) {
        if (cu.self_int == -2) ++m2;
        if (cu.self_int == -1) ++m1;
        if (cu.self_int == 0) ++z;
    }
    CHECK(m2 == 12);
    CHECK(m1 == 8);
    CHECK(z == 5);
}

TEST_CASE("pairwise intersection is symmetric and nonnegative") {
    Arena a = load("p2_blowup9.arena");
    for (std::size_t i = 0; i < a.curves.size(); ++i)
        for (std::size_t j = i + 1; j < a.curves.size(); ++j) {
            long long ij = pairwise_int(a, (int)i, (int)j);
            CHECK(ij >= 0);
            CHECK(ij == pairwise_int(a, (int)j, (int)i));
        }
    // fiber components of one fiber sum to self-intersection 0 and each
    // section meets each fiber once: spot checks
    int lx = a.require_curve("Lx"), ly = a.require_curve("Ly");
    int lz = a.require_curve("Lz"), e1 = a.require_curve("E1");
    // the f1 fiber is the 4-cycle Lx-Ly-Lz-E1-Lx
    CHECK(pairwise_int(a, lx, ly) == 1);
    CHECK(pairwise_int(a, ly, lz) == 1);
    CHECK(pairwise_int(a, lz, e1) == 1);
    CHECK(pairwise_int(a, lx, e1) == 1);
    CHECK(pairwise_int(a, lx, lz) == 0);
    CHECK(pairwise_int(a, ly, e1) == 0);
}

TEST_CASE("P/K of a small subconfiguration") {
    Arena a = load("p2_blowup9.arena");
    BoxExample box1 =
        parse_box(read_file(std::string(WAHL_DATA_DIR) + "/box01.wahlbox"));
    std::vector<int> sub;
    for (auto& nm : box1.configuration)
        sub.push_back(a.require_curve(nm));
    PK base = pk(a, sub);
    CHECK(base.P == 4);
    CHECK(base.K == 4);
    Census c = census(a, sub);
    CHECK(c.r == 14);
    // transport over the two unblown 3-points (one exceptional joins):
    // (4,4) -> (2,5)
    std::map<int, long long> t{{3, c.t_at(3)}}, t0{{3, 1}};
    CHECK(c.t_at(3) == 2);
    PK after = pk_transport(base, t, t0);
    CHECK(after.P == 2);
    CHECK(after.K == 5);
}

TEST_CASE("pk_add_curve matches recomputation") {
    Arena a = load("p2_blowup9.arena");
    std::vector<std::string> names{"Lx", "Ly", "Lz", "E1", "BT", "Q1"};
    std::vector<int> sub;
    PK run = pk(a, {a.require_curve(names[0])});
    sub.push_back(a.require_curve(names[0]));
    for (std::size_t i = 1; i < names.size(); ++i) {
        int idx = a.require_curve(names[i]);
        // count smooth crossings of the new member with the current divisor
        long long hits = 0;
        for (int s : sub)
            hits += pairwise_int(a, s, idx);
        run = pk_add_curve(run, a.curves[idx].self_int, hits, 0);
        sub.push_back(idx);
        PK direct = pk(a, sub);
        CHECK(run.P == direct.P);
        CHECK(run.K == direct.K);
    }
}

TEST_CASE("log Chern numbers: formula agrees with log resolution") {
    Arena a = load("p2_blowup9.arena");
    auto sub = all_curves(a);
    LogChern f = log_chern_formula(a, sub);
    LogChern r = log_chern_resolved(a, sub);
    REQUIRE(f.applicable);
    CHECK(f.c1sq == r.c1sq);
    CHECK(f.c2 == r.c2);
}

TEST_CASE("log resolution is blow-up-order invariant") {
    Arena base = load("p2_blowup9.arena");
    auto sub = all_curves(base);
    LogChern ref = log_chern_resolved(base, sub);
    std::mt19937 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        Arena a = base;
        // blow a few random multiple points first; the resolved log Chern
        // numbers of the total transform subset must not change for the
        // k-point exceptional added to the divisor
        for (int step = 0; step < 3; ++step) {
            std::vector<int> multi;
            for (std::size_t p = 0; p < a.points.size(); ++p)
                if (!a.points[p].consumed &&
                    a.points[p].total_multiplicity() >= 3)
                    multi.push_back((int)p);
            if (multi.empty())
                break;
            int p = multi[rng() % multi.size()];
            blow_up_point(a, p, "X" + std::to_string(trial) + "_" +
                                     std::to_string(step));
        }
        std::vector<int> sub2(a.curves.size());
        for (std::size_t i = 0; i < sub2.size(); ++i)
            sub2[i] = (int)i;
        LogChern got = log_chern_resolved(a, sub2);
        CHECK(got.c1sq == ref.c1sq);
        CHECK(got.c2 == ref.c2);
    }
}

TEST_CASE("blow_up_point mechanics") {
    Arena a = load("p2_blowup9.arena");
    int q1 = a.require_curve("Q1"), l1 = a.require_curve("L1");
    long long q1self = a.curves[q1].self_int;
    // find the 5-point through Q1, L1 (and three more branches)
    int target = -1;
    for (std::size_t p = 0; p < a.points.size(); ++p) {
        auto& pt = a.points[p];
        if (pt.total_multiplicity() == 5 && pt.multiplicity_of(q1) == 1 &&
            pt.multiplicity_of(l1) == 1)
            target = (int)p;
    }
    REQUIRE(target >= 0);
    long long before = pairwise_int(a, q1, l1);
    int exc = blow_up_point(a, target, "Enew");
    CHECK(a.curves[exc].name == "Enew");
    CHECK(a.curves[exc].self_int == -1);
    CHECK(a.curves[q1].self_int == q1self - 1);
    CHECK(pairwise_int(a, q1, l1) == before - 1);
    CHECK(pairwise_int(a, q1, exc) == 1);
    CHECK(a.points[target].consumed);
    CHECK(a.blowup_count == 1);
    CHECK(a.k2_current() == -1);
    CHECK(a.chi_top_current() == 13);
}

TEST_CASE("nodal branch: multiplicity-2 blow-up consumes the node") {
    Arena a;
    a.ambient = {"toy", 8, 4, 0, 0};
    a.curves.push_back({"Cnod", 2, 1, {}});
    a.curves.push_back({"Lthr", 0, 0, {}});
    IncidencePoint node;
    node.branches = {{0, 2}, {1, 1}};  // nodal branch + a line
    a.points.push_back(node);
    REQUIRE(validate(a).empty());
    int exc = blow_up_point(a, 0, "E");
    CHECK(a.curves[0].self_int == 2 - 4);
    CHECK(a.curves[0].nodes == 0);
    CHECK(a.curves[1].self_int == -1);
    CHECK(pairwise_int(a, 0, exc) == 2);
    CHECK(pairwise_int(a, 1, exc) == 1);
    CHECK(pairwise_int(a, 0, 1) == 0);
}

TEST_CASE("validate flags broken input") {
    Arena a = load("p2_blowup9.arena");
    a.points.front().branches.front().first = 999;  // dangling curve index
    CHECK_FALSE(validate(a).empty());
}
