#include "wahl/certify.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace wahl {

using boost::multiprecision::gcd;

std::vector<std::string> verify_chains(const Arena& arena,
                                       const std::vector<RealizedChain>& chains) {
    std::vector<std::string> out;
    std::set<int> used;
    for (std::size_t ci = 0; ci < chains.size(); ++ci) {
        const RealizedChain& ch = chains[ci];
        std::string tag = "chain " + std::to_string(ci + 1);
        if (ch.curves.size() != ch.bracket.size()) {
            out.push_back(tag + ": length mismatch");
            continue;
        }
        auto rec = recognize_wahl(ch.bracket);
        if (!rec)
            out.push_back(tag + ": bracket is not a Wahl chain");
        else if (!(*rec == ch.params))
            out.push_back(tag + ": params do not match bracket");
        for (std::size_t i = 0; i < ch.curves.size(); ++i) {
            const Curve& c = arena.curves[ch.curves[i]];
            if (Int(-c.self_int) != ch.bracket[i])
                out.push_back(tag + ": " + c.name + " has self-intersection " +
                              std::to_string(c.self_int));
            if (c.nodes != 0)
                out.push_back(tag + ": " + c.name + " is nodal");
            if (!used.insert(ch.curves[i]).second)
                out.push_back(tag + ": " + c.name + " appears in two chains");
        }
        for (std::size_t i = 0; i < ch.curves.size(); ++i)
            for (std::size_t j = i + 1; j < ch.curves.size(); ++j) {
                if (ch.curves[i] == ch.curves[j]) {
                    out.push_back(tag + ": " + arena.curves[ch.curves[i]].name +
                                  " appears twice in the chain");
                    continue;
                }
                long long expect = (j == i + 1) ? 1 : 0;
                long long got = pairwise_int(arena, ch.curves[i], ch.curves[j]);
                if (got != expect)
                    out.push_back(tag + ": " + arena.curves[ch.curves[i]].name +
                                  " . " + arena.curves[ch.curves[j]].name + " = " +
                                  std::to_string(got) + ", expected " +
                                  std::to_string(expect));
            }
    }
    for (std::size_t a = 0; a < chains.size(); ++a)
        for (std::size_t b = a + 1; b < chains.size(); ++b)
            for (int ia : chains[a].curves)
                for (int ib : chains[b].curves)
                    if (ia != ib && pairwise_int(arena, ia, ib) != 0)
                        out.push_back("chains " + std::to_string(a + 1) + " and " +
                                      std::to_string(b + 1) + " meet at " +
                                      arena.curves[ia].name + " . " +
                                      arena.curves[ib].name);
    return out;
}

long long compute_kw2(const Arena& arena, const std::vector<RealizedChain>& chains) {
    long long kw2 = arena.k2_current();
    for (const RealizedChain& ch : chains)
        kw2 += static_cast<long long>(ch.curves.size());
    return kw2;
}

Topology compute_topology(const Arena& arena, const std::vector<RealizedChain>& chains,
                          long long kw2, long long pg, long long q_irr) {
    Topology t;
    long long lengths = 0;
    for (const RealizedChain& ch : chains)
        lengths += static_cast<long long>(ch.curves.size());
    t.chi_top_w = arena.chi_top_current() - lengths;
    if ((kw2 + t.chi_top_w) % 12 != 0)
        throw std::runtime_error("Noether integrality fails: K^2 + chi_top = " +
                                 std::to_string(kw2 + t.chi_top_w));
    t.chi_o = (kw2 + t.chi_top_w) / 12;
    if (t.chi_o != 1 + pg - q_irr)
        throw std::runtime_error("chi(O_W) != 1 + pg - q of the ambient surface");
    t.b_plus = 2 * t.chi_o - 1;
    t.b_minus = 10 * t.chi_o - kw2 - 1;
    t.parity = "undetermined";
    if (kw2 % 2 != 0) {
        t.parity = "odd";
    } else {
        std::set<int> members;
        for (const RealizedChain& ch : chains)
            members.insert(ch.curves.begin(), ch.curves.end());
        for (std::size_t i = 0; i < arena.curves.size() && t.parity == "undetermined";
             ++i) {
            if (members.count(static_cast<int>(i)) ||
                arena.curves[i].self_int % 2 == 0)
                continue;
            bool disjoint = true;
            for (int m : members)
                if (pairwise_int(arena, static_cast<int>(i), m) != 0) {
                    disjoint = false;
                    break;
                }
            if (disjoint)
                t.parity = "odd";
        }
    }
    return t;
}

std::map<std::string, Rat> pullback_canonical(const Arena& arena,
                                              const std::vector<RealizedChain>& chains) {
    std::map<std::string, Rat> coeff;
    std::map<int, Rat> by_index;
    for (const RealizedChain& ch : chains) {
        std::vector<Rat> d = discrepancies(ch.bracket);
        for (std::size_t i = 0; i < ch.curves.size(); ++i) {
            Rat c = -d[i];
            if (c <= 0 || c >= 1)
                throw std::logic_error("pullback coefficient outside (0,1)");
            coeff[arena.curves[ch.curves[i]].name] = c;
            by_index[ch.curves[i]] = c;
        }
    }
    // pi*K_W . E = 0 for every chain member, exactly.
    for (const RealizedChain& ch : chains)
        for (int e : ch.curves) {
            const Curve& c = arena.curves[e];
            Rat v = Rat(2 * c.nodes - 2 - c.self_int); // K_X . E
            for (auto& [j, cj] : by_index)
                v += cj * (j == e ? Rat(c.self_int) : Rat(pairwise_int(arena, j, e)));
            if (v != 0)
                throw std::logic_error("pi*K_W . " + c.name + " != 0");
        }
    return coeff;
}

NefReport nef_check(const Arena& arena, const std::vector<RealizedChain>& chains,
                    const std::map<std::string, Rat>& pullback) {
    NefReport rep;
    std::set<int> members;
    for (const RealizedChain& ch : chains)
        members.insert(ch.curves.begin(), ch.curves.end());
    for (std::size_t i = 0; i < arena.curves.size(); ++i) {
        if (members.count(static_cast<int>(i)))
            continue;
        const Curve& c = arena.curves[i];
        Rat v = Rat(2 * c.nodes - 2 - c.self_int);
        for (int m : members)
            v += pullback.at(arena.curves[m].name) *
                 Rat(pairwise_int(arena, static_cast<int>(i), m));
        if (v < 0)
            rep.negative.push_back({c.name, v});
        else if (v == 0)
            rep.zero.push_back({c.name, v});
        else
            ++rep.positive;
    }
    return rep;
}

Pi1Report pi1_certificate(const Arena& arena, const std::vector<RealizedChain>& chains) {
    Pi1Report rep;
    if (chains.size() != 2) {
        rep.note = "certificate defined for exactly two chains";
        return rep;
    }
    const RealizedChain& A = chains[0];
    const RealizedChain& B = chains[1];
    rep.gcd_indices = gcd(A.params.n, B.params.n);

    Meridians ma = meridian_exponents(A.bracket);
    Meridians mb = meridian_exponents(B.bracket);

    std::set<int> members;
    for (const RealizedChain& ch : chains)
        members.insert(ch.curves.begin(), ch.curves.end());
    for (std::size_t i = 0; i < arena.curves.size(); ++i) {
        if (members.count(static_cast<int>(i)) || arena.curves[i].self_int != -1)
            continue;
        // Attachment positions: the curve must meet each chain exactly once.
        auto attach = [&](const RealizedChain& ch) -> int {
            int pos = -1;
            long long total = 0;
            for (std::size_t j = 0; j < ch.curves.size(); ++j) {
                long long v = pairwise_int(arena, static_cast<int>(i), ch.curves[j]);
                total += v;
                if (v == 1 && pos < 0)
                    pos = static_cast<int>(j);
            }
            return total == 1 ? pos : -1;
        };
        int pa = attach(A), pb = attach(B);
        if (pa < 0 || pb < 0)
            continue;
        Pi1Connector con;
        con.curve = arena.curves[i].name;
        con.exponent_a = ma.exponents[pa];
        con.exponent_b = mb.exponents[pb];
        con.gcd_a = gcd(con.exponent_a, A.params.n);
        con.gcd_b = gcd(con.exponent_b, B.params.n);
        rep.connectors.push_back(con);
    }
    for (const Pi1Connector& con : rep.connectors)
        if (rep.gcd_indices == 1 && con.gcd_a == 1 && con.gcd_b == 1)
            rep.certified = true;
    if (!rep.certified)
        rep.note = rep.connectors.empty()
                       ? "inconclusive: no tracked (-1)-curve joins both chains"
                       : "inconclusive: no connecting curve with coprime exponents";
    return rep;
}

long long obstruction_h2_minus_h1(long long ell, long long kw2, long long chi_o) {
    return ell + 2 * kw2 - 10 * chi_o;
}

long long kernel_dimension(const Arena& arena, const std::vector<int>& subset) {
    const std::size_t n = subset.size();
    std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n));
    for (std::size_t i = 0; i < n; ++i) {
        m[i][i] = Rat(arena.curves[subset[i]].self_int);
        for (std::size_t j = i + 1; j < n; ++j)
            m[i][j] = m[j][i] = Rat(pairwise_int(arena, subset[i], subset[j]));
    }
    // Exact Gaussian elimination; nullity = n - rank.
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < n; ++col) {
        std::size_t pivot = rank;
        while (pivot < n && m[pivot][col] == 0)
            ++pivot;
        if (pivot == n)
            continue;
        std::swap(m[pivot], m[rank]);
        for (std::size_t r = rank + 1; r < n; ++r) {
            if (m[r][col] == 0)
                continue;
            Rat f = m[r][col] / m[rank][col];
            for (std::size_t c2 = col; c2 < n; ++c2)
                m[r][c2] -= f * m[rank][c2];
        }
        ++rank;
    }
    return static_cast<long long>(n - rank);
}

namespace {

// All simple paths realizing a given bracket (self-intersections in order,
// with the linear-chain incidence pattern), in either orientation; results
// are reported in the declared orientation.
std::vector<std::vector<int>> bracket_paths(const Arena& x, const std::vector<Int>& bracket) {
    std::vector<std::vector<int>> out;
    const std::size_t s = bracket.size();

    std::vector<std::vector<long long>> pair_cache(x.curves.size());
    auto pint = [&](int a, int b) {
        if (pair_cache[a].empty()) {
            pair_cache[a].assign(x.curves.size(), 0);
            for (const IncidencePoint& p : x.points) {
                if (p.consumed)
                    continue;
                int ma = p.multiplicity_of(a);
                if (ma == 0)
                    continue;
                for (auto& [c, m] : p.branches)
                    if (c != a)
                        pair_cache[a][c] += static_cast<long long>(ma) * m;
            }
        }
        return pair_cache[a][b];
    };

    auto run = [&](const std::vector<Int>& br, bool reversed) {
        std::vector<int> path;
        std::function<void(std::size_t)> dfs = [&](std::size_t depth) {
            if (depth == s) {
                std::vector<int> found = path;
                if (reversed)
                    std::reverse(found.begin(), found.end());
                out.push_back(std::move(found));
                return;
            }
            for (std::size_t i = 0; i < x.curves.size(); ++i) {
                const Curve& c = x.curves[i];
                if (c.nodes != 0 || Int(-c.self_int) != br[depth])
                    continue;
                if (std::find(path.begin(), path.end(), static_cast<int>(i)) !=
                    path.end())
                    continue;
                bool ok = true;
                for (std::size_t j = 0; j < depth && ok; ++j) {
                    long long expect = (j + 1 == depth) ? 1 : 0;
                    ok = pint(path[j], static_cast<int>(i)) == expect;
                }
                if (!ok)
                    continue;
                path.push_back(static_cast<int>(i));
                dfs(depth + 1);
                path.pop_back();
            }
        };
        dfs(0);
    };
    run(bracket, false);
    std::vector<Int> rev(bracket.rbegin(), bracket.rend());
    if (rev != bracket)
        run(rev, true);
    // Deduplicate (palindromic brackets can produce a path twice).
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

std::vector<std::vector<RealizedChain>> find_declared_chain_assignments(
    const Arena& x, const std::vector<DeclaredChain>& declared,
    std::size_t max_assignments) {
    std::vector<std::vector<RealizedChain>> all;
    std::vector<std::vector<std::vector<int>>> candidates;
    for (const DeclaredChain& dc : declared) {
        candidates.push_back(bracket_paths(x, dc.bracket));
        if (candidates.back().empty())
            return all;
    }
    std::vector<int> pick(declared.size(), -1);
    std::function<void(std::size_t)> assign = [&](std::size_t ci) {
        if (all.size() >= max_assignments)
            return;
        if (ci == declared.size()) {
            std::vector<RealizedChain> out;
            for (std::size_t i = 0; i < declared.size(); ++i) {
                RealizedChain rc;
                rc.curves = candidates[i][pick[i]];
                rc.bracket = declared[i].bracket;
                rc.params = declared[i].params;
                out.push_back(std::move(rc));
            }
            all.push_back(std::move(out));
            return;
        }
        for (std::size_t k = 0; k < candidates[ci].size(); ++k) {
            const std::vector<int>& cand = candidates[ci][k];
            bool ok = true;
            for (std::size_t prev = 0; prev < ci && ok; ++prev)
                for (int a : candidates[prev][pick[prev]]) {
                    for (int b : cand)
                        if (a == b || pairwise_int(x, a, b) != 0) {
                            ok = false;
                            break;
                        }
                    if (!ok)
                        break;
                }
            if (!ok)
                continue;
            pick[ci] = static_cast<int>(k);
            assign(ci + 1);
        }
    };
    assign(0);
    return all;
}

std::optional<std::vector<RealizedChain>> find_declared_chains(
    const Arena& x, const std::vector<DeclaredChain>& declared) {
    auto all = find_declared_chain_assignments(x, declared, 1);
    if (all.empty())
        return std::nullopt;
    return all.front();
}

static void certify_with_chains(Certificate& cert, const Arena& z,
                                const Arena& x, const std::vector<int>& subset,
                                const BoxExample& box,
                                const std::vector<RealizedChain>& chains);

Certificate certify(const Arena& z, const BoxExample& box) {
    Certificate cert;
    cert.box_id = box.id;
    auto fail0 = [&](const std::string& why) { cert.violations.push_back(why); };

    std::vector<int> subset;
    for (const std::string& name : box.configuration)
        subset.push_back(z.require_curve(name));

    cert.census_z = census(z, subset);
    cert.pk_z = pk(z, subset);
    cert.log_formula = log_chern_formula(z, subset);
    cert.log_resolved = log_chern_resolved(z, subset);
    cert.kernel_dim = kernel_dimension(z, subset);

    // Replay.
    ReplayRecord record;
    Arena x;
    try {
        x = replay(z, box.directives, &record);
    } catch (const replay_error& e) {
        fail0(std::string("replay: ") + e.what());
        cert.status = "fail";
        return cert;
    }
    cert.blowups = record.blowups;
    cert.kx2 = x.k2_current();
    cert.chi_top_x = x.chi_top_current();

    // Chains: an ambiguous bracket can have several disjoint realizations;
    // accept the first one whose full certificate is clean.
    auto assignments = find_declared_chain_assignments(x, box.chains);
    if (assignments.empty()) {
        fail0("declared chains not realizable as disjoint Wahl chains");
        cert.status = "fail";
        return cert;
    }
    Certificate best;
    for (std::size_t ai = 0; ai < assignments.size(); ++ai) {
        Certificate trial = cert;
        certify_with_chains(trial, z, x, subset, box, assignments[ai]);
        if (trial.status == "pass" || ai == 0)
            best = std::move(trial);
        if (best.status == "pass")
            break;
    }
    return best;
}

static void certify_with_chains(Certificate& cert, const Arena& z,
                                const Arena& x, const std::vector<int>& subset,
                                const BoxExample& box,
                                const std::vector<RealizedChain>& chains) {
    auto fail = [&](const std::string& why) { cert.violations.push_back(why); };
    cert.chains = chains;
    for (const std::string& v : verify_chains(x, cert.chains))
        fail("verify_chains: " + v);

    cert.kw2 = compute_kw2(x, cert.chains);
    if (cert.kw2 != box.target_k2)
        fail("K_W^2 = " + std::to_string(cert.kw2) + ", declared " +
             std::to_string(box.target_k2));
    for (const RealizedChain& ch : cert.chains)
        if (chain_abs_determinant(ch.bracket) != ch.params.n * ch.params.n)
            fail("chain determinant != n^2");

    try {
        Topology t = compute_topology(x, cert.chains, cert.kw2, z.ambient.pg,
                                      z.ambient.q_irr);
        cert.chi_top_w = t.chi_top_w;
        cert.chi_o = t.chi_o;
        cert.b_plus = t.b_plus;
        cert.b_minus = t.b_minus;
        cert.parity = t.parity;
    } catch (const std::exception& e) {
        fail(std::string("topology: ") + e.what());
    }

    try {
        cert.pullback = pullback_canonical(x, cert.chains);
        // (pi*K_W)^2 == K_W^2, recomputed from the coefficient map:
        // (pi*K)^2 = pi*K . K_X = K_X^2 + sum c_i (K_X . E_i).
        Rat sq = Rat(x.k2_current());
        for (const RealizedChain& ch : cert.chains)
            for (int e : ch.curves) {
                const Curve& c = x.curves[e];
                sq += cert.pullback.at(c.name) * Rat(2 * c.nodes - 2 - c.self_int);
            }
        if (sq != Rat(cert.kw2))
            fail("(pi*K_W)^2 != K_W^2");
        cert.nef = nef_check(x, cert.chains, cert.pullback);
        for (const NefEntry& ne : cert.nef.negative) {
            std::ostringstream os;
            os << "nef: pi*K_W . " << ne.curve << " = " << ne.value;
            fail(os.str());
        }
    } catch (const std::exception& e) {
        fail(std::string("pullback: ") + e.what());
    }

    cert.pi1 = pi1_certificate(x, cert.chains);

    // t_k0: exceptionals over the k-points (k >= 3) of the subconfiguration
    // that did not join the chains.
    std::set<int> members;
    for (const RealizedChain& ch : cert.chains)
        members.insert(ch.curves.begin(), ch.curves.end());
    std::vector<char> mask(z.curves.size(), 0);
    for (int i : subset)
        mask[i] = 1;
    for (std::size_t pi = 0; pi < z.points.size(); ++pi) {
        int k = 0;
        bool nodal_only = true;
        for (auto& [c, m] : z.points[pi].branches)
            if (mask[c]) {
                k += m;
                if (m == 1)
                    nodal_only = false;
            }
        if (k < 3 && nodal_only)
            continue;
        if (k < 3)
            continue;
        int exc = x.points[pi].exceptional;
        if (exc < 0 || !members.count(exc))
            cert.t0[k] += 1;
    }
    PK transported = pk_transport(cert.pk_z, cert.census_z.t, cert.t0);
    long long ell = static_cast<long long>(cert.chains.size());
    if (transported.P != ell || transported.K != cert.kw2)
        fail("P/K transport gives (" + std::to_string(transported.P) + "," +
             std::to_string(transported.K) + "), expected (" + std::to_string(ell) +
             "," + std::to_string(cert.kw2) + ")");

    cert.h2_minus_h1 = obstruction_h2_minus_h1(ell, cert.kw2, cert.chi_o);

    cert.bmy = bmy_report(z.k2_current(), z.ambient.pg, ell, cert.census_z.r,
                          cert.kw2, cert.census_z.t, cert.t0, cert.log_resolved.c1sq,
                          cert.log_resolved.c2);
    for (const BmyRelation& rel : cert.bmy.relations)
        if (!rel.pass)
            fail("bmy: " + rel.label);

    cert.assumptions = {
        "positivity of pi*K_W on untracked curves is assumed, not verified",
        "ampleness is reported as: nef, positive on all tracked curves, K^2 > 0"};

    cert.status = cert.violations.empty() ? "pass" : "fail";
}

std::string emit_report(const Certificate& cert) {
    using json = nlohmann::ordered_json;
    auto jint = [](const Int& v) -> json {
        static const Int lim = Int(1) << 53;
        if (v < lim && v > -lim)
            return json(static_cast<std::int64_t>(v));
        return json(v.str());
    };
    auto jrat = [](const Rat& v) -> json {
        return json{{"num", boost::multiprecision::numerator(v).str()},
                    {"den", boost::multiprecision::denominator(v).str()}};
    };

    json j;
    j["schema"] = "wahl-report/1";
    j["box"] = cert.box_id;
    j["status"] = cert.status;
    j["violations"] = cert.violations;
    j["blowups"] = cert.blowups;
    j["kx2"] = cert.kx2;
    j["kw2"] = cert.kw2;
    j["chains"] = json::array();
    for (const RealizedChain& ch : cert.chains) {
        json jc;
        jc["n"] = jint(ch.params.n);
        jc["a"] = jint(ch.params.a);
        jc["bracket"] = json::array();
        for (const Int& e : ch.bracket)
            jc["bracket"].push_back(jint(e));
        jc["curves"] = json::array();
        for (int c : ch.curves)
            jc["curves"].push_back(c);
        j["chains"].push_back(jc);
    }
    j["chi_o"] = cert.chi_o;
    j["b_plus"] = cert.b_plus;
    j["b_minus"] = cert.b_minus;
    j["parity"] = cert.parity;
    j["census"] = {{"r", cert.census_z.r}, {"nu", cert.census_z.nu}};
    for (auto& [k, v] : cert.census_z.t)
        j["census"]["t"][std::to_string(k)] = v;
    j["pk"] = {{"P", cert.pk_z.P}, {"K", cert.pk_z.K}};
    j["t0"] = json::object();
    for (auto& [k, v] : cert.t0)
        j["t0"][std::to_string(k)] = v;
    j["log_chern"] = {
        {"formula",
         {{"c1sq", jint(cert.log_formula.c1sq)},
          {"c2", jint(cert.log_formula.c2)},
          {"applicable", cert.log_formula.applicable}}},
        {"resolved",
         {{"c1sq", jint(cert.log_resolved.c1sq)}, {"c2", jint(cert.log_resolved.c2)}}}};
    j["bmy"] = json::array();
    for (const BmyRelation& rel : cert.bmy.relations)
        j["bmy"].push_back({{"label", rel.label},
                            {"lhs", jrat(rel.lhs)},
                            {"rhs", jrat(rel.rhs)},
                            {"pass", rel.pass}});
    j["pullback"] = json::object();
    for (auto& [name, v] : cert.pullback)
        j["pullback"][name] = jrat(v);
    j["nef"] = {{"positive", cert.nef.positive},
                {"zero", json::array()},
                {"negative", json::array()},
                {"untracked_not_verified", cert.nef.untracked_not_verified}};
    for (const NefEntry& ne : cert.nef.zero)
        j["nef"]["zero"].push_back({{"curve", ne.curve}, {"value", jrat(ne.value)}});
    for (const NefEntry& ne : cert.nef.negative)
        j["nef"]["negative"].push_back({{"curve", ne.curve}, {"value", jrat(ne.value)}});
    j["pi1"] = {{"gcd_indices", jint(cert.pi1.gcd_indices)},
                {"certified", cert.pi1.certified},
                {"note", cert.pi1.note},
                {"connectors", json::array()}};
    for (const Pi1Connector& con : cert.pi1.connectors)
        j["pi1"]["connectors"].push_back({{"curve", con.curve},
                                          {"exponent_a", jint(con.exponent_a)},
                                          {"exponent_b", jint(con.exponent_b)},
                                          {"gcd_a", jint(con.gcd_a)},
                                          {"gcd_b", jint(con.gcd_b)}});
    j["obstruction"] = {{"h2_minus_h1", cert.h2_minus_h1}};
    if (cert.kernel_dim)
        j["obstruction"]["kernel_dim"] = *cert.kernel_dim;
    j["assumptions"] = cert.assumptions;
    return j.dump(2) + "\n";
}

} // namespace wahl
