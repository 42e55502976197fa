#include "wahl/search.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <thread>

namespace wahl {

namespace {

std::vector<std::vector<long long>> adjacency(const Arena& arena) {
    const std::size_t n = arena.curves.size();
    std::vector<std::vector<long long>> adj(n, std::vector<long long>(n, 0));
    for (const IncidencePoint& p : arena.points) {
        if (p.consumed)
            continue;
        for (std::size_t i = 0; i < p.branches.size(); ++i)
            for (std::size_t j = i + 1; j < p.branches.size(); ++j) {
                long long v = static_cast<long long>(p.branches[i].second) *
                              p.branches[j].second;
                adj[p.branches[i].first][p.branches[j].first] += v;
                adj[p.branches[j].first][p.branches[i].first] += v;
            }
    }
    return adj;
}

std::vector<int> canonical_curves(const std::vector<int>& curves) {
    std::vector<int> rev(curves.rbegin(), curves.rend());
    return std::min(curves, rev);
}

} // namespace

std::vector<RealizedChain> enumerate_chains(const Arena& arena, int max_len) {
    auto adj = adjacency(arena);
    std::vector<RealizedChain> out;
    std::vector<int> path;
    std::vector<Int> bracket;

    std::function<void()> dfs = [&]() {
        if (auto rec = bracket.empty() ? std::optional<WahlParams>{}
                                       : recognize_wahl(bracket)) {
            if (canonical_curves(path) == path) {
                RealizedChain rc;
                rc.curves = path;
                rc.bracket = bracket;
                rc.params = *rec;
                out.push_back(std::move(rc));
            }
        }
        if (static_cast<int>(path.size()) == max_len)
            return;
        for (std::size_t i = 0; i < arena.curves.size(); ++i) {
            const Curve& c = arena.curves[i];
            if (c.nodes != 0 || c.self_int > -2)
                continue;
            bool ok = true;
            for (std::size_t j = 0; j < path.size() && ok; ++j) {
                if (path[j] == static_cast<int>(i))
                    ok = false;
                else
                    ok = adj[path[j]][i] == (j + 1 == path.size() ? 1 : 0);
            }
            if (!ok)
                continue;
            path.push_back(static_cast<int>(i));
            bracket.push_back(Int(-c.self_int));
            dfs();
            path.pop_back();
            bracket.pop_back();
        }
    };
    // Seed every starting curve; dfs itself handles the empty prefix once.
    dfs();
    std::sort(out.begin(), out.end(),
              [](const RealizedChain& a, const RealizedChain& b) {
                  return a.curves < b.curves;
              });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const RealizedChain& a, const RealizedChain& b) {
                              return a.curves == b.curves;
                          }),
              out.end());
    return out;
}

std::string canonical_key(const std::vector<RealizedChain>& chains) {
    std::vector<std::vector<int>> norm;
    for (const RealizedChain& ch : chains)
        norm.push_back(canonical_curves(ch.curves));
    std::sort(norm.begin(), norm.end());
    std::ostringstream os;
    for (const auto& seq : norm) {
        os << '|';
        for (int c : seq)
            os << c << ',';
    }
    return os.str();
}

namespace {

// Numeric certificate for a candidate selection: chain shape, K_W^2,
// Noether integrality, canonical pullback, and nefness on tracked curves.
Certificate certify_numeric(const Arena& x, std::vector<RealizedChain> chains,
                            long long target_k2) {
    Certificate cert;
    cert.status = "fail";
    cert.kx2 = x.k2_current();
    cert.chi_top_x = x.chi_top_current();
    cert.chains = std::move(chains);
    for (const std::string& v : verify_chains(x, cert.chains))
        cert.violations.push_back("verify_chains: " + v);
    cert.kw2 = compute_kw2(x, cert.chains);
    if (cert.kw2 != target_k2)
        cert.violations.push_back("K_W^2 = " + std::to_string(cert.kw2) +
                                  ", target " + std::to_string(target_k2));
    try {
        Topology t = compute_topology(x, cert.chains, cert.kw2, x.ambient.pg,
                                      x.ambient.q_irr);
        cert.chi_top_w = t.chi_top_w;
        cert.chi_o = t.chi_o;
        cert.b_plus = t.b_plus;
        cert.b_minus = t.b_minus;
        cert.parity = t.parity;
    } catch (const std::exception& e) {
        cert.violations.push_back(std::string("topology: ") + e.what());
    }
    try {
        cert.pullback = pullback_canonical(x, cert.chains);
        cert.nef = nef_check(x, cert.chains, cert.pullback);
        for (const NefEntry& ne : cert.nef.negative) {
            std::ostringstream os;
            os << "nef: pi*K_W . " << ne.curve << " = " << ne.value;
            cert.violations.push_back(os.str());
        }
    } catch (const std::exception& e) {
        cert.violations.push_back(std::string("pullback: ") + e.what());
    }
    cert.pi1 = pi1_certificate(x, cert.chains);
    cert.assumptions = {"certified-numeric: tracked-curve checks only"};
    if (cert.violations.empty())
        cert.status = "pass";
    return cert;
}

} // namespace

SearchOutcome search(const SearchProblem& problem) {
    SearchOutcome out;
    const Arena& x = problem.arena;
    const long long total_len = problem.target_k2 - x.k2_current();
    if (problem.ell < 1 || problem.ell > 2) {
        out.feasible = false;
        out.diagnostic = "ell must be 1 or 2";
        return out;
    }
    if (total_len < problem.ell) {
        out.feasible = false;
        out.diagnostic = "infeasible: target K^2 " + std::to_string(problem.target_k2) +
                         " requires total chain length " + std::to_string(total_len) +
                         " < " + std::to_string(problem.ell) + " over K_X^2 = " +
                         std::to_string(x.k2_current());
        return out;
    }
    long long usable = 0;
    for (const Curve& c : x.curves)
        if (c.nodes == 0 && c.self_int <= -2)
            ++usable;
    if (total_len > usable) {
        out.feasible = false;
        out.diagnostic = "infeasible: target K^2 " + std::to_string(problem.target_k2) +
                         " requires total chain length " + std::to_string(total_len) +
                         " but only " + std::to_string(usable) +
                         " curves of self-intersection <= -2 are available";
        return out;
    }

    int cap = problem.max_len;
    if (problem.prune) {
        cap = std::min<long long>(cap, total_len - (problem.ell - 1));
        // For non-rational ambient surfaces, s <= 4 K_W^2 + 1.
        if (x.ambient.pg > 0 || x.ambient.q_irr > 0)
            cap = std::min<long long>(cap, 4 * problem.target_k2 + 1);
    }
    std::vector<RealizedChain> cands = enumerate_chains(x, cap);

    std::vector<std::vector<SearchResult>> buckets;
    if (problem.ell == 1) {
        buckets.resize(1);
        for (const RealizedChain& c : cands) {
            if (static_cast<long long>(c.curves.size()) != total_len)
                continue;
            Certificate cert = certify_numeric(x, {c}, problem.target_k2);
            if (cert.status == "pass")
                buckets[0].push_back({{c}, cert, canonical_key({c})});
        }
    } else {
        auto adj = adjacency(x);
        int nthreads = std::max(1, problem.threads);
        buckets.resize(nthreads);
        auto worker = [&](int tid) {
            for (std::size_t i = tid; i < cands.size();
                 i += static_cast<std::size_t>(nthreads)) {
                for (std::size_t j = i; j < cands.size(); ++j) {
                    if (static_cast<long long>(cands[i].curves.size() +
                                               cands[j].curves.size()) != total_len)
                        continue;
                    bool disjoint = true;
                    for (int a : cands[i].curves) {
                        for (int b : cands[j].curves)
                            if (a == b || adj[a][b] != 0) {
                                disjoint = false;
                                break;
                            }
                        if (!disjoint)
                            break;
                    }
                    if (!disjoint)
                        continue;
                    std::vector<RealizedChain> pair = {cands[i], cands[j]};
                    Certificate cert = certify_numeric(x, pair, problem.target_k2);
                    if (cert.status == "pass")
                        buckets[tid].push_back(
                            {std::move(pair), std::move(cert), canonical_key(
                                {cands[i], cands[j]})});
                }
            }
        };
        if (nthreads == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < nthreads; ++t)
                pool.emplace_back(worker, t);
            for (std::thread& t : pool)
                t.join();
        }
    }

    for (auto& b : buckets)
        for (SearchResult& r : b)
            out.results.push_back(std::move(r));
    std::sort(out.results.begin(), out.results.end(),
              [](const SearchResult& a, const SearchResult& b) { return a.key < b.key; });
    out.results.erase(std::unique(out.results.begin(), out.results.end(),
                                  [](const SearchResult& a, const SearchResult& b) {
                                      return a.key == b.key;
                                  }),
                      out.results.end());
    return out;
}

} // namespace wahl
