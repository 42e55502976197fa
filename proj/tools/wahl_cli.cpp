// wahl: verify boxed constructions, print configuration invariants,
// search for disjoint Wahl chains, and emit JSON certificates.
//
// Exit codes: 0 pass, 1 certification failure, 2 usage/infeasible,
// 3 internal error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wahl/blowup.hpp"
#include "wahl/certify.hpp"
#include "wahl/dsl.hpp"
#include "wahl/search.hpp"

namespace {

int resolve_threads(int flag_value) {
    if (flag_value > 0)
        return flag_value; // flag wins over environment
    if (const char* env = std::getenv("WAHL_THREADS")) {
        int v = std::atoi(env);
        if (v > 0)
            return v;
    }
    return 1;
}

// A box file names its base arena; resolve relative to the box file.
wahl::Arena load_base_arena(const std::filesystem::path& box_path,
                            const std::string& arena_name) {
    std::filesystem::path p = box_path.parent_path() / (arena_name + ".arena");
    return wahl::parse_arena(wahl::read_file(p.string()));
}

void print_human(const wahl::Certificate& cert) {
    std::cout << "box " << cert.box_id << ": " << cert.status
              << "  (blowups=" << cert.blowups << ", K_X^2=" << cert.kx2
              << ", K_W^2=" << cert.kw2 << ", chi=" << cert.chi_o
              << ", b+=" << cert.b_plus << ", b-=" << cert.b_minus
              << ", parity=" << cert.parity
              << ", pi1=" << (cert.pi1.certified ? "certified" : "inconclusive")
              << ")\n";
    for (const auto& v : cert.violations)
        std::cout << "  violation: " << v << "\n";
}

int cmd_verify(const std::vector<std::string>& paths, bool json_out) {
    bool all_pass = true;
    for (const std::string& path : paths) {
        wahl::BoxExample box = wahl::parse_box(wahl::read_file(path));
        wahl::Arena z = load_base_arena(path, box.arena_name);
        wahl::Certificate cert = wahl::certify(z, box);
        if (json_out)
            std::cout << wahl::emit_report(cert);
        else
            print_human(cert);
        if (cert.status != "pass") {
            all_pass = false;
            if (!json_out && !cert.violations.empty())
                std::cerr << path << ": " << cert.violations.front() << "\n";
        }
    }
    return all_pass ? 0 : 1;
}

int cmd_invariants(const std::string& arena_path,
                   const std::vector<std::string>& subset_names, bool json_out) {
    wahl::Arena z = wahl::parse_arena(wahl::read_file(arena_path));
    if (subset_names.empty()) {
        std::cerr << "invariants: empty subset\n";
        return 2;
    }
    std::vector<int> subset;
    for (const std::string& n : subset_names)
        subset.push_back(z.require_curve(n));
    wahl::Census c = wahl::census(z, subset);
    wahl::PK pk = wahl::pk(z, subset);
    wahl::LogChern lf = wahl::log_chern_formula(z, subset);
    wahl::LogChern lr = wahl::log_chern_resolved(z, subset);
    if (json_out) {
        nlohmann::ordered_json j;
        j["schema"] = "wahl-report/1";
        j["census"] = {{"r", c.r}, {"nu", c.nu}};
        for (auto& [k, v] : c.t)
            j["census"]["t"][std::to_string(k)] = v;
        j["pk"] = {{"P", pk.P}, {"K", pk.K}};
        j["log_chern"] = {{"formula",
                           {{"c1sq", lf.c1sq.str()},
                            {"c2", lf.c2.str()},
                            {"applicable", lf.applicable}}},
                          {"resolved",
                           {{"c1sq", lr.c1sq.str()}, {"c2", lr.c2.str()}}}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "r=" << c.r << " nu=" << c.nu;
        for (auto& [k, v] : c.t)
            std::cout << " t" << k << "=" << v;
        std::cout << "\n(P,K) = (" << pk.P << "," << pk.K << ")\n";
        std::cout << "log Chern (formula):  (" << lf.c1sq << "," << lf.c2 << ")"
                  << (lf.applicable ? "" : "  [not applicable in this regime]")
                  << "\n";
        std::cout << "log Chern (resolved): (" << lr.c1sq << "," << lr.c2 << ")\n";
    }
    return 0;
}

int cmd_search(const std::string& box_path, int threads, long long target_override,
               int max_len, bool no_prune, bool json_out) {
    wahl::BoxExample box = wahl::parse_box(wahl::read_file(box_path));
    wahl::Arena z = load_base_arena(box_path, box.arena_name);

    wahl::SearchProblem problem;
    problem.arena = wahl::replay(z, box.directives);
    problem.ell = 2;
    problem.target_k2 = target_override ? target_override : box.target_k2;
    problem.max_len = max_len;
    problem.prune = !no_prune;
    problem.threads = threads;

    auto t0 = std::chrono::steady_clock::now();
    wahl::SearchOutcome outcome = wahl::search(problem);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();

    if (!outcome.feasible) {
        std::cerr << "search: " << outcome.diagnostic << "\n";
        return 2;
    }
    if (json_out) {
        nlohmann::ordered_json j;
        j["schema"] = "wahl-report/1";
        j["box"] = box.id;
        j["target_k2"] = problem.target_k2;
        j["threads"] = threads;
        j["elapsed_ms"] = ms;
        j["results"] = nlohmann::ordered_json::array();
        for (const wahl::SearchResult& r : outcome.results) {
            nlohmann::ordered_json jr;
            jr["key"] = r.key;
            jr["chains"] = nlohmann::ordered_json::array();
            for (const wahl::RealizedChain& ch : r.chains) {
                nlohmann::ordered_json jc;
                jc["n"] = ch.params.n.str();
                jc["a"] = ch.params.a.str();
                jc["curves"] = nlohmann::ordered_json::array();
                for (int c : ch.curves)
                    jc["curves"].push_back(problem.arena.curves[c].name);
                jr["chains"].push_back(jc);
            }
            j["results"].push_back(jr);
        }
        std::cout << j.dump(2) << "\n";
    } else {
        for (const wahl::SearchResult& r : outcome.results) {
            std::cout << "hit:";
            for (const wahl::RealizedChain& ch : r.chains) {
                std::cout << "  (" << ch.params.n << "," << ch.params.a << ") [";
                for (std::size_t i = 0; i < ch.curves.size(); ++i)
                    std::cout << (i ? "," : "")
                              << problem.arena.curves[ch.curves[i]].name;
                std::cout << "]";
            }
            std::cout << "\n";
        }
        std::cout << outcome.results.size() << " result(s) in " << ms << " ms on "
                  << threads << " thread(s)\n";
    }
    return 0;
}

int cmd_report(const std::vector<std::string>& paths) {
    // Like verify, but always JSON, and an exit code of 0 even on failing
    // certificates (the report itself is the product).
    for (const std::string& path : paths) {
        wahl::BoxExample box = wahl::parse_box(wahl::read_file(path));
        wahl::Arena z = load_base_arena(path, box.arena_name);
        std::cout << wahl::emit_report(wahl::certify(z, box));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact certificates for Wahl-chain surface constructions"};
    app.require_subcommand(1);

    bool json_out = false;
    int threads_flag = 0;
    app.add_flag("--json", json_out, "emit JSON instead of human-readable text");
    app.add_option("--threads", threads_flag,
                   "worker threads (overrides WAHL_THREADS)");

    std::vector<std::string> verify_paths;
    CLI::App* verify = app.add_subcommand("verify", "certify box files");
    verify->add_option("paths", verify_paths, "box files (.wahlbox)")->required();

    std::string inv_arena;
    std::vector<std::string> inv_subset;
    CLI::App* invariants =
        app.add_subcommand("invariants", "census, P/K, log Chern for a subset");
    invariants->add_option("arena", inv_arena, "arena file")->required();
    invariants->add_option("curves", inv_subset, "curve names");

    std::string search_box;
    long long search_target = 0;
    int search_max_len = 64;
    bool no_prune = false;
    long long budget = 0;
    CLI::App* search_cmd =
        app.add_subcommand("search", "rediscover disjoint Wahl chain pairs");
    search_cmd->add_option("box", search_box, "box file defining arena + replay")
        ->required();
    search_cmd->add_option("--target", search_target, "override target K^2");
    search_cmd->add_option("--max-len", search_max_len, "per-chain length cap");
    search_cmd->add_flag("--no-prune", no_prune, "disable pruning rules");
    search_cmd->add_option("--budget", budget,
                           "extra blow-up budget (0 = replay only)");

    std::vector<std::string> report_paths;
    CLI::App* report = app.add_subcommand("report", "emit JSON certificates");
    report->add_option("paths", report_paths, "box files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        int threads = resolve_threads(threads_flag);
        if (verify->parsed())
            return cmd_verify(verify_paths, json_out);
        if (invariants->parsed())
            return cmd_invariants(inv_arena, inv_subset, json_out);
        if (search_cmd->parsed()) {
            if (budget != 0) {
                std::cerr << "search: nonzero blow-up budget not supported; "
                             "replay the directives instead\n";
                return 2;
            }
            return cmd_search(search_box, threads, search_target, search_max_len,
                              no_prune, json_out);
        }
        if (report->parsed())
            return cmd_report(report_paths);
        return 2;
    } catch (const wahl::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const wahl::hj_input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const wahl::replay_error& e) {
        std::cerr << "replay error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
