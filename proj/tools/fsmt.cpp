// fsmt command-line front end: gen, solve, verify, oracle, export, score.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "fsmt/fsmt.hpp"

namespace {

using namespace fsmt;

constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitUnknown = 0;
constexpr int kExitError = 1;
constexpr int kExitViolated = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("write to '" + path + "' failed");
}

Formula load_formula(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return parse_instance(text);
    } catch (const ParseError& e) {
        throw Error(path + ": " + e.what());
    }
}

std::vector<double> parse_schedule(const std::string& spec) {
    const auto c1 = spec.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
    if (c2 == std::string::npos) throw InvalidArgument("--sigma-schedule expects from:to:step");
    auto num = [&](std::string_view s) {
        const auto v = detail::parse_plain_number(s);
        if (!v) throw InvalidArgument("bad number in --sigma-schedule: '" + std::string(s) + "'");
        return *v;
    };
    const std::string_view sv(spec);
    return sigma_schedule(num(sv.substr(0, c1)), num(sv.substr(c1 + 1, c2 - c1 - 1)), num(sv.substr(c2 + 1)));
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
    std::string family;
    std::string out;
    std::string meta_out;
    std::string smt2_out;
    std::uint64_t seed = 0;
    RandomSpec random;
    SchedulingSpec sched;
    PlacementSpec place;
    std::optional<std::uint32_t> card_threshold;
    bool no_bounds = false;
};

int cmd_gen(const GenArgs& g) {
    Formula f;
    std::optional<nlohmann::json> meta;
    if (g.family == "random") {
        RandomSpec s = g.random;
        s.seed = g.seed;
        s.card_threshold = g.card_threshold;
        f = gen_random(s);
    } else if (g.family == "scheduling") {
        SchedulingSpec s = g.sched;
        s.seed = g.seed;
        s.implied_bounds = !g.no_bounds;
        auto r = gen_scheduling(s);
        f = std::move(r.formula);
        meta = to_json(r.meta);
    } else {
        PlacementSpec s = g.place;
        s.seed = g.seed;
        auto r = gen_placement(s);
        f = std::move(r.formula);
        meta = to_json(r.meta);
    }
    write_file(g.out, serialize_instance(f));
    if (meta) {
        std::string path = g.meta_out;
        if (path.empty() && g.out != "-") path = g.out + ".meta.json";
        if (!path.empty()) write_file(path, meta->dump(2) + "\n");
    }
    if (!g.smt2_out.empty()) write_file(g.smt2_out, export_smt2(f));
    return 0;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
    std::string file;
    SolverConfig cfg;
    std::string eta_mode = "lipschitz";
    std::string backend = "auto";
    std::string schedule;
    std::string log;
    std::string dump_bdd;
    std::string emit_smt2;
    std::string out;
};

nlohmann::json stage_json(const StageRecord& s) {
    return {{"restart", s.restart},         {"stage", s.stage},
            {"sigma", s.sigma},             {"eta", s.eta},
            {"iters", s.iters},             {"converged", s.converged},
            {"grad_norm", s.grad_norm},     {"objective", s.objective},
            {"unsat_count", s.unsat_count}, {"weights_digest", s.weights_digest},
            {"wall_ms", s.wall_ms}};
}

int cmd_solve(SolveArgs a) {
    const Formula f = load_formula(a.file);
    SolverConfig& cfg = a.cfg;
    static const std::map<std::string, EtaMode> modes{
        {"fixed", EtaMode::Fixed}, {"lipschitz", EtaMode::Lipschitz}, {"backtracking", EtaMode::Backtracking}};
    static const std::map<std::string, Backend> backends{
        {"auto", Backend::Auto}, {"xbdd", Backend::Xbdd}, {"symmetric", Backend::Symmetric}};
    cfg.eta_mode = modes.at(a.eta_mode);
    cfg.backend = backends.at(a.backend);
    if (!a.schedule.empty()) cfg.schedule = parse_schedule(a.schedule);
    cfg.validate();

    if (!a.emit_smt2.empty()) write_file(a.emit_smt2, export_smt2(f));
    const CompiledFormula cf(f, cfg.backend, cfg.unit_atoms_in_objective, cfg.threads, cfg.node_cap);
    if (!a.dump_bdd.empty()) {
        std::ostringstream os;
        for (std::size_t c = 0; c < f.constraints.size(); ++c) {
            const std::string name = "c" + std::to_string(c);
            if (const Xbdd* d = cf.diagram(c))
                os << to_dot(*d, name);
            else
                os << to_dot(compile(f.constraints[c], {}, cfg.node_cap), name);
        }
        write_file(a.dump_bdd, os.str());
    }

    std::ofstream log;
    if (!a.log.empty()) {
        log.open(a.log);
        if (!log) throw Error("cannot write '" + a.log + "'");
    }
    StageLogger logger;
    if (log.is_open()) logger = [&](const StageRecord& s) { log << stage_json(s).dump() << '\n'; };

    const SolveResult r = anneal_solve(cf, cfg, logger);
    std::ostringstream res;
    if (r.status == Status::Sat) {
        // Never print a model that does not evaluate to -sum(w).
        const auto ev = eval_formula(f, r.assignment);
        if (!ev.all_satisfied()) throw Error("internal error: model failed exact verification");
        res << "s SATISFIABLE\n" << format_assignment(r.assignment);
    } else {
        res << "s UNKNOWN\n";
    }
    if (log.is_open()) {
        log << nlohmann::json{{"result", r.status == Status::Sat ? "sat" : (r.timed_out ? "timeout" : "unknown")},
                              {"unsat_count", r.unsat_count},
                              {"restarts_run", r.restarts_run},
                              {"stages_run", r.stages_run},
                              {"total_iters", r.total_iters},
                              {"seconds", r.seconds}}
                   .dump()
            << '\n';
    }
    std::cout << res.str() << std::flush;
    if (!a.out.empty()) write_file(a.out, res.str());
    return r.status == Status::Sat ? kExitSat : kExitUnknown;
}

// ---------------------------------------------------------------------------
// verify / oracle / export / score

int cmd_verify(const std::string& file, const std::string& asg_file, const std::string& domain) {
    const Formula f = load_formula(file);
    Assignment asg;
    try {
        asg = parse_assignment(read_file(asg_file));
    } catch (const ParseError& e) {
        throw Error(asg_file + ": " + e.what());
    }
    const auto ev = eval_formula(f, asg);
    bool ok = ev.all_satisfied();
    std::cout << "c objective " << format_double(ev.objective) << " target " << format_double(-f.total_weight())
              << '\n';
    for (std::size_t c = 0; c < ev.satisfied.size(); ++c)
        if (!ev.satisfied[c]) std::cout << "c violated constraint " << c << '\n';
    if (!domain.empty()) {
        const auto meta = nlohmann::json::parse(read_file(domain));
        const auto rep = verify_domain(meta, asg);
        for (const auto& v : rep.violations) std::cout << "c domain: " << v << '\n';
        if (rep.ok() != ok) std::cout << "c warning: domain check and formula check disagree\n";
        ok = ok && rep.ok();
    }
    std::cout << (ok ? "s VERIFIED\n" : "s VIOLATED\n");
    return ok ? 0 : kExitViolated;
}

int cmd_oracle(const std::string& file) {
    const Formula f = load_formula(file);
    const auto r = brute_force_sat(f);
    if (!r.sat) {
        std::cout << "s UNSATISFIABLE\n";
        return kExitUnsat;
    }
    std::cout << "s SATISFIABLE\n" << format_assignment(r.witness);
    return kExitSat;
}

int cmd_score(const std::string& csv, double T) {
    const auto runs = parse_run_records(read_file(csv));
    std::cout << "solver,par2,runs\n";
    std::map<std::string, std::size_t> counts;
    for (const auto& r : runs) ++counts[r.solver];
    for (const auto& [name, v] : par2_by_solver(runs, T))
        std::cout << detail::csv_field(name) << ',' << format_double(v) << ',' << counts[name] << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fsmt: continuous local search for SMT over linear real arithmetic"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fsmt 0.1.0");

    // gen
    GenArgs g;
    auto* gen = app.add_subcommand("gen", "generate a benchmark instance");
    gen->add_option("family", g.family, "random | scheduling | placement")
        ->required()
        ->check(CLI::IsMember({"random", "scheduling", "placement"}));
    gen->add_option("-o,--output", g.out, "instance file ('-' for stdout)")->required();
    gen->add_option("--seed", g.seed, "generator seed");
    gen->add_option("--meta", g.meta_out, "metadata sidecar (default <output>.meta.json)");
    gen->add_option("--emit-smt2", g.smt2_out, "also write the SMT-LIB2 twin");
    gen->add_option("--n", g.random.n, "random: scale n (>= 50)");
    gen->add_option("--atom-arity", g.random.atom_arity, "random: reals per atom");
    gen->add_option("--max-coeff", g.random.max_coeff, "random: coefficient magnitude bound");
    gen->add_option("--card-threshold", g.card_threshold, "random: CARD threshold (default floor(l/2))");
    gen->add_option("--negation-prob", g.random.negation_prob, "random: literal negation probability");
    gen->add_option("--workers", g.sched.n_w, "scheduling: workers (power of two)");
    gen->add_option("--ratio", g.sched.r, "scheduling: jobs per worker");
    gen->add_option("--dep-prob", g.sched.dependency_prob, "scheduling: dependency probability");
    gen->add_option("--slack", g.sched.slack, "scheduling: added to the greedy cutoff");
    gen->add_flag("--no-implied-bounds", g.no_bounds, "scheduling: omit implied start-time bounds");
    gen->add_option("--macros", g.place.n_m, "placement: macros (power of two)");
    gen->add_option("--layers", g.place.n_l, "placement: layers (power of two)");

    // solve
    SolveArgs s;
    s.cfg.threads = default_threads();
    auto* solve = app.add_subcommand("solve", "run the annealed local search");
    solve->add_option("file", s.file, "HSMT instance")->required();
    solve->add_option("--eta", s.cfg.eta, "step size (fixed mode) or initial step (backtracking)");
    solve->add_option("--eta-mode", s.eta_mode, "fixed | lipschitz | backtracking")
        ->check(CLI::IsMember({"fixed", "lipschitz", "backtracking"}));
    solve->add_option("--eps", s.cfg.eps, "critical-point threshold");
    solve->add_option("--sigma-schedule", s.schedule, "from:to:step over 1/sigma (default 0.1:2.0:0.1)");
    solve->add_option("--max-iters", s.cfg.max_inner_iters, "PGD iterations per stage");
    solve->add_option("--restarts", s.cfg.restarts, "random restarts");
    solve->add_option("--seed", s.cfg.seed, "solver seed");
    solve->add_option("--time-limit", s.cfg.time_limit_s, "wall-clock limit in seconds (0: none)");
    solve->add_option("--threads", s.cfg.threads, "worker threads (default FSMT_THREADS or 1)");
    solve->add_option("--backend", s.backend, "auto | xbdd | symmetric")
        ->check(CLI::IsMember({"auto", "xbdd", "symmetric"}));
    solve->add_option("--rho", s.cfg.rho, "ERWA decay");
    solve->add_option("--gamma", s.cfg.gamma, "weight scaling base");
    solve->add_option("--tau", s.cfg.tau, "stages between weight updates");
    solve->add_option("--erwa-reset", s.cfg.erwa_reset_to, "history value after a weight update");
    solve->add_option("--snap-bits", s.cfg.snap_bits, "dyadic snapping of reals when rounding (0: off)");
    solve->add_flag("!--no-unit-objective", s.cfg.unit_atoms_in_objective,
                    "drop unit atoms from the objective (projection still enforces them)");
    solve->add_option("--log", s.log, "JSON-lines stage log");
    solve->add_option("--dump-bdd", s.dump_bdd, "write compiled diagrams as DOT");
    solve->add_option("--emit-smt2", s.emit_smt2, "write the SMT-LIB2 export");
    solve->add_option("-o,--output", s.out, "also write the result stream to a file");

    // verify
    std::string v_file, v_asg, v_domain;
    auto* verify = app.add_subcommand("verify", "check an assignment exactly");
    verify->add_option("file", v_file, "HSMT instance")->required();
    verify->add_option("assignment", v_asg, "file with v lines")->required();
    verify->add_option("--domain", v_domain, "benchmark metadata for the domain check");

    // oracle
    std::string o_file;
    auto* oracle = app.add_subcommand("oracle", "brute-force satisfiability (small instances)");
    oracle->add_option("file", o_file, "HSMT instance")->required();

    // export
    std::string e_file, e_out = "-";
    auto* exp = app.add_subcommand("export", "write SMT-LIB2");
    exp->add_option("file", e_file, "HSMT instance")->required();
    exp->add_option("-o,--output", e_out, "output file ('-' for stdout)");

    // score
    std::string sc_file;
    double sc_T = 0.0;
    auto* score = app.add_subcommand("score", "PAR-2 per solver from a run table");
    score->add_option("csv", sc_file, "run records")->required();
    score->add_option("-T,--time-limit", sc_T, "time limit T")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitError;
    }

    try {
        if (*gen) return cmd_gen(g);
        if (*solve) return cmd_solve(s);
        if (*verify) return cmd_verify(v_file, v_asg, v_domain);
        if (*oracle) return cmd_oracle(o_file);
        if (*exp) {
            write_file(e_out, export_smt2(load_formula(e_file)));
            return 0;
        }
        if (*score) return cmd_score(sc_file, sc_T);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
