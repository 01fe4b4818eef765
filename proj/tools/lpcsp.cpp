#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "lpcsp/corpus.hpp"
#include "lpcsp/gap.hpp"
#include "lpcsp/io.hpp"
#include "lpcsp/local_oracle.hpp"
#include "lpcsp/pipeline.hpp"
#include "lpcsp/robustness.hpp"
#include "lpcsp/rounding.hpp"

using namespace lpcsp;

namespace {

struct Common {
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string csv;
};

void add_seed(CLI::App* sub, Common& c) { sub->add_option("--seed", c.seed, "random seed")->capture_default_str(); }
void add_jobs(CLI::App* sub, Common& c) {
    sub->add_option("--jobs", c.jobs, "worker threads for independent trials")->check(CLI::PositiveNumber)->capture_default_str();
}
void add_csv(CLI::App* sub, Common& c) { sub->add_option("--csv", c.csv, "CSV output path (default stdout)"); }

// Accumulates a CSV table: a comment line with the command and its
// parameters, a header row with units, then rows.
class Table {
public:
    Table(const std::string& command, const std::vector<std::pair<std::string, std::string>>& params,
          const std::vector<std::string>& columns) {
        out_ << "# lpcsp " << command;
        for (const auto& [k, v] : params) out_ << ' ' << k << '=' << v;
        out_ << '\n';
        for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
    }
    template <class... Ts>
    void row(const Ts&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }
    void emit(const std::string& path) const {
        if (path.empty()) {
            std::cout << out_.str();
            return;
        }
        std::ofstream f(path);
        if (!f) throw Error(ErrorCode::Usage, "cannot write " + path);
        f << out_.str();
    }

private:
    static std::string cell(double x) { return format_double(x); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    template <class T>
    static std::string cell(const T& x) requires std::is_integral_v<T> { return std::to_string(x); }

    std::ostringstream out_;
};

std::string str(double x) { return format_double(x); }

// Runs body(i) for i in [0, count) on `jobs` threads; results are written
// by index so the output order never depends on scheduling.
void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
        pool.emplace_back([&, j] {
            try {
                for (int i = j; i < count; i += jobs) body(i);
            } catch (...) {
                errors[j] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::optional<double> brute_opt_if_small(const CspInstance& inst) {
    if (inst.n() * std::log2(static_cast<double>(inst.q())) > 22) return std::nullopt;
    return brute_force_opt(inst).value;
}

std::vector<std::vector<double>> oracle_marginals(const CspInstance& inst, double lp_eps) {
    ConstraintOracle o(inst);
    LocalLpOracle olp(o, lp_eps);
    return assemble_global(olp, inst).solution.x;
}

CspInstance load_or_named(const std::string& path) {
    if (path.empty() || path == "triangle") return triangle_instance();
    if (path == "single") return single_instance();
    return load_instance(path);
}

LpSolution exact_seed_solution(const CspInstance& inst) {
    auto sol = solve_basic_lp(inst);
    for (auto& row : sol.x)
        for (auto& e : row) e = std::max(0.0, e);
    for (auto& tab : sol.mu)
        for (auto& e : tab) e = std::max(0.0, e);
    return sol;
}

// ---- subcommands ----

void cmd_solve_lp(const std::string& path, const std::string& out, bool with_opt) {
    auto inst = load_instance(path);
    auto sol = solve_basic_lp(inst);
    std::cout << str(sol.value) << '\n';
    if (with_opt) std::cout << str(brute_force_opt(inst).value) << '\n';
    if (!out.empty()) write_json(out, solution_to_json(sol));
}

void cmd_pipeline_dump(const std::string& path, double eps, const std::string& stage, const std::string& out) {
    auto inst = load_instance(path);
    auto pp = PipelineParams::defaults(inst, eps);
    Json j;
    j["stage"] = stage;
    j["eps"] = eps;
    j["C"] = pp.C;
    if (stage == "lp2") {
        j["program"] = program_to_json(relax_basic_lp(inst, eps));
    } else {
        auto lp3 = to_packing(inst, pp);
        if (stage == "lp3") {
            j["program"] = program_to_json(lp3.lp);
        } else {
            auto pk = normalize_packing(lp3, inst.w(), pp.C);
            j["stats"] = {{"c_max", pk.stats.c_max},
                          {"gamma_p", pk.stats.gamma_p},
                          {"gamma_d", pk.stats.gamma_d},
                          {"delta_p", pk.stats.delta_p},
                          {"delta_d", pk.stats.delta_d}};
            j["program"] = program_to_json(pk.lp);
        }
    }
    if (out.empty())
        std::cout << j.dump(1) << '\n';
    else
        write_json(out, j);
}

struct LocalQuery {
    bool is_x = true;
    int v = 0, index = 0;
    std::int64_t value = 0;
    std::string name;
};

LocalQuery parse_local_name(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    LocalQuery q;
    q.name = s;
    try {
        if (parts.size() == 3 && parts[0] == "x") {
            q.v = std::stoi(parts[1]);
            q.value = std::stoll(parts[2]);
            return q;
        }
        if (parts.size() == 4 && parts[0] == "mu") {
            q.is_x = false;
            q.v = std::stoi(parts[1]);
            q.index = std::stoi(parts[2]);
            q.value = std::stoll(parts[3]);
            return q;
        }
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::Usage, "query names are x:v:a or mu:v:index:beta, got '" + s + "'");
}

void cmd_local_lp(const std::string& path, double eps, double kappa, int cap, const std::vector<std::string>& names,
                  bool assemble, const Common& c) {
    auto inst = load_instance(path);
    ConstraintOracle o(inst);
    auto pp = PipelineParams::defaults(inst, eps);
    LocalSolverParams sp;
    sp.eps = pp.eps_prime;
    sp.kappa = kappa;
    sp.round_cap = cap;
    LocalLpOracle olp(o, pp, sp);
    std::vector<LocalQuery> queries;
    for (const auto& n : names) queries.push_back(parse_local_name(n));
    if (assemble) {
        for (int v = 0; v < inst.n(); ++v)
            for (int a = 0; a < inst.q(); ++a) queries.push_back(parse_local_name("x:" + std::to_string(v) + ":" + std::to_string(a)));
        for (int id = 0; id < inst.num_constraints(); ++id) {
            const int v = inst.distinct_vars(id)[0];
            auto inc = inst.incident(v);
            const int index = static_cast<int>(std::find(inc.begin(), inc.end(), id) - inc.begin()) + 1;
            for (std::size_t b = 0; b < inst.payoff(id).size(); ++b)
                queries.push_back(parse_local_name("mu:" + std::to_string(v) + ":" + std::to_string(index) + ":" +
                                                   std::to_string(b)));
        }
    }
    if (queries.empty()) throw Error(ErrorCode::Usage, "give --query or --assemble");
    Table t("local-lp",
            {{"instance", path}, {"epsilon", str(eps)}, {"rounds_kappa", str(kappa)}, {"rounds", std::to_string(olp.rounds())}},
            {"name", "value[probability]", "query_cost[queries]"});
    for (const auto& q : queries) {
        const double val = q.is_x ? olp.query_x(q.v, static_cast<int>(q.value)) : olp.query_mu(q.v, q.index, q.value);
        t.row(q.name, val, olp.last_query_cost());
    }
    t.emit(c.csv);
}

void cmd_round(const std::string& path, double eps, double lp_eps, int trials, std::int64_t budget, const Common& c) {
    auto inst = load_instance(path);
    const auto x = oracle_marginals(inst, lp_eps);
    const auto opt = brute_opt_if_small(inst);
    struct Row {
        std::uint64_t seed;
        RoundingResult r;
        double value;
    };
    std::vector<Row> rows(trials);
    parallel_for(trials, c.jobs, [&](int i) {
        ConstraintOracle o(inst);
        RoundingParams p;
        p.eps = eps;
        p.budget = budget;
        rows[i].seed = derive_seed(c.seed, static_cast<std::uint64_t>(i));
        rows[i].r = round_csp(o, x, p, rows[i].seed);
        rows[i].value = evaluate(inst, unfold(rows[i].r.fold, rows[i].r.folded_argmax));
    });
    Table t("round", {{"instance", path}, {"epsilon", str(eps)}, {"lp_epsilon", str(lp_eps)}, {"seed", std::to_string(c.seed)}},
            {"trial", "trial_seed", "estimate[weight]", "value[weight]", "opt[weight]", "buckets", "query_cost[queries]"});
    for (int i = 0; i < trials; ++i)
        t.row(i, rows[i].seed, rows[i].r.estimate, rows[i].value, opt ? str(*opt) : std::string{},
              rows[i].r.fold.num_buckets(), rows[i].r.oracle_queries);
    t.emit(c.csv);
}

void cmd_test_sat(const std::string& path, double eps, double delta, const std::string& family, double lp_eps, int trials,
                  const Common& c) {
    auto inst = load_instance(path);
    if (!family.empty()) {
        auto d = family_delta(family, eps);
        if (!d) throw Error(ErrorCode::Usage, "family '" + family + "' has no valid delta: its gap curve is discontinuous at 1");
        delta = *d;
    }
    if (!(delta > 0)) throw Error(ErrorCode::Usage, "give --delta or --family");
    const auto x = oracle_marginals(inst, lp_eps);
    std::vector<TestOutcome> out(trials);
    std::vector<std::uint64_t> seeds(trials);
    parallel_for(trials, c.jobs, [&](int i) {
        ConstraintOracle o(inst);
        seeds[i] = derive_seed(c.seed, static_cast<std::uint64_t>(i));
        out[i] = test_satisfiability(o, x, eps, delta, seeds[i]);
    });
    Table t("test-sat", {{"instance", path}, {"epsilon", str(eps)}, {"delta", str(delta)}, {"seed", std::to_string(c.seed)}},
            {"trial", "trial_seed", "accept", "estimate[weight]", "threshold[weight]"});
    for (int i = 0; i < trials; ++i) t.row(i, seeds[i], out[i].accept ? 1 : 0, out[i].estimate, out[i].threshold);
    t.emit(c.csv);
}

void cmd_repair(const std::string& path, const std::string& sol_path, const std::string& out, const Common& c) {
    auto inst = load_instance(path);
    auto sol = load_solution(sol_path);
    auto rep = repair_to_feasible(inst, sol);
    if (!out.empty()) write_json(out, solution_to_json(rep.solution));
    Table t("repair", {{"instance", path}, {"solution", sol_path}}, {"quantity", "value"});
    t.row("eps_in", rep.eps_in);
    t.row("eps_surgery", rep.eps_surgery);
    t.row("delta", rep.delta);
    t.row("value_in", rep.value_in);
    t.row("value_out", rep.solution.value);
    t.row("loss", rep.loss);
    t.row("l1_bound", rep.l1_bound);
    t.row("kappa", rep.kappa);
    t.row("infeasibility_out", rep.infeasibility);
    t.emit(c.csv);
}

void cmd_gap_gen(const std::string& path, const std::string& mode, int N, int T, const std::string& out, const Common& c) {
    auto inst = load_or_named(path);
    GapParams p{N, T, c.seed};
    auto gap = mode == "lp" ? gen_lp_instance(inst, exact_seed_solution(inst), p) : gen_opt_instance(inst, p);
    if (out.empty())
        std::cout << gap_to_json(gap).dump(1) << '\n';
    else
        write_json(out, gap_to_json(gap));
}

void cmd_gap_verify(const std::string& path, const std::string& experiment, const std::vector<int>& Ns,
                    const std::vector<int>& Ts, int trials, double eps, const Common& c) {
    auto inst = load_or_named(path);
    const double wI = inst.total_weight();
    struct Job {
        int N, T, trial;
    };
    std::vector<Job> jobs;
    for (int N : Ns)
        for (int T : Ts)
            for (int i = 0; i < trials; ++i) jobs.push_back({N, T, i});
    const auto seed_of = [&](const Job& j) {
        return derive_seed(derive_seed(c.seed, static_cast<std::uint64_t>(j.N) * 1000003 + j.T), j.trial);
    };
    if (experiment == "opt") {
        const double olopt_i = brute_force_opt(inst).value / wI;
        std::vector<double> olopt(jobs.size());
        parallel_for(static_cast<int>(jobs.size()), c.jobs, [&](int k) {
            auto g = gen_opt_instance(inst, {jobs[k].N, jobs[k].T, seed_of(jobs[k])});
            olopt[k] = brute_force_opt(g.instance).value / g.instance.total_weight();
        });
        Table t("gap verify", {{"experiment", "opt"}, {"instance", path.empty() ? "triangle" : path}, {"epsilon", str(eps)},
                               {"seed", std::to_string(c.seed)}},
                {"N", "T", "trial", "olopt_J[ratio]", "olopt_I[ratio]", "within_eps"});
        for (std::size_t k = 0; k < jobs.size(); ++k)
            t.row(jobs[k].N, jobs[k].T, jobs[k].trial, olopt[k], olopt_i, olopt[k] <= olopt_i + eps ? 1 : 0);
        t.emit(c.csv);
        return;
    }
    if (experiment != "lp") throw Error(ErrorCode::Usage, "experiment is opt or lp");
    const auto sol = exact_seed_solution(inst);
    std::vector<double> val(jobs.size());
    std::vector<int> integral(jobs.size());
    parallel_for(static_cast<int>(jobs.size()), c.jobs, [&](int k) {
        const int N = jobs[k].N;
        auto g = gen_lp_instance(inst, sol, {N, jobs[k].T, seed_of(jobs[k])});
        val[k] = evaluate(g.instance, g.alpha);
        bool ok = true;
        for (const auto& tab : sol.mu)
            for (double e : tab) ok = ok && std::abs(e * N - std::round(e * N)) <= 1e-9;
        for (const auto& row : sol.x)
            for (double e : row) ok = ok && std::abs(e * N - std::round(e * N)) <= 1e-9;
        integral[k] = ok;
    });
    Table t("gap verify", {{"experiment", "lp"}, {"instance", path.empty() ? "triangle" : path},
                           {"seed", std::to_string(c.seed)}},
            {"N", "T", "trial", "val_alpha[weight]", "TN_lp[weight]", "deviation[weight]", "rounding_free", "olp_J[ratio]"});
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const double target = static_cast<double>(jobs[k].T) * jobs[k].N * sol.value;
        const double wJ = wI * jobs[k].T * jobs[k].N;
        t.row(jobs[k].N, jobs[k].T, jobs[k].trial, val[k], target, std::abs(val[k] - target), integral[k], val[k] / wJ);
    }
    t.emit(c.csv);
}

void cmd_gap_collide(const std::string& path, int N, int T, const std::vector<int>& taus, int trials, const Common& c) {
    auto inst = load_or_named(path);
    const auto sol = exact_seed_solution(inst);
    std::vector<CollisionReport> reps(taus.size());
    parallel_for(static_cast<int>(taus.size()), c.jobs, [&](int k) {
        reps[k] = collision_experiment(inst, sol, N, T, taus[k], trials, derive_seed(c.seed, static_cast<std::uint64_t>(taus[k])));
    });
    Table t("gap collide", {{"instance", path.empty() ? "triangle" : path}, {"N", std::to_string(N)}, {"T", std::to_string(T)},
                            {"seed", std::to_string(c.seed)}},
            {"tau[queries]", "trials", "collisions", "empirical[probability]", "bound[probability]", "mu[probability]"});
    for (std::size_t k = 0; k < taus.size(); ++k)
        t.row(taus[k], reps[k].trials, reps[k].collisions, reps[k].empirical, reps[k].bound, reps[k].mu);
    t.emit(c.csv);
}

void cmd_corpus_make(const std::string& kind, int count, const RandomCorpusParams& rp, const std::string& dir,
                     const Common& c) {
    std::filesystem::create_directories(dir);
    for (int i = 0; i < count; ++i) {
        const auto s = derive_seed(c.seed, static_cast<std::uint64_t>(i));
        CspInstance inst;
        if (kind == "random") {
            inst = random_instance(rp, s);
        } else if (kind == "horn" || kind == "contradictory-horn") {
            HornParams h;
            h.n = rp.n;
            h.s = rp.s;
            h.t = rp.t;
            inst = kind == "horn" ? planted_horn_instance(h, s) : contradictory_horn_instance(h, s);
        } else if (kind == "2sat") {
            inst = random_2sat_instance(rp.n, rp.t, s);
        } else if (kind == "triangle") {
            inst = triangle_instance();
        } else if (kind == "single") {
            inst = single_instance();
        } else {
            throw Error(ErrorCode::Usage, "unknown corpus kind: " + kind);
        }
        const auto file = (std::filesystem::path(dir) / (kind + "-" + std::to_string(i) + ".json")).string();
        write_json(file, instance_to_json(inst));
        std::cout << file << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LP-based CSP approximation and gap experiments"};
    app.require_subcommand(1);
    std::function<void()> run;
    Common c;

    std::string instance, out, solution, stage = "lp5", mode = "opt", experiment = "opt", family;
    double eps = 0.2, delta = 0, kappa = 1.0, lp_eps = 0.2;
    int cap = 64, trials = 1, N = 6, T = 1;
    std::int64_t budget = std::int64_t{1} << 20;
    bool with_opt = false, assemble = false;
    std::vector<std::string> names;
    std::vector<int> Ns{6}, Ts{32}, taus{4, 8, 16, 32};

    auto* solve = app.add_subcommand("solve-lp", "exact BasicLP value (and optional solution file)");
    solve->add_option("--instance", instance, "instance JSON")->required();
    solve->add_option("--out", out, "write the solution JSON here");
    solve->add_flag("--opt", with_opt, "also print the brute-force optimum");
    solve->callback([&] { run = [&] { cmd_solve_lp(instance, out, with_opt); }; });

    auto* pipeline = app.add_subcommand("pipeline", "LP transformations");
    pipeline->require_subcommand(1);
    auto* dump = pipeline->add_subcommand("dump", "emit the relaxed, complemented or packing LP as JSON");
    dump->add_option("--instance", instance)->required();
    dump->add_option("--epsilon", eps)->capture_default_str();
    dump->add_option("--stage", stage, "lp2, lp3 or lp5")->check(CLI::IsMember({"lp2", "lp3", "lp5"}))->capture_default_str();
    dump->add_option("--out", out);
    dump->callback([&] { run = [&] { cmd_pipeline_dump(instance, eps, stage, out); }; });

    auto* local = app.add_subcommand("local-lp", "query the constant-time LP oracle");
    local->add_option("--instance", instance)->required();
    local->add_option("--epsilon", eps)->capture_default_str();
    local->add_option("--rounds-kappa", kappa)->capture_default_str();
    local->add_option("--round-cap", cap)->check(CLI::PositiveNumber)->capture_default_str();
    local->add_option("--query", names, "x:v:a or mu:v:index:beta (repeatable)");
    local->add_flag("--assemble", assemble, "query every x and mu name");
    add_csv(local, c);
    local->callback([&] { run = [&] { cmd_local_lp(instance, eps, kappa, cap, names, assemble, c); }; });

    auto* round = app.add_subcommand("round", "folded-instance rounding with sampled estimates");
    round->add_option("--instance", instance)->required();
    double round_eps = 0.3;
    round->add_option("--epsilon", round_eps)->capture_default_str();
    round->add_option("--lp-epsilon", lp_eps, "accuracy of the LP oracle supplying the marginals")->capture_default_str();
    round->add_option("--trials", trials)->check(CLI::PositiveNumber)->capture_default_str();
    round->add_option("--budget", budget, "cap on folded assignments")->capture_default_str();
    add_seed(round, c);
    add_jobs(round, c);
    add_csv(round, c);
    round->callback([&] { run = [&] { cmd_round(instance, round_eps, lp_eps, trials, budget, c); }; });

    auto* tsat = app.add_subcommand("test-sat", "satisfiability tester");
    tsat->add_option("--instance", instance)->required();
    tsat->add_option("--epsilon", eps)->capture_default_str();
    tsat->add_option("--delta", delta, "gap-curve modulus");
    tsat->add_option("--family", family, "preset for delta: horn or 2sat");
    tsat->add_option("--lp-epsilon", lp_eps)->capture_default_str();
    tsat->add_option("--trials", trials)->check(CLI::PositiveNumber)->capture_default_str();
    add_seed(tsat, c);
    add_jobs(tsat, c);
    add_csv(tsat, c);
    tsat->callback([&] { run = [&] { cmd_test_sat(instance, eps, delta, family, lp_eps, trials, c); }; });

    auto* repair = app.add_subcommand("repair", "turn an approximately feasible LP solution into a feasible one");
    repair->add_option("--instance", instance)->required();
    repair->add_option("--solution", solution)->required();
    repair->add_option("--out", out, "write the repaired solution JSON here");
    add_csv(repair, c);
    repair->callback([&] { run = [&] { cmd_repair(instance, solution, out, c); }; });

    auto* gap = app.add_subcommand("gap", "gap-instance generators and experiments");
    gap->require_subcommand(1);
    auto* gen = gap->add_subcommand("gen", "sample a gap instance");
    gen->add_option("--seed-instance", instance, "instance JSON, or triangle / single")->capture_default_str();
    gen->add_option("--mode", mode)->check(CLI::IsMember({"opt", "lp"}))->capture_default_str();
    gen->add_option("--N", N)->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--T", T)->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--out", out);
    add_seed(gen, c);
    gen->callback([&] { run = [&] { cmd_gap_gen(instance, mode, N, T, out, c); }; });

    auto* verify = gap->add_subcommand("verify", "opt-side and lp-side gap experiments");
    verify->add_option("--experiment", experiment, "opt or lp")->check(CLI::IsMember({"opt", "lp"}))->capture_default_str();
    verify->add_option("--seed-instance", instance, "instance JSON, or triangle / single");
    verify->add_option("--N", Ns)->delimiter(',')->capture_default_str();
    verify->add_option("--T", Ts)->delimiter(',')->capture_default_str();
    int verify_trials = 30;
    verify->add_option("--trials", verify_trials)->check(CLI::PositiveNumber)->capture_default_str();
    double verify_eps = 0.15;
    verify->add_option("--epsilon", verify_eps)->capture_default_str();
    add_seed(verify, c);
    add_jobs(verify, c);
    add_csv(verify, c);
    verify->callback([&] { run = [&] { cmd_gap_verify(instance, experiment, Ns, Ts, verify_trials, verify_eps, c); }; });

    auto* collide = gap->add_subcommand("collide", "transcript-collision probability against the lazy process");
    collide->add_option("--seed-instance", instance, "instance JSON, or triangle / single");
    int collide_N = 10000, collide_T = 2;
    collide->add_option("--N", collide_N)->check(CLI::PositiveNumber)->capture_default_str();
    collide->add_option("--T", collide_T)->check(CLI::PositiveNumber)->capture_default_str();
    collide->add_option("--tau", taus, "probe lengths")->delimiter(',')->capture_default_str();
    int collide_trials = 1000;
    collide->add_option("--trials", collide_trials)->check(CLI::PositiveNumber)->capture_default_str();
    add_seed(collide, c);
    add_jobs(collide, c);
    add_csv(collide, c);
    collide->callback([&] { run = [&] { cmd_gap_collide(instance, collide_N, collide_T, taus, collide_trials, c); }; });

    auto* corpus = app.add_subcommand("corpus", "instance corpora");
    corpus->require_subcommand(1);
    auto* make = corpus->add_subcommand("make", "write instance files");
    std::string kind = "random", dir = "corpus";
    int count = 1;
    RandomCorpusParams rp;
    make->add_option("--kind", kind, "random, horn, contradictory-horn, 2sat, triangle, single")->capture_default_str();
    make->add_option("--count", count)->check(CLI::PositiveNumber)->capture_default_str();
    make->add_option("--n", rp.n)->capture_default_str();
    make->add_option("--q", rp.q)->capture_default_str();
    make->add_option("--s", rp.s)->capture_default_str();
    make->add_option("--t", rp.t)->capture_default_str();
    make->add_option("--w", rp.w)->capture_default_str();
    make->add_option("--out-dir", dir)->capture_default_str();
    add_seed(make, c);
    make->callback([&] { run = [&] { cmd_corpus_make(kind, count, rp, dir, c); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    try {
        if (run) run();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.is_budget() ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
