#include "lpcsp/io.hpp"

#include <charconv>
#include <fstream>

namespace lpcsp {

Json instance_to_json(const CspInstance& inst) {
    Json j;
    j["q"] = inst.q();
    j["s"] = inst.s();
    j["t"] = inst.t();
    j["w"] = inst.w();
    j["n"] = inst.n();
    j["predicates"] = Json::array();
    for (const auto& p : inst.predicates()) {
        Json tt = Json::array();
        for (auto e : p.truth_table) tt.push_back(static_cast<int>(e));
        j["predicates"].push_back({{"name", p.name}, {"arity", p.arity}, {"truth_table", tt}});
    }
    j["constraints"] = Json::array();
    for (int id = 0; id < inst.num_constraints(); ++id) {
        const auto& c = inst.constraint(id);
        j["constraints"].push_back({{"predicate", c.predicate}, {"scope", c.scope}, {"weight", c.weight}});
    }
    if (CspInstance::build(inst.spec()).degree_index() != inst.degree_index()) j["degree_index"] = inst.degree_index();
    return j;
}

CspInstance instance_from_json(const Json& j) {
    try {
        InstanceSpec s;
        s.q = j.at("q").get<int>();
        s.s = j.at("s").get<int>();
        s.t = j.at("t").get<int>();
        s.w = j.at("w").get<double>();
        s.n = j.at("n").get<int>();
        for (const auto& p : j.at("predicates")) {
            Predicate pr;
            pr.name = p.value("name", std::string{});
            pr.arity = p.at("arity").get<int>();
            for (const auto& e : p.at("truth_table")) {
                const int bit = e.get<int>();
                if (bit != 0 && bit != 1) throw Error(ErrorCode::BadTruthTableLength, "truth table entries must be 0 or 1");
                pr.truth_table.push_back(static_cast<std::uint8_t>(bit));
            }
            s.predicates.push_back(std::move(pr));
        }
        for (const auto& c : j.at("constraints"))
            s.constraints.push_back(
                {c.at("predicate").get<int>(), c.at("scope").get<std::vector<int>>(), c.value("weight", 1.0)});
        for (const auto& c : s.constraints)
            for (int v : c.scope)
                if (v < 0 || v >= s.n) throw Error(ErrorCode::BadInstance, "scope variable out of range");
        if (j.contains("degree_index"))
            return CspInstance::build_with_index(std::move(s), j.at("degree_index").get<std::vector<std::vector<int>>>());
        return CspInstance::build(std::move(s));
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::BadInstance, std::string("instance file: ") + e.what());
    }
}

Json solution_to_json(const LpSolution& sol) {
    Json j;
    j["value"] = sol.value;
    j["x"] = sol.x;
    j["mu"] = Json::array();
    for (std::size_t id = 0; id < sol.mu.size(); ++id) j["mu"].push_back({{"constraint", id}, {"table", sol.mu[id]}});
    return j;
}

LpSolution solution_from_json(const Json& j) {
    try {
        LpSolution sol;
        sol.value = j.value("value", 0.0);
        sol.x = j.at("x").get<std::vector<std::vector<double>>>();
        const auto& mu = j.at("mu");
        sol.mu.resize(mu.size());
        for (const auto& e : mu) {
            const auto id = e.at("constraint").get<std::size_t>();
            if (id >= sol.mu.size()) throw Error(ErrorCode::Usage, "solution names an unknown constraint");
            sol.mu[id] = e.at("table").get<std::vector<double>>();
        }
        return sol;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::Usage, std::string("solution file: ") + e.what());
    }
}

Json gap_to_json(const GapInstance& gap) {
    Json j = instance_to_json(gap.instance);
    j["mode"] = gap.mode == GapMode::Opt ? "opt" : "lp";
    j["N"] = gap.N;
    j["T"] = gap.T;
    j["label"] = gap.label;
    j["origin"] = gap.origin;
    if (!gap.alpha.empty()) j["alpha"] = gap.alpha;
    return j;
}

Json program_to_json(const LinearProgram& lp) {
    Json j;
    j["columns"] = Json::array();
    for (int c = 0; c < lp.num_columns(); ++c)
        j["columns"].push_back({{"label", c < static_cast<int>(lp.labels.size()) ? lp.labels[c] : std::string{}},
                                {"objective", lp.objective[c]}});
    j["rows"] = Json::array();
    for (const auto& r : lp.rows) {
        Json coeffs = Json::array();
        for (const auto& [c, a] : r.coeffs) coeffs.push_back({c, a});
        const char* cmp = r.cmp == Comparator::Le ? "<=" : r.cmp == Comparator::Ge ? ">=" : "=";
        j["rows"].push_back({{"label", r.label}, {"cmp", cmp}, {"rhs", r.rhs}, {"coeffs", coeffs}});
    }
    return j;
}

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Usage, "cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::BadInstance, path + ": " + e.what());
    }
}

void write_json(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Usage, "cannot write " + path);
    out << j.dump(1) << '\n';
}

CspInstance load_instance(const std::string& path) { return instance_from_json(read_json(path)); }
LpSolution load_solution(const std::string& path) { return solution_from_json(read_json(path)); }

std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    std::string s(buf, end);
    if (s.find_first_of(".en") == std::string::npos) s += ".0";
    return s;
}

}  // namespace lpcsp
