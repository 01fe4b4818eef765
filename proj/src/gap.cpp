#include "lpcsp/gap.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace lpcsp {

std::vector<int> apportion(const std::vector<double>& dist, int N) {
    if (N < 0) throw Error(ErrorCode::Usage, "N must be nonnegative");
    double total = 0;
    for (double e : dist) {
        if (e < -1e-12) throw Error(ErrorCode::NotADistribution, "negative entry");
        total += e;
    }
    if (std::abs(total - 1) > 1e-9) throw Error(ErrorCode::NotADistribution, "entries do not sum to 1");
    std::vector<int> counts(dist.size());
    std::vector<double> rem(dist.size());
    int given = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const double exact = std::max(0.0, dist[i]) * N;
        counts[i] = static_cast<int>(std::floor(exact + 1e-9));
        rem[i] = exact - counts[i];
        given += counts[i];
    }
    std::vector<std::size_t> order(dist.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b] + 1e-12; });
    for (std::size_t k = 0; given < N; k = (k + 1) % order.size(), ++given) ++counts[order[k]];
    return counts;
}

namespace {

struct GroupSpec {
    int count;
    std::int64_t beta;  // -1 in Opt mode
};

std::vector<GroupSpec> groups_for(const LpSolution* lp, int id, int N) {
    if (!lp) return {{N, -1}};
    auto counts = apportion(lp->mu[id], N);
    std::vector<GroupSpec> out;
    for (std::size_t b = 0; b < counts.size(); ++b)
        if (counts[b] > 0) out.push_back({counts[b], static_cast<std::int64_t>(b)});
    return out;
}

void check_params(const CspInstance& inst, int N, int T) {
    if (N < 1 || T < 1) throw Error(ErrorCode::Usage, "N and T must be positive");
    if (static_cast<std::int64_t>(inst.n()) * N > (std::int64_t{1} << 30) ||
        static_cast<std::int64_t>(inst.t()) * T > (std::int64_t{1} << 30))
        throw Error(ErrorCode::SizeLimit, "gap instance too large");
}

void check_seed_solution(const CspInstance& inst, const LpSolution& lp) {
    double eps;
    try {
        eps = infeasibility(inst, lp);
    } catch (const Error& e) {
        throw Error(ErrorCode::InfeasibleSeedSolution, e.what());
    }
    if (eps > 1e-9) throw Error(ErrorCode::InfeasibleSeedSolution, "seed solution is " + std::to_string(eps) + "-infeasible");
}

template <class Rng>
int uniform_below(Rng& rng, int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

GapInstance generate(const CspInstance& inst, const LpSolution* lp, const GapParams& p) {
    check_params(inst, p.N, p.T);
    if (lp) check_seed_solution(inst, *lp);
    const int n = inst.n(), m = inst.num_constraints(), q = inst.q(), N = p.N, T = p.T;
    std::mt19937_64 rng(p.seed);

    // Sub-instances J_P: per slot, local positions [0, N); copies of a
    // position are T consecutive entries.
    struct Local {
        int source;
        std::vector<int> pos;
    };
    std::vector<Local> cons;
    std::vector<std::vector<std::vector<std::vector<int>>>> at(m);
    std::vector<std::vector<std::vector<int>>> value(m);
    for (int id = 0; id < m; ++id) {
        const int k = inst.distinct_count(id);
        at[id].assign(k, std::vector<std::vector<int>>(N));
        value[id].assign(k, std::vector<int>(N, 0));
        int offset = 0;
        for (const auto& g : groups_for(lp, id, N)) {
            std::vector<std::vector<int>> perm(k, std::vector<int>(static_cast<std::size_t>(T) * g.count));
            for (auto& pm : perm) {
                std::iota(pm.begin(), pm.end(), 0);
                std::shuffle(pm.begin(), pm.end(), rng);
            }
            for (std::size_t r = 0; r < perm[0].size(); ++r) {
                Local c{id, std::vector<int>(k)};
                for (int slot = 0; slot < k; ++slot) {
                    c.pos[slot] = offset + perm[slot][r] / T;
                    at[id][slot][c.pos[slot]].push_back(static_cast<int>(cons.size()));
                }
                cons.push_back(std::move(c));
            }
            if (g.beta >= 0)
                for (int slot = 0; slot < k; ++slot)
                    for (int j = offset; j < offset + g.count; ++j) value[id][slot][j] = beta_digit(g.beta, slot, k, q);
            offset += g.count;
        }
    }

    // Merge: sigma[id][slot][pos] is the global copy index j of that position.
    std::vector<std::vector<std::vector<int>>> sigma(m);
    for (int id = 0; id < m; ++id) sigma[id].assign(inst.distinct_count(id), std::vector<int>(N));
    Assignment raw_alpha(static_cast<std::size_t>(n) * N, 0);
    for (int v = 0; v < n; ++v) {
        auto inc = inst.incident(v);
        std::vector<int> global_value(N, 0);
        if (lp) {
            std::vector<int> counts(q, 0);
            if (inc.empty()) {
                counts = apportion(lp->x[v], N);
            } else {
                const int slot = inst.slot_of(inc[0], v);
                for (int j = 0; j < N; ++j) ++counts[value[inc[0]][slot][j]];
            }
            int j = 0;
            for (int a = 0; a < q; ++a)
                for (int c = 0; c < counts[a]; ++c) global_value[j++] = a;
        }
        for (std::size_t b = 0; b < inc.size(); ++b) {
            const int id = inc[b];
            const int slot = inst.slot_of(id, v);
            auto& sg = sigma[id][slot];
            if (!lp) {
                std::iota(sg.begin(), sg.end(), 0);
                std::shuffle(sg.begin(), sg.end(), rng);
                continue;
            }
            std::vector<int> local_rest, global_rest;
            for (int a = 0; a < q; ++a) {
                std::vector<int> ls, gs;
                for (int j = 0; j < N; ++j) {
                    if (value[id][slot][j] == a) ls.push_back(j);
                    if (global_value[j] == a) gs.push_back(j);
                }
                std::shuffle(ls.begin(), ls.end(), rng);
                std::shuffle(gs.begin(), gs.end(), rng);
                const std::size_t both = std::min(ls.size(), gs.size());
                for (std::size_t i = 0; i < both; ++i) sg[ls[i]] = gs[i];
                local_rest.insert(local_rest.end(), ls.begin() + both, ls.end());
                global_rest.insert(global_rest.end(), gs.begin() + both, gs.end());
            }
            std::shuffle(global_rest.begin(), global_rest.end(), rng);
            for (std::size_t i = 0; i < local_rest.size(); ++i) sg[local_rest[i]] = global_rest[i];
        }
        for (int j = 0; j < N; ++j) raw_alpha[static_cast<std::size_t>(v) * N + j] = global_value[j];
    }

    GapInstance gap;
    gap.mode = lp ? GapMode::Lp : GapMode::Opt;
    gap.N = N;
    gap.T = T;
    gap.label.resize(static_cast<std::size_t>(n) * N);
    std::iota(gap.label.begin(), gap.label.end(), 0);
    std::shuffle(gap.label.begin(), gap.label.end(), rng);
    gap.origin.resize(gap.label.size());
    for (std::size_t r = 0; r < gap.label.size(); ++r) gap.origin[gap.label[r]] = static_cast<int>(r) / N;
    if (lp) {
        gap.alpha.resize(gap.label.size());
        for (std::size_t r = 0; r < gap.label.size(); ++r) gap.alpha[gap.label[r]] = raw_alpha[r];
    }

    // Index blocks: the i-th incidence of v owns indices T(i-1)+1..Ti.
    std::vector<std::vector<int>> index(gap.label.size());
    for (int v = 0; v < n; ++v) {
        auto inc = inst.incident(v);
        for (std::size_t b = 0; b < inc.size(); ++b) {
            const int id = inc[b];
            const int slot = inst.slot_of(id, v);
            for (int pos = 0; pos < N; ++pos) {
                auto list = at[id][slot][pos];
                std::shuffle(list.begin(), list.end(), rng);
                auto& dst = index[gap.label[static_cast<std::size_t>(v) * N + sigma[id][slot][pos]]];
                dst.insert(dst.end(), list.begin(), list.end());
            }
        }
    }

    InstanceSpec spec;
    spec.q = q;
    spec.s = inst.s();
    spec.t = inst.t() * T;
    spec.w = inst.w();
    spec.n = n * N;
    spec.predicates = inst.predicates();
    spec.constraints.reserve(cons.size());
    for (const auto& c : cons) {
        const auto& src = inst.constraint(c.source);
        Constraint out{src.predicate, {}, src.weight};
        auto dv = inst.distinct_vars(c.source);
        for (int slot : inst.scope_slots(c.source)) {
            const int u = dv[slot];
            out.scope.push_back(gap.label[static_cast<std::size_t>(u) * N + sigma[c.source][slot][c.pos[slot]]]);
        }
        spec.constraints.push_back(std::move(out));
    }
    gap.instance = CspInstance::build_with_index(std::move(spec), std::move(index));
    return gap;
}

}  // namespace

GapInstance gen_opt_instance(const CspInstance& seed_instance, const GapParams& params) {
    return generate(seed_instance, nullptr, params);
}

GapInstance gen_lp_instance(const CspInstance& seed_instance, const LpSolution& lp, const GapParams& params) {
    return generate(seed_instance, &lp, params);
}

CspInstance unpermuted(const GapInstance& gap) {
    const auto& J = gap.instance;
    std::vector<int> back(gap.label.size());
    for (std::size_t r = 0; r < gap.label.size(); ++r) back[gap.label[r]] = static_cast<int>(r);
    InstanceSpec spec = J.spec();
    for (auto& c : spec.constraints)
        for (int& u : c.scope) u = back[u];
    std::vector<std::vector<int>> index(J.n());
    for (int u = 0; u < J.n(); ++u) {
        auto inc = J.incident(u);
        index[back[u]].assign(inc.begin(), inc.end());
    }
    return CspInstance::build_with_index(std::move(spec), std::move(index));
}

CspInstance switch_constraints(const CspInstance& inst, int id1, int id2, const std::vector<bool>& swap) {
    const int m = inst.num_constraints();
    if (id1 < 0 || id2 < 0 || id1 >= m || id2 >= m || id1 == id2)
        throw Error(ErrorCode::Usage, "switch needs two different constraint ids");
    const int k = inst.distinct_count(id1);
    if (inst.constraint(id1).predicate != inst.constraint(id2).predicate || inst.distinct_count(id2) != k ||
        static_cast<int>(swap.size()) != k)
        throw Error(ErrorCode::ArityMismatch, "switch needs two copies of one predicate");
    auto d1 = inst.distinct_vars(id1), d2 = inst.distinct_vars(id2);
    std::vector<int> n1(d1.begin(), d1.end()), n2(d2.begin(), d2.end());
    for (int j = 0; j < k; ++j)
        if (swap[j]) std::swap(n1[j], n2[j]);
    for (const auto* nv : {&n1, &n2}) {
        auto sorted = *nv;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw Error(ErrorCode::Usage, "switch would repeat a variable inside one constraint");
    }
    // A variable in exactly one of the constraints moves its index entry to
    // whichever constraint now holds it.
    auto index = inst.degree_index();
    auto holds = [](const std::vector<int>& vs, int u) { return std::find(vs.begin(), vs.end(), u) != vs.end(); };
    std::vector<int> touched(n1.begin(), n1.end());
    touched.insert(touched.end(), n2.begin(), n2.end());
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int u : touched) {
        const bool was1 = holds(std::vector<int>(d1.begin(), d1.end()), u);
        const bool was2 = holds(std::vector<int>(d2.begin(), d2.end()), u);
        if (was1 == was2) continue;
        std::replace(index[u].begin(), index[u].end(), was1 ? id1 : id2, holds(n1, u) ? id1 : id2);
    }
    InstanceSpec spec = inst.spec();
    auto s1 = inst.scope_slots(id1), s2 = inst.scope_slots(id2);
    for (std::size_t i = 0; i < s1.size(); ++i) spec.constraints[id1].scope[i] = n1[s1[i]];
    for (std::size_t i = 0; i < s2.size(); ++i) spec.constraints[id2].scope[i] = n2[s2[i]];
    return CspInstance::build_with_index(std::move(spec), std::move(index));
}

ProcessState::ProcessState(const CspInstance& seed_instance, const LpSolution* lp, GapMode mode, int N, int T,
                           std::uint64_t seed)
    : seed_(&seed_instance), mode_(mode), N_(N), T_(T), rng_(seed) {
    const auto& inst = seed_instance;
    check_params(inst, N, T);
    const int n = inst.n(), m = inst.num_constraints(), q = inst.q();
    const LpSolution* use = nullptr;
    if (mode == GapMode::Lp) {
        if (!lp) throw Error(ErrorCode::Usage, "the Lp process needs a seed solution");
        check_seed_solution(inst, *lp);
        use = lp;
        vals_ = q;
    }
    cap_.assign(n * vals_, 0);
    for (int v = 0; v < n; ++v) {
        if (use) {
            auto c = apportion(use->x[v], N);
            for (int a = 0; a < q; ++a) cap_[class_of(v, a)] = c[a];
        } else {
            cap_[v] = N;
        }
    }
    filled_.assign(cap_.size(), 0);
    members_.assign(cap_.size(), {});

    groups_.resize(m);
    slots_.resize(m);
    for (int id = 0; id < m; ++id) {
        const int k = inst.distinct_count(id);
        int offset = 0;
        for (const auto& g : groups_for(use, id, N)) {
            groups_[id].push_back({g.count, offset, g.beta});
            offset += g.count;
        }
        slots_[id].resize(k);
        for (int slot = 0; slot < k; ++slot) {
            auto& s = slots_[id][slot];
            s.bound.assign(N, -1);
            s.used.assign(N, 0);
            s.unbound.resize(groups_[id].size());
            s.touched.resize(groups_[id].size());
            std::vector<int> per_value(vals_, 0);
            for (std::size_t g = 0; g < groups_[id].size(); ++g) {
                const auto& gr = groups_[id][g];
                for (int pos = gr.offset; pos < gr.offset + gr.count; ++pos) s.unbound[g].push_back(pos);
                per_value[value_of_position(id, slot, gr.offset)] += gr.count;
            }
            const int v = inst.distinct_vars(id)[slot];
            for (int a = 0; a < vals_; ++a)
                if (per_value[a] != cap_[class_of(v, a)])
                    throw Error(ErrorCode::Usage,
                                "apportioned class sizes disagree between constraints; choose N with mu* N integral");
        }
    }

    const std::size_t total = static_cast<std::size_t>(n) * N;
    rho_.assign(total, -1);
    unused_.resize(total);
    std::iota(unused_.begin(), unused_.end(), 0);
    unused_pos_ = unused_;
    binding_.resize(total);
    index_answer_.resize(total);
}

ProcessState ProcessState::star(const CspInstance& seed_instance, const LpSolution& lp, int N, int T,
                                std::uint64_t seed) {
    std::mt19937_64 coin(seed);
    const GapMode mode = std::bernoulli_distribution(0.5)(coin) ? GapMode::Lp : GapMode::Opt;
    return ProcessState(seed_instance, &lp, mode, N, T, derive_seed(seed, 1));
}

int ProcessState::value_of_position(int id, int slot, int pos) const {
    if (vals_ == 1) return 0;
    const auto& g = groups_[id][group_of(id, pos)];
    return beta_digit(g.beta, slot, seed_->distinct_count(id), seed_->q());
}

int ProcessState::group_of(int id, int pos) const {
    const auto& gs = groups_[id];
    for (std::size_t g = 0; g + 1 < gs.size(); ++g)
        if (pos < gs[g + 1].offset) return static_cast<int>(g);
    return static_cast<int>(gs.size()) - 1;
}

int ProcessState::block_of(int id, int v) const {
    auto inc = seed_->incident(v);
    return static_cast<int>(std::find(inc.begin(), inc.end(), id) - inc.begin());
}

void ProcessState::assign(int label, int cls) {
    rho_[label] = cls;
    ++filled_[cls];
    members_[cls].push_back(label);
    const int at = unused_pos_[label];
    const int last = unused_.back();
    unused_[at] = last;
    unused_pos_[last] = at;
    unused_.pop_back();
    const int v = cls / vals_;
    binding_[label].assign(seed_->degree(v), -1);
    index_answer_[label].assign(static_cast<std::size_t>(seed_->degree(v)) * T_, -1);
}

int ProcessState::fresh_label() { return unused_[uniform_below(rng_, static_cast<int>(unused_.size()))]; }

int ProcessState::random_unseen() {
    int total = 0;
    for (std::size_t c = 0; c < cap_.size(); ++c) total += cap_[c] - filled_[c];
    if (total == 0) throw Error(ErrorCode::Usage, "every variable has been seen");
    int r = uniform_below(rng_, total);
    int cls = 0;
    while (r >= cap_[cls] - filled_[cls]) {
        r -= cap_[cls] - filled_[cls];
        ++cls;
    }
    const int label = fresh_label();
    assign(label, cls);
    transcript_.push_back({label, 0, -1});
    return label;
}

int ProcessState::pick_label_for(int id, int slot, int value) {
    const int v = seed_->distinct_vars(id)[slot];
    const int block = block_of(id, v);
    const int cls = class_of(v, value);
    std::vector<int> seen_free;
    for (int u : members_[cls])
        if (binding_[u][block] < 0) seen_free.push_back(u);
    const int fresh = cap_[cls] - filled_[cls];
    const int r = uniform_below(rng_, static_cast<int>(seen_free.size()) + fresh);
    if (r < static_cast<int>(seen_free.size())) return seen_free[r];
    const int label = fresh_label();
    assign(label, cls);
    return label;
}

void ProcessState::bind(int id, int slot, int pos, int label) {
    auto& s = slots_[id][slot];
    s.bound[pos] = label;
    s.touched[group_of(id, pos)].push_back(pos);
    binding_[label][block_of(id, seed_->distinct_vars(id)[slot])] = pos;
}

int ProcessState::take_index(int label, int block) {
    std::vector<int> free;
    for (int p = block * T_; p < (block + 1) * T_; ++p)
        if (index_answer_[label][p] < 0) free.push_back(p);
    return free[uniform_below(rng_, static_cast<int>(free.size()))];
}

std::optional<ProcessConstraint> ProcessState::query(int v, int index) {
    if (v < 0 || v >= num_variables()) throw Error(ErrorCode::Usage, "variable out of range");
    if (index < 1 || index > degree_bound()) throw Error(ErrorCode::Usage, "index out of range");
    if (rho_[v] < 0) throw Error(ErrorCode::UnseenVariableQuery, "variable " + std::to_string(v) + " is unseen");
    TranscriptEntry entry{v, index, -1};
    auto& answers = index_answer_[v];
    if (index > static_cast<int>(answers.size())) {
        transcript_.push_back(entry);
        return std::nullopt;
    }
    if (answers[index - 1] >= 0) {
        entry.answer = answers[index - 1];
        transcript_.push_back(entry);
        return answers_[entry.answer];
    }

    const int origin = rho_[v] / vals_;
    const int block = (index - 1) / T_;
    const int id = seed_->incident(origin)[block];
    const int own = seed_->slot_of(id, origin);
    const int k = seed_->distinct_count(id);
    const int answer = static_cast<int>(answers_.size());

    int pos = binding_[v][block];
    if (pos < 0) {
        // A uniformly random unbound position of v's value in this slot.
        auto& s = slots_[id][own];
        const int value = rho_[v] % vals_;
        int total = 0;
        for (std::size_t g = 0; g < groups_[id].size(); ++g)
            if (value_of_position(id, own, groups_[id][g].offset) == value) total += static_cast<int>(s.unbound[g].size());
        int r = uniform_below(rng_, total);
        std::size_t g = 0;
        for (;; ++g) {
            if (value_of_position(id, own, groups_[id][g].offset) != value) continue;
            if (r < static_cast<int>(s.unbound[g].size())) break;
            r -= static_cast<int>(s.unbound[g].size());
        }
        pos = s.unbound[g][r];
        s.unbound[g][r] = s.unbound[g].back();
        s.unbound[g].pop_back();
        bind(id, own, pos, v);
    }
    const int group = group_of(id, pos);
    ++slots_[id][own].used[pos];
    answers[index - 1] = answer;

    std::vector<int> chosen(k, -1);
    chosen[own] = v;
    bool collided = false;
    for (int j = 0; j < k; ++j) {
        if (j == own) continue;
        auto& s = slots_[id][j];
        std::int64_t bound_weight = 0;
        for (int p : s.touched[group]) bound_weight += T_ - s.used[p];
        const std::int64_t z = bound_weight + static_cast<std::int64_t>(s.unbound[group].size()) * T_;
        std::int64_t r = std::uniform_int_distribution<std::int64_t>(0, z - 1)(rng_);
        int p = -1, label = -1;
        if (r < bound_weight) {
            for (int c : s.touched[group]) {
                r -= T_ - s.used[c];
                if (r < 0) {
                    p = c;
                    break;
                }
            }
            label = s.bound[p];
            collided = true;
        } else {
            auto& ub = s.unbound[group];
            const int at = uniform_below(rng_, static_cast<int>(ub.size()));
            p = ub[at];
            ub[at] = ub.back();
            ub.pop_back();
            const auto before = unused_.size();
            label = pick_label_for(id, j, value_of_position(id, j, p));
            if (unused_.size() == before) collided = true;
            bind(id, j, p, label);
        }
        ++s.used[p];
        const int b = block_of(id, seed_->distinct_vars(id)[j]);
        const int idx = take_index(label, b);
        index_answer_[label][idx] = answer;
        chosen[j] = label;
    }

    const auto& src = seed_->constraint(id);
    ProcessConstraint c{id, src.predicate, src.weight, {}, collided};
    for (int slot : seed_->scope_slots(id)) c.scope.push_back(chosen[slot]);
    answers_.push_back(c);
    entry.answer = answer;
    transcript_.push_back(entry);
    return c;
}

GapInstance ProcessState::complete() {
    const auto& inst = *seed_;
    const int n = inst.n(), N = N_, T = T_;

    // Remaining labels go to the remaining class capacity.
    std::vector<int> labels = unused_;
    std::shuffle(labels.begin(), labels.end(), rng_);
    std::size_t next = 0;
    for (std::size_t cls = 0; cls < cap_.size(); ++cls)
        while (filled_[cls] < cap_[cls]) assign(labels[next++], static_cast<int>(cls));

    for (int id = 0; id < inst.num_constraints(); ++id) {
        const int k = inst.distinct_count(id);
        for (int j = 0; j < k; ++j) {
            auto& s = slots_[id][j];
            const int v = inst.distinct_vars(id)[j];
            const int block = block_of(id, v);
            for (int a = 0; a < vals_; ++a) {
                std::vector<int> positions, free;
                for (std::size_t g = 0; g < groups_[id].size(); ++g)
                    if (value_of_position(id, j, groups_[id][g].offset) == a)
                        positions.insert(positions.end(), s.unbound[g].begin(), s.unbound[g].end());
                for (int u : members_[class_of(v, a)])
                    if (binding_[u][block] < 0) free.push_back(u);
                std::shuffle(free.begin(), free.end(), rng_);
                for (std::size_t i = 0; i < positions.size(); ++i) bind(id, j, positions[i], free[i]);
            }
            for (auto& ub : s.unbound) ub.clear();
        }
        for (std::size_t g = 0; g < groups_[id].size(); ++g) {
            const auto& gr = groups_[id][g];
            std::vector<std::vector<int>> copies(k);
            for (int j = 0; j < k; ++j) {
                for (int pos = gr.offset; pos < gr.offset + gr.count; ++pos)
                    for (int c = slots_[id][j].used[pos]; c < T; ++c) copies[j].push_back(pos);
                std::shuffle(copies[j].begin(), copies[j].end(), rng_);
            }
            for (std::size_t r = 0; r < copies[0].size(); ++r) {
                const int answer = static_cast<int>(answers_.size());
                std::vector<int> chosen(k);
                for (int j = 0; j < k; ++j) {
                    auto& s = slots_[id][j];
                    const int pos = copies[j][r];
                    const int label = s.bound[pos];
                    ++s.used[pos];
                    const int idx = take_index(label, block_of(id, inst.distinct_vars(id)[j]));
                    index_answer_[label][idx] = answer;
                    chosen[j] = label;
                }
                const auto& src = inst.constraint(id);
                ProcessConstraint c{id, src.predicate, src.weight, {}, false};
                for (int slot : inst.scope_slots(id)) c.scope.push_back(chosen[slot]);
                answers_.push_back(std::move(c));
                        }
        }
    }

    GapInstance gap;
    gap.mode = mode_;
    gap.N = N;
    gap.T = T;
    gap.origin.resize(rho_.size());
    for (std::size_t u = 0; u < rho_.size(); ++u) gap.origin[u] = rho_[u] / vals_;
    gap.label.resize(rho_.size());
    for (int v = 0; v < n; ++v) {
        std::vector<int> mine;
        for (int a = 0; a < vals_; ++a) mine.insert(mine.end(), members_[class_of(v, a)].begin(), members_[class_of(v, a)].end());
        std::sort(mine.begin(), mine.end());
        std::copy(mine.begin(), mine.end(), gap.label.begin() + static_cast<std::ptrdiff_t>(v) * N);
    }
    if (mode_ == GapMode::Lp) {
        gap.alpha.resize(rho_.size());
        for (std::size_t u = 0; u < rho_.size(); ++u) gap.alpha[u] = rho_[u] % vals_;
    }

    InstanceSpec spec;
    spec.q = inst.q();
    spec.s = inst.s();
    spec.t = inst.t() * T;
    spec.w = inst.w();
    spec.n = static_cast<int>(rho_.size());
    spec.predicates = inst.predicates();
    for (const auto& c : answers_) spec.constraints.push_back({c.predicate, c.scope, c.weight});
    gap.instance = CspInstance::build_with_index(std::move(spec), index_answer_);
    return gap;
}

double collision_bound(int tau, int s, double mu, int N) {
    const double denom = mu * N - static_cast<double>(tau) * s;
    if (!(denom > 0)) throw Error(ErrorCode::Usage, "collision bound needs tau s < mu N");
    return static_cast<double>(tau) * tau * s * s / denom;
}

CollisionReport collision_experiment(const CspInstance& seed_instance, const LpSolution& lp, int N, int T, int tau,
                                     int trials, std::uint64_t seed) {
    if (tau < 0 || trials < 1) throw Error(ErrorCode::Usage, "need tau >= 0 and trials >= 1");
    CollisionReport rep;
    rep.mu = 1.0;
    for (const auto& tab : lp.mu)
        for (double e : tab)
            if (e > 1e-12) rep.mu = std::min(rep.mu, e);
    rep.bound = collision_bound(tau, seed_instance.s(), rep.mu, N);
    rep.trials = trials;
    for (int trial = 0; trial < trials; ++trial) {
        auto st = ProcessState::star(seed_instance, lp, N, T, derive_seed(seed, static_cast<std::uint64_t>(trial)));
        std::deque<int> frontier;
        std::vector<char> queued(st.num_variables(), 0);
        bool hit = false;
        int asked = 0, index = 1;
        while (asked < tau) {
            if (frontier.empty() || index > st.degree_bound()) {
                if (!frontier.empty()) frontier.pop_front();
                index = 1;
            }
            if (frontier.empty()) {
                if (st.unseen_count() == 0) break;
                const int v = st.random_unseen();
                frontier.push_back(v);
                queued[v] = 1;
            }
            auto c = st.query(frontier.front(), index++);
            ++asked;
            if (!c) {
                index = st.degree_bound() + 1;
                continue;
            }
            hit = hit || c->collided;
            for (int u : c->scope)
                if (!queued[u]) {
                    queued[u] = 1;
                    frontier.push_back(u);
                }
        }
        if (hit) ++rep.collisions;
    }
    rep.empirical = static_cast<double>(rep.collisions) / trials;
    return rep;
}

}  // namespace lpcsp
