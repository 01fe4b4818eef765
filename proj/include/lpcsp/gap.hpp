#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "lpcsp/lp.hpp"

namespace lpcsp {

/// Largest-remainder apportionment of N among the entries of a
/// distribution; ties go to the lower index. Counts sum to N.
std::vector<int> apportion(const std::vector<double>& dist, int N);

enum class GapMode { Opt, Lp };

struct GapParams {
    int N = 1;
    int T = 1;
    std::uint64_t seed = 0;
};

/// An instance over V x [N]. Variable (v, j) carries the label
/// label[v * N + j]; origin[label] = v. In Lp mode alpha[label] is the
/// natural assignment.
struct GapInstance {
    CspInstance instance;
    GapMode mode = GapMode::Opt;
    int N = 1;
    int T = 1;
    std::vector<int> label;
    std::vector<int> origin;
    Assignment alpha;
};

/// Per constraint P: T-fold split of each V_i and random k-partite
/// matchings; then per variable random merging across the sub-instances,
/// index blocks {T(i-1)+1..Ti} for the i-th incidence, and a random label
/// permutation.
GapInstance gen_opt_instance(const CspInstance& seed_instance, const GapParams& params);

/// As gen_opt_instance, with matchings restricted to the classes V_{i,beta}
/// of apportioned size mu*_{P,beta} N and merging within values. When the
/// apportioned class sizes of a variable disagree between its constraints,
/// the leftover positions are merged across values. Throws
/// InfeasibleSeedSolution unless lp is feasible for BasicLP to 1e-9.
GapInstance gen_lp_instance(const CspInstance& seed_instance, const LpSolution& lp, const GapParams& params);

/// The gap instance relabelled so that (v, j) is variable v * N + j.
CspInstance unpermuted(const GapInstance& gap);

/// Replaces constraints id1, id2 by Q1, Q2: for each distinct slot j with
/// swap[j] set, the variables at slot j trade places. Degree index entries
/// follow the variables. Throws ArityMismatch if the two constraints use
/// different predicates or swap has the wrong length.
CspInstance switch_constraints(const CspInstance& instance, int id1, int id2, const std::vector<bool>& swap);

/// One answered constraint of a lazy process, in labels.
struct ProcessConstraint {
    int source = -1;          // constraint of the seed instance
    int predicate = 0;
    double weight = 1.0;
    std::vector<int> scope;
    bool collided = false;    // some other variable was already in the transcript
};

struct TranscriptEntry {
    int variable = -1;        // queried or returned variable
    int index = 0;            // 0 for a random-variable query
    int answer = -1;          // answered constraint, -1 for bottom
};

/// The lazy processes that answer oracle queries while generating a gap
/// instance on the fly. Lp mode needs apportioned class sizes that agree
/// across the constraints of every variable.
class ProcessState {
public:
    ProcessState(const CspInstance& seed_instance, const LpSolution* lp, GapMode mode, int N, int T,
                 std::uint64_t seed);

    /// Chooses the Opt or Lp branch uniformly; the branch stays hidden.
    static ProcessState star(const CspInstance& seed_instance, const LpSolution& lp, int N, int T, std::uint64_t seed);

    /// A uniformly random unseen variable.
    int random_unseen();

    /// The index-th constraint of v (1-based). Throws UnseenVariableQuery if
    /// v has not appeared yet.
    std::optional<ProcessConstraint> query(int v, int index);

    /// Second stage: a uniformly random instance consistent with the
    /// transcript.
    GapInstance complete();

    int num_variables() const { return static_cast<int>(rho_.size()); }
    int unseen_count() const { return static_cast<int>(unused_.size()); }
    int degree_bound() const { return seed_->t() * T_; }
    bool seen(int v) const { return rho_[v] >= 0; }
    const std::vector<TranscriptEntry>& transcript() const { return transcript_; }
    const std::vector<ProcessConstraint>& answers() const { return answers_; }

    /// For experiments only: the branch P^star picked.
    GapMode revealed_mode() const { return mode_; }

private:
    struct Group {
        int count = 0;
        int offset = 0;
        std::int64_t beta = 0;
    };
    struct Slot {
        std::vector<int> bound;       // position -> label or -1
        std::vector<int> used;        // copies used per position
        std::vector<std::vector<int>> unbound;  // per group
        std::vector<std::vector<int>> touched;  // bound positions per group
    };

    int class_of(int v, int a) const { return v * vals_ + a; }
    int value_of_position(int id, int slot, int pos) const;
    int group_of(int id, int pos) const;
    void assign(int label, int cls);
    int fresh_label();
    int pick_label_for(int id, int slot, int value);
    void bind(int id, int slot, int pos, int label);
    int take_index(int label, int block);
    int block_of(int id, int v) const;

    const CspInstance* seed_;
    GapMode mode_;
    int N_, T_;
    int vals_ = 1;
    std::mt19937_64 rng_;
    std::vector<int> cap_;            // per class
    std::vector<int> filled_;         // per class
    std::vector<std::vector<int>> members_;  // labels per class
    std::vector<int> rho_;            // label -> class or -1
    std::vector<int> unused_;         // labels with rho = -1
    std::vector<int> unused_pos_;
    std::vector<std::vector<Group>> groups_;   // per seed constraint
    std::vector<std::vector<Slot>> slots_;     // per seed constraint, per distinct slot
    std::vector<std::vector<int>> binding_;    // label -> per block position or -1
    std::vector<std::vector<int>> index_answer_;  // label -> per index answer or -1
    std::vector<ProcessConstraint> answers_;
    std::vector<TranscriptEntry> transcript_;
};

struct CollisionReport {
    double empirical = 0.0;
    double bound = 0.0;
    double mu = 0.0;
    int trials = 0;
    int collisions = 0;
};

/// tau^2 s^2 / (mu N - tau s).
double collision_bound(int tau, int s, double mu, int N);

/// Runs a breadth-first probe of tau constraint queries against P^star and
/// counts runs in which an answered constraint contains a variable already
/// in the transcript. Throws Usage unless tau s < mu N.
CollisionReport collision_experiment(const CspInstance& seed_instance, const LpSolution& lp, int N, int T, int tau,
                                     int trials, std::uint64_t seed);

}  // namespace lpcsp
