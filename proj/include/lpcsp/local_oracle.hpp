#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "lpcsp/pipeline.hpp"

namespace lpcsp {

/// Kinds of vertices in the column/row communication graph of the packing LP.
enum class NodeKind { X, XBar, Mu, MuBar, R1, R2, R3, R4, R5, R6 };

bool is_column(NodeKind kind);

/// Oracle-level name of a packing LP column or row. Constraint-bound kinds
/// (Mu, MuBar, R3, R4, R6) name their constraint as "the index-th
/// constraint of variable v" and resolve it with one oracle query.
///   X, XBar, R5: (v, value)        R1, R2: (v)
///   Mu, MuBar, R6: (v, index, beta) R3, R4: (v, index, value) - the row of
///   variable v's marginal in that constraint.
struct LocalName {
    NodeKind kind = NodeKind::X;
    int v = 0;
    int index = 0;            // 1-based oracle index, constraint-bound kinds only
    std::int64_t value = 0;   // a or beta
};

/// Resolved key: constraint-bound kinds carry the constraint id.
struct NodeKey {
    NodeKind kind = NodeKind::X;
    int a = 0;               // variable (X, XBar, R1, R2, R5) or constraint id
    std::int64_t b = 0;      // value, beta, or slot*q + value (R3, R4)

    std::uint64_t packed() const;
    bool operator==(const NodeKey&) const = default;
};

struct LocalSolverParams {
    double eps = 0.2;        // packing accuracy the round count is derived from
    double kappa = 1.0;
    double eta = 0.25;
    int round_cap = 64;
};

/// Global-parameter bounds on Gamma_p and Gamma_d of the packing LP; no instance data.
struct GammaBounds {
    double gamma_p = 0.0;
    double gamma_d = 0.0;
};
GammaBounds gamma_bounds(int q, int s, int t, double w, const PipelineParams& pp);

/// r = ceil(kappa * log Gamma_p * log Gamma_d / eps^4), clamped to
/// [1, round_cap].
int local_rounds(const GammaBounds& g, const LocalSolverParams& lp);

/// Ball of the communication graph discovered through oracle queries.
struct CommGraphView {
    struct Vertex {
        NodeKey key;
        int dist = 0;
        bool expanded = false;
        std::vector<std::pair<int, double>> adj;  // (vertex, coefficient)
        double rhs = 0.0;                          // rows only
    };
    std::vector<Vertex> vertices;
    std::int64_t query_cost = 0;
    int radius_hops = 0;

    /// Vertices within the radius (excludes boundary data rows).
    std::vector<int> ball() const;
    int find(const NodeKey& key) const;

private:
    friend class BallBuilder;
    std::unordered_map<std::uint64_t, int> index_;
};

/// BFS over the communication graph of radius `rounds` (2*rounds hops)
/// around `center`, using only oracle queries.
CommGraphView build_ball(ConstraintOracle& oracle, const LocalName& center, int rounds, const PipelineParams& pp);

/// Runs the two-phase local rule on every vertex of the view; returns the
/// final packing value of each column vertex (rows get 0).
std::vector<double> simulate_view(const CommGraphView& view, double gamma_init, double eta, int rounds);

/// The same rule on an explicit packing program (global reference).
std::vector<double> simulate_global(const PackingProgram& pk, double gamma_init, double eta, int rounds);

/// Index of a resolved column key in the complemented and packing LP column order.
int global_column(const CspInstance& instance, const NodeKey& key);

/// The constant-time LP oracle: each query simulates the local packing
/// solver on a ball around the columns it needs, then applies
/// restore_and_repair. Stateless across queries.
class LocalLpOracle {
public:
    LocalLpOracle(ConstraintOracle& oracle, PipelineParams pp, LocalSolverParams sp);

    /// Defaults: the packing solver is asked for accuracy eps' of pp.
    LocalLpOracle(ConstraintOracle& oracle, double eps);

    int rounds() const { return rounds_; }
    double gamma_init() const { return gamma_init_; }
    const PipelineParams& pipeline() const { return pp_; }
    const LocalSolverParams& solver() const { return sp_; }
    ConstraintOracle& oracle() { return *oracle_; }

    /// Packing LP value of one column.
    double packing_value(const LocalName& column);

    /// Repaired x'_{v,a}.
    double query_x(int v, int a);
    /// Repaired mu'_{P,beta} for P the index-th constraint of v.
    double query_mu(int v, int index, std::int64_t beta);

    std::int64_t last_query_cost() const { return last_cost_; }

private:

    ConstraintOracle* oracle_;
    PipelineParams pp_;
    LocalSolverParams sp_;
    int rounds_ = 1;
    double gamma_init_ = 1.0;
    std::int64_t last_cost_ = 0;
};

/// Packing vector (packing LP column order) obtained by simulating each closed
/// connected component once; equal to querying every column separately.
std::vector<double> assemble_packing(LocalLpOracle& olp, const CspInstance& instance);

struct AssembledSolution {
    LpSolution solution;
    std::vector<double> packing;  // packing LP coordinates
    RepairOutcome repair;
    std::int64_t query_cost = 0;
};

/// Materializes the whole oracle (x and mu for every name).
AssembledSolution assemble_global(LocalLpOracle& olp, const CspInstance& instance);

/// log of max(q, qs) * (Delta_p * Delta_d)^(r+2).
double log_query_bound(int q, int s, const PackingStats& stats, int rounds);

}  // namespace lpcsp
