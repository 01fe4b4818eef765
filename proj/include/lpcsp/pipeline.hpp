#pragma once

#include <vector>

#include "lpcsp/lp.hpp"

namespace lpcsp {

enum class ColKind { X, XBar, Mu, MuBar };

/// Row families of the complemented packing LP, in build order:
/// R1 sum_a x <= q-1+eps, R2 sum_a xbar <= 1+eps, R3 x + sum mu <= 1+eps,
/// R4 xbar + sum mubar <= q^{k-1}+eps, R5 x + xbar <= 1, R6 mu + mubar <= 1.
enum class RowKind { R1, R2, R3, R4, R5, R6 };

const char* to_string(ColKind kind);
const char* to_string(RowKind kind);

struct PipelineParams {
    double eps = 0.2;
    double C = 0.0;
    double eps_prime = 0.0;   // accuracy asked of the packing solver
    double eps_dprime = 0.0;  // repair threshold on 1 - z - zbar

    /// C = q^{2s}(tw)^2/eps^2, eps' = eps^3/(q^{2s}(tw)^2), eps'' = eps.
    static PipelineParams defaults(int q, int s, int t, double w, double eps);
    static PipelineParams defaults(const CspInstance& instance, double eps);
};

/// Relaxed LP: BasicLP with x replaced by its complement and every equality
/// relaxed by eps (materialized as <= / >= pairs). Same column layout as
/// BasicLP. `unit_box` adds z <= 1 for every column, the bound that the complemented LP
/// imposes implicitly through its coupling rows; off by default.
LinearProgram relax_basic_lp(const CspInstance& instance, double eps, bool unit_box = false);

/// The complemented LP together with its row families. Columns are the BasicLP layout
/// followed by one complement per column.
struct ComplementedLp {
    LinearProgram lp;
    std::vector<RowKind> row_kind;
    std::vector<ColKind> col_kind;
    int base_columns = 0;  // N, the column count of the relaxed LP
};

ComplementedLp to_packing(const CspInstance& instance, const PipelineParams& params);

struct PackingStats {
    double c_max = 0.0;
    double gamma_p = 0.0;
    double gamma_d = 0.0;
    int delta_p = 0;  // max nonzeros in a row
    int delta_d = 0;  // max rows containing a column
};

PackingStats compute_packing_stats(const std::vector<LpRow>& rows, int num_columns);

/// Scale applied to a complemented LP column: y = scale * z. Equals the column's LP
/// (3) objective coefficient, so the packing objective is all-ones.
double column_scale(ColKind kind, double weight_times_payoff, double C);
/// Right-hand side of a complemented LP row; k is the distinct-variable count of the
/// row's constraint (ignored for rows not tied to a constraint).
double lp3_rhs(RowKind kind, int q, int k, double eps);
/// Multiplier applied to a complemented LP row so every nonzero becomes >= 1.
double row_multiplier(RowKind kind, double w, double C);

/// Restricted packing LP: max 1^T y subject to rows (all <=), y >= 0.
struct PackingProgram {
    LinearProgram lp;  // objective is all ones
    std::vector<double> col_scale;
    std::vector<double> row_mult;
    std::vector<RowKind> row_kind;
    std::vector<ColKind> col_kind;
    PackingStats stats;

    std::vector<double> scale(const std::vector<double>& z) const;
    std::vector<double> unscale(const std::vector<double>& y) const;
};

PackingProgram normalize_packing(const ComplementedLp& lp3, double w, double C);

struct RepairOutcome {
    LpSolution solution;
    double infeasibility = 0.0;
    int deficient_columns = 0;  // |S|
    int reset_variables = 0;
    int reset_constraints = 0;
};

/// Repair: from a complemented-LP-feasible point (complemented LP coordinates,
/// complements included) builds an LP solution in BasicLP coordinates.
RepairOutcome restore_and_repair(const CspInstance& instance, const std::vector<double>& z,
                                 const PipelineParams& params, double feasibility_tol = 1e-7);

/// Product distribution over the distinct variables of constraint `id`
/// with per-variable marginals given by (normalized) rows of x.
std::vector<double> product_table(const CspInstance& instance, int id, const std::vector<std::vector<double>>& x);

}  // namespace lpcsp
