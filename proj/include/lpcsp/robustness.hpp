#pragma once

#include <vector>

#include "lpcsp/lp.hpp"

namespace lpcsp {

/// Orthonormal characters over [q] under E_a: chi[0] is constant 1, the
/// rest come from Gram-Schmidt on the indicators e_0, e_1, ... with the
/// first nonzero entry of each made positive.
struct CharacterBasis {
    int q = 2;
    std::vector<std::vector<double>> chi;  // chi[s][a]

    double max_abs() const;
};

CharacterBasis build_basis(int q);

/// hat(f)(sigma) = sum_beta f(beta) chi_sigma(beta); tables indexed with
/// the first coordinate most significant, length q^k.
std::vector<double> hat(const std::vector<double>& f, const CharacterBasis& basis);
/// Inverse: f(beta) = E_sigma hat(f)(sigma) chi_sigma(beta).
std::vector<double> unhat(const std::vector<double>& fhat, const CharacterBasis& basis);

/// x'_{v,a} = x_{v,a} / sum_a x_{v,a}. Throws ZeroRow on an all-zero row
/// and NegativeEntry on a negative entry.
std::vector<std::vector<double>> surgery(const std::vector<std::vector<double>>& x);

/// Replaces the degree <= 1 coefficients of mu's table by those of the
/// marginals x (one row per distinct variable, each summing to 1), then
/// mixes with uniform: h = (1 - delta) f' + delta U. delta is clamped to 1.
/// Throws NotADistribution if mu has a negative entry or h does.
std::vector<double> smooth(const std::vector<double>& mu, const std::vector<std::vector<double>>& x, double delta,
                           const CharacterBasis& basis);

/// delta = k q^3 eps.
double smoothing_delta(int k, int q, double eps);

struct RepairReport {
    LpSolution solution;
    double eps_in = 0.0;        // measured infeasibility of the input
    double eps_surgery = 0.0;   // measured infeasibility after surgery
    double delta = 0.0;
    double value_in = 0.0;
    double loss = 0.0;          // value_in - solution.value
    double l1_bound = 0.0;      // sum_P w_P ||mu_P - mu'_P||_1
    double kappa = 0.0;         // loss / (eps_in * w_I), 0 when eps_in = 0
    double infeasibility = 0.0; // of the output
};

/// Surgery, smoothing of every mu_P with a common delta = s q^3 eps_surgery,
/// and x'' = (1 - delta) x' + delta / q. The output is feasible for BasicLP.
RepairReport repair_to_feasible(const CspInstance& instance, const LpSolution& sol);

}  // namespace lpcsp
