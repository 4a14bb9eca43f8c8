#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dicke/eigensolve.hpp"
#include "dicke/errors.hpp"
#include "dicke/model.hpp"

namespace dicke {

// d = E1 - E0 (tunnel splitting), Delta = E2 - E1 (gap above the doublet).
struct SplittingGap {
    double d = 0.0;
    double Delta = 0.0;
};

SplittingGap splitting_and_gap(std::span<const double> eigenvalues);

struct DegeneracyClass {
    double energy;     // lowest member
    int multiplicity;
};

struct DegeneracyReport {
    std::vector<DegeneracyClass> classes;
    bool pairing_ok = false;
    double max_intra_class_spread = 0.0;
};

// Greedy ascending clustering: a value joins the current class when it lies
// within cluster_tol of the previous value.
DegeneracyReport degeneracy_classes(std::span<const double> eigenvalues, double cluster_tol);

// 1e-10 * |E0|.
double default_cluster_tol(std::span<const double> eigenvalues);

struct ConvergenceStep {
    int M;
    std::vector<double> energies;
};

struct ConvergenceReport {
    int M_star = 0;
    std::vector<ConvergenceStep> history;
    bool converged = false;
    double tol = 0.0;
    SpectrumResult spectrum;   // from the last (largest) cutoff in history
};

class CutoffConvergenceError : public ResourceError {
public:
    CutoffConvergenceError(const std::string& message, std::vector<ConvergenceStep> history)
        : ResourceError(message), history_(std::move(history)) {}

    const std::vector<ConvergenceStep>& history() const noexcept { return history_; }

private:
    std::vector<ConvergenceStep> history_;
};

struct ConvergenceOptions {
    double tol = 1e-10;
    int k = 3;
    std::size_t max_dim = 200'000;
    SolverOptions solver;   // k is overridden
};

// ceil(4 (g S / omega)^2) + 10
int initial_cutoff(const ModelParams& p);

// Doubles the Fock cutoff from initial_cutoff(p) until the lowest k levels move
// by less than tol between consecutive cutoffs. M_star is the smaller cutoff of
// the accepted pair; the reported spectrum is the larger one.
ConvergenceReport converge_cutoff(const ModelParams& p, const ConvergenceOptions& opts = {});

// Lowest k values of { eps_i + omega n : eps_i in spectrum(-u S_z^2 - v S_x^2), n >= 0 }.
std::vector<double> polaron_ladder_spectrum(const ModelParams& p, int k);

struct OracleReport {
    double max_abs_deviation = 0.0;
    bool pass = false;
    int M_star = 0;
    std::vector<double> full;
    std::vector<double> reference;
};

OracleReport oracle_spectrum_equivalence(const ModelParams& p, int k, double tol,
                                         const ConvergenceOptions& opts = {});

// ||H R - R H||_F / ||H||_F. Throws std::invalid_argument on dimension mismatch.
double symmetry_commutator_norm(const Eigen::MatrixXd& H, const Eigen::MatrixXd& R);
double symmetry_commutator_norm(const SparseOperator& H, const SymmetryOperator& R);

// Spin coherent state on the equator, |theta = pi/2, phi = 0> (S_x = +S) or
// |theta = pi/2, phi = pi> (S_x = -S), in the m-ascending basis.
Eigen::VectorXd equatorial_coherent_state(int N, bool phi_zero);

struct CatOverlap {
    double f_plus = 0.0;
    double f_minus = 0.0;
};

// Weight of the cat references (|0> +- |pi>)/sqrt(2) (x) |vac> in the span of
// the two columns of ground_pair. Throws std::invalid_argument when the
// columns are not orthonormal or the shape does not match (M + 1)(N + 1).
CatOverlap cat_overlap(const Eigen::MatrixXd& ground_pair, const ModelParams& p, int fock_cutoff);

} // namespace dicke
