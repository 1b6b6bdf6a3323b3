#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dicke/hamiltonian.hpp"

namespace dicke {

/// Lowest eigenpairs of a Hamiltonian. Vectors are coefficient tables in the
/// basis flat layout with unit 2-norm.
struct GroundState {
    std::vector<double> energies;
    std::vector<std::vector<double>> vectors;
    std::vector<double> residuals;
    /// E1 - E0, NaN when a single pair was requested.
    double gap = 0.0;
    /// Matrix-vector products spent (0 for dense solves).
    long iterations = 0;

    std::size_t size() const noexcept { return energies.size(); }
};

struct SolverOptions {
    /// Residual target, relative: ||Hv - Ev|| <= tol * max(1, |E|).
    double tol = 1e-10;
    /// Krylov basis size before an explicit restart.
    std::size_t krylov_max = 400;
    /// Largest dimension the dense path accepts.
    std::size_t dense_threshold = 4000;
    /// Parity sectors up to this size are solved densely outright.
    std::size_t dense_below = 64;
};

/// Quasi-degenerate doublet criterion: gap < 1e-8 * max(1, |E0|).
inline constexpr double kDegeneracyThreshold = 1e-8;
bool is_degenerate(const GroundState& g, double threshold = kDegeneracyThreshold);

/// Raised when Lanczos exhausts its iteration cap (10 * dim matrix-vector products).
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best_residual, long iterations)
        : std::runtime_error(what), best_residual_(best_residual), iterations_(iterations) {}
    double best_residual() const noexcept { return best_residual_; }
    long iterations() const noexcept { return iterations_; }

private:
    double best_residual_;
    long iterations_;
};

/// Deterministic start vector: all-ones plus a fixed-seed uniform perturbation, normalized.
std::vector<double> default_start_vector(std::size_t dim);

/// Lanczos with full reorthogonalization on a symmetric sparse matrix. A
/// second pair is found by a Lanczos run deflated against the first vector,
/// so exact degeneracies are resolved.
GroundState lanczos_lowest(const CsrMatrix& h, int how_many, double tol,
                           std::span<const double> warm_start = {}, const SolverOptions& options = {});

/// Full symmetric eigendecomposition; the reference path.
GroundState dense_lowest(const Eigen::MatrixXd& h, int how_many,
                         std::size_t threshold = SolverOptions{}.dense_threshold);

/// Lowest one or two eigenpairs of an assembled Hamiltonian. The matrix is
/// split into its two combined-parity sectors; each sector is solved
/// separately (Lanczos, or dense when small or as a fallback) and the
/// results merged, so every returned vector lives in a single sector.
GroundState lowest_eigenpairs(const SparseHamiltonian& h, int how_many, double tol,
                              std::span<const double> warm_start = {}, const SolverOptions& options = {});

}  // namespace dicke
