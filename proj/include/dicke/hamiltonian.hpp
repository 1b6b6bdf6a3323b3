#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dicke/basis.hpp"

namespace dicke {

enum class ModelKind { Dm, Gidm };

const char* to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(const char* text);

/// Model parameters with the field frequency fixed to 1. The coupling is kept
/// in both conventions, lambda (Dicke) and f = lambda / sqrt(N), for the
/// atom count the parameters were made for.
class ModelParams {
public:
    static ModelParams from_lambda(ModelKind kind, double delta, double lambda, int n_atoms);
    static ModelParams from_f(ModelKind kind, double delta, double f, int n_atoms);

    ModelKind kind() const noexcept { return kind_; }
    double delta() const noexcept { return delta_; }
    double lambda() const noexcept { return lambda_; }
    double f() const noexcept { return f_; }
    int n_atoms() const noexcept { return n_atoms_; }

private:
    ModelParams(ModelKind kind, double delta, double lambda, double f, int n_atoms)
        : kind_(kind), delta_(delta), lambda_(lambda), f_(f), n_atoms_(n_atoms) {}

    ModelKind kind_;
    double delta_;
    double lambda_;
    double f_;
    int n_atoms_;
};

/// Compressed sparse rows, columns sorted within each row.
struct CsrMatrix {
    std::size_t dim = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<int> col;
    std::vector<double> val;

    std::size_t nnz() const noexcept { return val.size(); }

    /// y = A x.
    void multiply(std::span<const double> x, std::span<double> y) const;

    /// Value at (r, c), zero when not stored.
    double at(std::size_t r, std::size_t c) const;

    struct Triplet {
        std::size_t row;
        std::size_t col;
        double value;
    };
    /// Duplicates are summed.
    static CsrMatrix from_triplets(std::size_t dim, std::vector<Triplet> triplets);
};

Eigen::MatrixXd to_dense(const CsrMatrix& m);

/// Real gauge the matrix is expressed in. PhaseRotated means coefficients are
/// C_nM(rotated) = i^(-n) C_nM(raw), which makes the gauge-invariant model real.
enum class Gauge { Raw, PhaseRotated };

struct SparseHamiltonian {
    CsrMatrix matrix;
    BasisSpec basis;
    ModelParams params;
    Gauge gauge;

    std::size_t dim() const noexcept { return matrix.dim; }
};

/// H_D = a^dagger a + Delta J_z + (2 lambda / sqrt N)(a + a^dagger) J_x + lambda^2.
SparseHamiltonian assemble_dm(const BasisSpec& basis, const ModelParams& params);

/// H_C = a^dagger a + Delta { J_z cosh[2f(a - a^dagger)] + i J_x sinh[2f(a - a^dagger)] }
/// from exact (untruncated-operator) matrix elements built on the S_kn table,
/// stored in the phase-rotated real gauge. Entries below 1e-16 of the larger of
/// the two row maxima are dropped.
SparseHamiltonian assemble_gidm(const BasisSpec& basis, const ModelParams& params);

/// Dispatches on params.kind().
SparseHamiltonian assemble(const BasisSpec& basis, const ModelParams& params);

/// Dense reference for the gauge-invariant model: builds a, a^dagger at cutoff
/// internal_cutoff_factor * n_tr, evaluates cosh and sinh of 2f(a - a^dagger)
/// through the spectral decomposition of the Hermitian i*2f(a - a^dagger),
/// applies the same phase rotation and truncates to the basis.
Eigen::MatrixXd assemble_gidm_oracle(const BasisSpec& basis, const ModelParams& params,
                                     int internal_cutoff_factor = 4);

struct SymmetryReport {
    double max_asymmetry = 0.0;
    std::size_t parity_violations = 0;
};

SymmetryReport symmetry_report(const SparseHamiltonian& h);

/// MatrixMarket coordinate dump, lower triangle, 1-based indices.
void write_matrix_market(const CsrMatrix& m, std::ostream& out);

}  // namespace dicke
