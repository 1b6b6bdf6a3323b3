#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dicke/eigensolver.hpp"
#include "dicke/hamiltonian.hpp"
#include "dicke/observables.hpp"

namespace dicke {

struct NtrFixed {
    int value = 40;
};

/// Geometric N_tr escalation: start, ceil(start*g), ... until consecutive
/// ground energies agree to tolerance * max(1, |E0|).
struct NtrAuto {
    int start = 8;
    double growth = 1.6;
    double tolerance = 1e-8;
    int cap = 512;
};

using NtrPolicy = std::variant<NtrFixed, NtrAuto>;

enum class CouplingUnit { Lambda, F };

struct CouplingGrid {
    double min = 0.0;
    double max = 0.0;
    int points = 1;
    CouplingUnit unit = CouplingUnit::F;

    /// Evenly spaced values, min..max inclusive; a single point yields min.
    std::vector<double> values() const;
};

ModelParams make_params(ModelKind kind, double delta, double coupling, CouplingUnit unit, int n_atoms);

struct SweepPlan {
    ModelKind model = ModelKind::Gidm;
    double delta = 1.0;
    CouplingGrid grid;
    std::vector<int> atom_counts;
    NtrPolicy ntr = NtrAuto{};
    double solver_tol = 1e-10;
    int threads = 1;
    /// 2 enables doublet detection and the symmetry-broken order parameter.
    int pairs = 2;

    /// Throws std::invalid_argument on an inconsistent plan.
    void validate() const;
};

struct SweepRow {
    ModelKind model = ModelKind::Gidm;
    int n_atoms = 0;
    double delta = 1.0;
    double lambda = 0.0;
    double f = 0.0;
    int ntr = 0;
    ObservableSet obs;
    double energy = 0.0;
    double residual = 0.0;
    double ms = 0.0;
    long iterations = 0;
    bool converged = false;
    std::string error;
};

/// Ground state of one point with an escalated photon cutoff.
struct NtrConvergence {
    int n_tr = 0;
    GroundState ground;
    std::vector<std::pair<int, double>> trace;  // (N_tr, E0) per tested cutoff
    long iterations = 0;
};

class NtrConvergenceError : public std::runtime_error {
public:
    NtrConvergenceError(const std::string& what, std::vector<std::pair<int, double>> trace)
        : std::runtime_error(what), trace_(std::move(trace)) {}
    const std::vector<std::pair<int, double>>& trace() const noexcept { return trace_; }

private:
    std::vector<std::pair<int, double>> trace_;
};

/// Copies a coefficient table between bases that differ only in n_tr
/// (zero-padding or truncating the photon index).
std::vector<double> resize_state(std::span<const double> state, const BasisSpec& from, const BasisSpec& to);

/// The N_tr escalation schedule: start, max(prev+1, ceil(prev*g)), ... up to cap.
std::vector<int> ntr_schedule(const NtrAuto& policy);

/// Escalates N_tr until consecutive E0 agree; returns the solve at the
/// smaller cutoff of the first agreeing pair. `warm` (with its basis) seeds
/// the first solve.
NtrConvergence converge_ntr(const ModelParams& params, const NtrAuto& policy, double solver_tol, int pairs = 1,
                            std::span<const double> warm = {}, const BasisSpec* warm_basis = nullptr);

/// One row per (N, coupling) point, ordered by N (plan order) then coupling.
/// Points of one N form a warm-start chain; chains run in parallel. Failed
/// points carry converged = false and never abort the sweep.
std::vector<SweepRow> run_sweep(const SweepPlan& plan);

struct ScalingPoint {
    double f = 0.0;
    double f1 = 0.0;
    double eps_n = 0.0;
    double eps_n1 = 0.0;
    double deviation = 0.0;
    bool valid = true;
    ObservableSet obs_n;
    ObservableSet obs_n1;
};

struct ScalingReport {
    int n_atoms = 0;
    int n_reference = 0;
    std::vector<ScalingPoint> points;
    double max_deviation = 0.0;
    double mean_deviation = 0.0;
    std::size_t skipped = 0;
};

/// Compares eps(N, f) with eps(N1, f1(f)) for the gauge-invariant model over
/// the given f grid. Points outside the validity domain are flagged and skipped.
ScalingReport verify_scaling(int n_atoms, int n_reference, const std::vector<double>& f_grid, const NtrPolicy& ntr,
                             double delta = 1.0, double solver_tol = 1e-10, int threads = 1);

}  // namespace dicke
