#pragma once

#include <complex>
#include <span>
#include <vector>

#include "dicke/basis.hpp"
#include "dicke/eigensolver.hpp"
#include "dicke/hamiltonian.hpp"

namespace dicke {

/// A normalized coefficient table C_nM in the basis flat layout, tagged with
/// the gauge it is stored in. Observables are always reported for the
/// physical (raw-gauge) state; for PhaseRotated storage the raw coefficients
/// are i^n C_nM.
struct StateView {
    std::span<const double> coeffs;
    const BasisSpec& basis;
    Gauge gauge = Gauge::Raw;
};

struct PhotonDistribution {
    std::vector<double> probs;  // |c_n|^2, n = 0..n_tr
    double c0 = 0.0;
    double c1 = 0.0;
    double cmult = 0.0;  // sum over n >= 2
};

struct QuadratureStats {
    double sigma_x = 0.0;
    double sigma_p = 0.0;
    /// Weight on n = n_tr - 1, n_tr exceeds 1e-8.
    bool truncation_warning = false;
};

struct ObservableSet {
    double epsilon = 0.0;
    /// |<a>| on the reported state (symmetry-broken branch for a degenerate doublet).
    double eta = 0.0;
    /// |<a>| on the lowest eigenvector itself.
    double eta_ground = 0.0;
    double alpha = 0.0;
    PhotonDistribution photons;
    double sigma_x = 0.0;
    double sigma_p = 0.0;
    double r = 0.0;
    double xi = 0.0;
    double pi_entropy = 0.0;
    bool degenerate = false;
    double gap = 0.0;
    bool truncation_warning = false;
};

/// eps = 2 E0 / N.
double normalized_energy(double e0, int n_atoms);

/// <a> = sum_{n,M} sqrt(n) C*_{n-1,M} C_{nM}.
std::complex<double> field_amplitude(const StateView& state);

/// alpha = sum_{n,M} n |C_nM|^2.
double photon_number(const StateView& state);

PhotonDistribution photon_distribution(const StateView& state);

/// Quadrature standard deviations with x = (a + a^dagger)/sqrt 2 and
/// p = (a - a^dagger)/(i sqrt 2); vacuum gives 1/sqrt 2 for both.
QuadratureStats quadrature_stats(const StateView& state);

/// r = asinh(sqrt(alpha - eta^2)); small negative arguments (>= -1e-10) clamp to 0.
double squeezing_parameter(double alpha, double eta);

/// xi = 1/2 + <J_z>/N.
double excited_population(const StateView& state);

/// Pi = -sum_M p_M log2 p_M with p_M = sum_n |C_nM|^2 and 0 log 0 = 0.
double entanglement(const StateView& state);

/// f1 = sqrt(f^2 - ln(N/N1)/2); requires N >= N1 >= 1 and, for N > N1,
/// f^2 > ln(N/N1)/2. Throws std::domain_error otherwise.
double scaled_coupling(double f, int n_atoms, int n_reference);

struct SymmetryBrokenState {
    double eta = 0.0;
    bool degenerate = false;
    std::vector<double> state;
};

/// Order parameter of the doublet: when the two lowest pairs are
/// quasi-degenerate, forms w+- = (v0 +- v1)/sqrt 2 and keeps the one with the
/// larger |<a>|; otherwise uses v0. The returned eta is non-negative.
SymmetryBrokenState symmetry_broken_amplitude(const GroundState& ground, const BasisSpec& basis, Gauge gauge,
                                              double threshold = kDegeneracyThreshold);

/// Every observable for one parameter point, evaluated on the representative
/// state chosen by symmetry_broken_amplitude.
ObservableSet compute_observables(const GroundState& ground, const BasisSpec& basis, Gauge gauge);

}  // namespace dicke
