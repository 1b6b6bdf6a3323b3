#include "dicke/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dicke {

namespace {

using Complex = std::complex<double>;

void check_state(const StateView& s) {
    if (s.coeffs.size() != s.basis.dim()) {
        throw std::invalid_argument("observables: state has " + std::to_string(s.coeffs.size()) +
                                    " coefficients, basis dim is " + std::to_string(s.basis.dim()));
    }
}

// Raw-gauge coefficient for the stored value at photon number n.
Complex raw(const StateView& s, int n, int m) {
    const double c = s.coeffs[s.basis.index(n, m)];
    if (s.gauge == Gauge::Raw) return {c, 0.0};
    switch (n % 4) {
        case 0: return {c, 0.0};
        case 1: return {0.0, c};
        case 2: return {-c, 0.0};
        default: return {0.0, -c};
    }
}

}  // namespace

double normalized_energy(double e0, int n_atoms) {
    if (n_atoms < 1) throw std::invalid_argument("normalized_energy: N must be >= 1");
    return 2.0 * e0 / n_atoms;
}

std::complex<double> field_amplitude(const StateView& state) {
    check_state(state);
    Complex acc{0.0, 0.0};
    for (int n = 1; n <= state.basis.n_tr(); ++n) {
        const double w = std::sqrt(static_cast<double>(n));
        for (int m = 0; m < state.basis.spin_dim(); ++m) {
            acc += w * std::conj(raw(state, n - 1, m)) * raw(state, n, m);
        }
    }
    return acc;
}

double photon_number(const StateView& state) {
    check_state(state);
    double acc = 0.0;
    for (int n = 1; n <= state.basis.n_tr(); ++n) {
        for (int m = 0; m < state.basis.spin_dim(); ++m) {
            const double c = state.coeffs[state.basis.index(n, m)];
            acc += n * c * c;
        }
    }
    return acc;
}

PhotonDistribution photon_distribution(const StateView& state) {
    check_state(state);
    PhotonDistribution d;
    d.probs.assign(static_cast<std::size_t>(state.basis.photon_dim()), 0.0);
    for (int n = 0; n <= state.basis.n_tr(); ++n) {
        double p = 0.0;
        for (int m = 0; m < state.basis.spin_dim(); ++m) {
            const double c = state.coeffs[state.basis.index(n, m)];
            p += c * c;
        }
        d.probs[static_cast<std::size_t>(n)] = p;
    }
    d.c0 = d.probs[0];
    d.c1 = d.probs.size() > 1 ? d.probs[1] : 0.0;
    for (std::size_t n = 2; n < d.probs.size(); ++n) d.cmult += d.probs[n];
    return d;
}

QuadratureStats quadrature_stats(const StateView& state) {
    check_state(state);
    const int n_tr = state.basis.n_tr();
    const int spin = state.basis.spin_dim();
    // <x^2> = 1/2 sum [sqrt(n(n-1)) C*_{n-2} + (2n+1) C*_n + sqrt((n+1)(n+2)) C*_{n+2}] C_n
    // <p^2> = -1/2 sum [sqrt(n(n-1)) C*_{n-2} - (2n+1) C*_n + sqrt((n+1)(n+2)) C*_{n+2}] C_n
    Complex x2{0.0, 0.0};
    Complex p2{0.0, 0.0};
    double tail = 0.0;
    for (int n = 0; n <= n_tr; ++n) {
        const double down = std::sqrt(static_cast<double>(n) * (n - 1.0));
        const double up = std::sqrt((n + 1.0) * (n + 2.0));
        for (int m = 0; m < spin; ++m) {
            const Complex c = raw(state, n, m);
            const Complex lower = n >= 2 ? std::conj(raw(state, n - 2, m)) : Complex{};
            const Complex upper = n + 2 <= n_tr ? std::conj(raw(state, n + 2, m)) : Complex{};
            const Complex same = std::conj(c);
            x2 += (down * lower + (2.0 * n + 1.0) * same + up * upper) * c;
            p2 += (down * lower - (2.0 * n + 1.0) * same + up * upper) * c;
            if (n >= n_tr - 1) tail += std::norm(c);
        }
    }
    x2 *= 0.5;
    p2 *= -0.5;
    const Complex a = field_amplitude(state);
    const double mean_x = std::sqrt(2.0) * a.real();
    const double mean_p = std::sqrt(2.0) * a.imag();
    QuadratureStats q;
    q.sigma_x = std::sqrt(std::max(0.0, x2.real() - mean_x * mean_x));
    q.sigma_p = std::sqrt(std::max(0.0, p2.real() - mean_p * mean_p));
    q.truncation_warning = tail > 1e-8;
    return q;
}

double squeezing_parameter(double alpha, double eta) {
    const double arg = alpha - eta * eta;
    if (arg < -1e-10) {
        throw std::domain_error("squeezing_parameter: alpha - eta^2 = " + std::to_string(arg) + " is negative");
    }
    return std::asinh(std::sqrt(std::max(0.0, arg)));
}

double excited_population(const StateView& state) {
    check_state(state);
    double jz = 0.0;
    for (int n = 0; n <= state.basis.n_tr(); ++n) {
        for (int m = 0; m < state.basis.spin_dim(); ++m) {
            const double c = state.coeffs[state.basis.index(n, m)];
            jz += state.basis.m_value(m) * c * c;
        }
    }
    return std::clamp(0.5 + jz / state.basis.n_atoms(), 0.0, 1.0);
}

double entanglement(const StateView& state) {
    check_state(state);
    double entropy = 0.0;
    for (int m = 0; m < state.basis.spin_dim(); ++m) {
        double p = 0.0;
        for (int n = 0; n <= state.basis.n_tr(); ++n) {
            const double c = state.coeffs[state.basis.index(n, m)];
            p += c * c;
        }
        if (p > 0.0) entropy -= p * std::log2(p);
    }
    return std::max(0.0, entropy);
}

double scaled_coupling(double f, int n_atoms, int n_reference) {
    if (n_reference < 1 || n_atoms < n_reference) {
        throw std::domain_error("scaled_coupling: need N >= N1 >= 1, got N=" + std::to_string(n_atoms) +
                                ", N1=" + std::to_string(n_reference));
    }
    const double shift = 0.5 * std::log(static_cast<double>(n_atoms) / n_reference);
    const double f1_sq = f * f - shift;
    if (n_atoms > n_reference && !(f1_sq > 0.0)) {
        throw std::domain_error("scaled_coupling: f^2 = " + std::to_string(f * f) +
                                " does not exceed ln(N/N1)/2 = " + std::to_string(shift));
    }
    return std::sqrt(std::max(0.0, f1_sq));
}

SymmetryBrokenState symmetry_broken_amplitude(const GroundState& ground, const BasisSpec& basis, Gauge gauge,
                                              double threshold) {
    if (ground.size() == 0) throw std::invalid_argument("symmetry_broken_amplitude: no eigenpairs");
    SymmetryBrokenState out;
    out.degenerate = is_degenerate(ground, threshold);
    if (!out.degenerate) {
        out.state = ground.vectors[0];
        out.eta = std::abs(field_amplitude({out.state, basis, gauge}));
        return out;
    }
    const auto& v0 = ground.vectors[0];
    const auto& v1 = ground.vectors[1];
    const double inv = 1.0 / std::sqrt(2.0);
    std::vector<double> plus(v0.size());
    std::vector<double> minus(v0.size());
    for (std::size_t i = 0; i < v0.size(); ++i) {
        plus[i] = inv * (v0[i] + v1[i]);
        minus[i] = inv * (v0[i] - v1[i]);
    }
    const auto a_plus = field_amplitude({plus, basis, gauge});
    const auto a_minus = field_amplitude({minus, basis, gauge});
    // Prefer the branch with the larger amplitude; on a tie, the one with Re<a> >= 0.
    const bool take_plus = std::abs(a_plus) > std::abs(a_minus) ||
                           (std::abs(a_plus) == std::abs(a_minus) && a_plus.real() >= a_minus.real());
    out.state = take_plus ? std::move(plus) : std::move(minus);
    out.eta = std::abs(take_plus ? a_plus : a_minus);
    return out;
}

ObservableSet compute_observables(const GroundState& ground, const BasisSpec& basis, Gauge gauge) {
    if (ground.size() == 0) throw std::invalid_argument("compute_observables: no eigenpairs");
    ObservableSet o;
    o.epsilon = normalized_energy(ground.energies[0], basis.n_atoms());
    o.gap = ground.gap;
    o.eta_ground = std::abs(field_amplitude({ground.vectors[0], basis, gauge}));

    const SymmetryBrokenState sb = symmetry_broken_amplitude(ground, basis, gauge);
    o.degenerate = sb.degenerate;
    o.eta = sb.eta;
    const StateView state{sb.state, basis, gauge};
    o.alpha = photon_number(state);
    o.photons = photon_distribution(state);
    const QuadratureStats q = quadrature_stats(state);
    o.sigma_x = q.sigma_x;
    o.sigma_p = q.sigma_p;
    o.truncation_warning = q.truncation_warning;
    o.r = squeezing_parameter(o.alpha, o.eta);
    o.xi = excited_population(state);
    o.pi_entropy = entanglement(state);
    return o;
}

}  // namespace dicke
