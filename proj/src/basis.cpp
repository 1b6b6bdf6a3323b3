#include "dicke/basis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dicke {

BasisSpec::BasisSpec(int n_atoms, int n_tr) : n_atoms_(n_atoms), n_tr_(n_tr), dim_(0) {
    if (n_atoms < 1) {
        throw std::invalid_argument("basis: n_atoms must be >= 1, got " + std::to_string(n_atoms));
    }
    if (n_tr < 1) {
        throw std::invalid_argument("basis: n_tr must be >= 1, got " + std::to_string(n_tr));
    }
    const auto spin = static_cast<std::size_t>(n_atoms) + 1;
    const auto photon = static_cast<std::size_t>(n_tr) + 1;
    // Flat indices are also stored as 32-bit column indices in the sparse matrices.
    constexpr auto limit = static_cast<std::size_t>(std::numeric_limits<int>::max());
    if (photon > limit / spin) {
        throw std::overflow_error("basis: dimension (n_tr+1)(n_atoms+1) overflows the index type");
    }
    dim_ = spin * photon;
}

std::size_t BasisSpec::flatten(int n, int m_index) const {
    if (n < 0 || n > n_tr_) {
        throw std::out_of_range("basis: photon index " + std::to_string(n) + " outside [0, " +
                                std::to_string(n_tr_) + "]");
    }
    if (m_index < 0 || m_index > n_atoms_) {
        throw std::out_of_range("basis: m_index " + std::to_string(m_index) + " outside [0, " +
                                std::to_string(n_atoms_) + "]");
    }
    return index(n, m_index);
}

std::pair<int, int> BasisSpec::unflatten(std::size_t flat) const {
    if (flat >= dim_) {
        throw std::out_of_range("basis: flat index " + std::to_string(flat) + " >= dim " +
                                std::to_string(dim_));
    }
    const auto spin = static_cast<std::size_t>(n_atoms_) + 1;
    return {static_cast<int>(flat / spin), static_cast<int>(flat % spin)};
}

BasisSpec make_basis(int n_atoms, int n_tr) { return BasisSpec(n_atoms, n_tr); }

int combined_parity(int n, int m_index) {
    if (n < 0 || m_index < 0) {
        throw std::invalid_argument("combined_parity: indices must be non-negative");
    }
    return ((n + m_index) % 2 == 0) ? 1 : -1;
}

int combined_parity(int n, double m, double j) {
    const double shifted = m + j;
    const double rounded = std::round(shifted);
    if (std::abs(shifted - rounded) > 1e-9 || rounded < 0.0) {
        throw std::invalid_argument("combined_parity: M + J must be a non-negative integer");
    }
    if (std::abs(2.0 * j - std::round(2.0 * j)) > 1e-9 || j < 0.0) {
        throw std::invalid_argument("combined_parity: J must be a non-negative half-integer");
    }
    return combined_parity(n, static_cast<int>(rounded));
}

int combined_parity(const BasisSpec& basis, std::size_t flat) {
    const auto [n, m] = basis.unflatten(flat);
    return combined_parity(n, m);
}

}  // namespace dicke
