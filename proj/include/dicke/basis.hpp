#pragma once

#include <cstddef>
#include <utility>

namespace dicke {

/// Truncated product space |n> (x) chi_{J,M} with n = 0..n_tr and
/// M = -J..J, J = n_atoms / 2.
///
/// Spin projections are addressed by m_index = M + J (0..n_atoms) so that
/// half-integer J never enters index arithmetic. The flat layout is n-major:
/// all N+1 spin states of one photon number are contiguous,
///
///     flat = n * (n_atoms + 1) + m_index.
class BasisSpec {
public:
    BasisSpec(int n_atoms, int n_tr);

    int n_atoms() const noexcept { return n_atoms_; }
    int n_tr() const noexcept { return n_tr_; }
    double j() const noexcept { return 0.5 * n_atoms_; }
    int spin_dim() const noexcept { return n_atoms_ + 1; }
    int photon_dim() const noexcept { return n_tr_ + 1; }
    std::size_t dim() const noexcept { return dim_; }

    /// M = m_index - J.
    double m_value(int m_index) const noexcept { return m_index - j(); }

    std::size_t flatten(int n, int m_index) const;
    std::pair<int, int> unflatten(std::size_t flat) const;

    /// Unchecked variants for hot loops.
    std::size_t index(int n, int m_index) const noexcept {
        return static_cast<std::size_t>(n) * static_cast<std::size_t>(n_atoms_ + 1) +
               static_cast<std::size_t>(m_index);
    }

    bool operator==(const BasisSpec&) const = default;

private:
    int n_atoms_;
    int n_tr_;
    std::size_t dim_;
};

BasisSpec make_basis(int n_atoms, int n_tr);

/// (-1)^(n + M + J) with M + J = m_index.
int combined_parity(int n, int m_index);

/// Same grading with M and J given as (half-)integers; M + J must be a
/// non-negative integer.
int combined_parity(int n, double m, double j);

/// Combined parity of a flat basis index.
int combined_parity(const BasisSpec& basis, std::size_t flat);

}  // namespace dicke
