#pragma once

#include <cstddef>
#include <vector>

namespace dicke {

/// ln(n!). Table lookup for small n, log-gamma beyond.
double ln_factorial(int n);

/// Associated Laguerre polynomial L_n^alpha(x) by the forward three-term
/// recurrence in n. Can overflow to +-inf for large degree; use the scaled
/// variant in that regime.
double laguerre_assoc(int n, int alpha, double x);

/// L_n^alpha(x) as log|L| and sign (sign is 0 when L == 0). The recurrence
/// is rescaled by powers of two whenever the iterates grow past 2^600.
struct ScaledValue {
    double log_abs = 0.0;
    int sign = 1;
};
ScaledValue laguerre_assoc_scaled(int n, int alpha, double x);

/// D_kn(c) = <k| exp(c (a - a^dagger)) |n>, the displacement-operator matrix
/// element for a real shift amplitude c. For k >= n
///
///     D_kn(c) = sqrt(n!/k!) (-c)^(k-n) L_n^(k-n)(c^2) exp(-c^2/2),
///
/// and D_nk(c) = (-1)^(k-n) D_kn(c). Assembled in log-magnitude/sign form;
/// results below the double range flush to zero.
double shift_element(int k, int n, double c);

/// Dense (n_tr+1)^2 table of D_kn(c), row index k, column index n.
class ShiftElementTable {
public:
    ShiftElementTable(int n_tr, double c);

    int n_tr() const noexcept { return n_tr_; }
    double c() const noexcept { return c_; }
    double operator()(int k, int n) const noexcept {
        return entries_[static_cast<std::size_t>(k) * static_cast<std::size_t>(n_tr_ + 1) +
                        static_cast<std::size_t>(n)];
    }
    const std::vector<double>& entries() const noexcept { return entries_; }

private:
    int n_tr_;
    double c_;
    std::vector<double> entries_;
};

/// Symmetric coupling table for the gauge-invariant model,
///
///     S_kn(f) = (-1)^n sqrt(n!/k!) (2f)^(k-n) L_n^(k-n)(4 f^2) exp(-2 f^2),  k >= n,
///
/// completed by S_kn = S_nk. Related to the shift elements by
/// S_kn = (-1)^max(k,n) D_kn(2f) on the k >= n triangle.
class STable {
public:
    STable(int n_tr, double f);

    int n_tr() const noexcept { return n_tr_; }
    double f() const noexcept { return f_; }
    double operator()(int k, int n) const noexcept {
        return values_[static_cast<std::size_t>(k) * static_cast<std::size_t>(n_tr_ + 1) +
                       static_cast<std::size_t>(n)];
    }
    /// S restricted to same photon parity (k - n even); the cosh[2f(a - a^dagger)] part.
    double cosh_part(int k, int n) const noexcept { return ((k - n) % 2 == 0) ? (*this)(k, n) : 0.0; }
    /// S restricted to opposite photon parity (k - n odd); the sinh part.
    double sinh_part(int k, int n) const noexcept { return ((k - n) % 2 != 0) ? (*this)(k, n) : 0.0; }

private:
    int n_tr_;
    double f_;
    std::vector<double> values_;
};

ShiftElementTable make_shift_table(int n_tr, double c);
STable s_table(int n_tr, double f);

}  // namespace dicke
