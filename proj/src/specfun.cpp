#include "dicke/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dicke {

namespace {

constexpr int kFactorialTableSize = 1024;
constexpr int kRescaleExponent = 600;
const double kRescaleThreshold = std::ldexp(1.0, kRescaleExponent);
const double kLn2 = std::log(2.0);

const std::array<double, kFactorialTableSize>& factorial_table() {
    static const auto table = [] {
        std::array<double, kFactorialTableSize> t{};
        for (int n = 0; n < kFactorialTableSize; ++n) {
            t[n] = std::lgamma(static_cast<double>(n) + 1.0);
        }
        t[0] = 0.0;
        t[1] = 0.0;
        return t;
    }();
    return table;
}

// Forward recurrence for L_n^alpha(x) in n, carrying a power-of-two exponent so
// the iterates never overflow. Value of L_n is current * 2^exponent.
class LaguerreRecurrence {
public:
    LaguerreRecurrence(int alpha, double x) : alpha_(alpha), x_(x) {}

    void advance() {
        const int j = degree_;
        const double next =
            ((2.0 * j + 1.0 + alpha_ - x_) * current_ - (j + alpha_) * previous_) / (j + 1.0);
        previous_ = current_;
        current_ = next;
        ++degree_;
        if (std::abs(current_) > kRescaleThreshold) {
            current_ = std::ldexp(current_, -kRescaleExponent);
            previous_ = std::ldexp(previous_, -kRescaleExponent);
            exponent_ += kRescaleExponent;
        }
    }

    double value() const { return std::ldexp(current_, exponent_); }

    ScaledValue scaled() const {
        if (current_ == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
        return {std::log(std::abs(current_)) + exponent_ * kLn2, current_ > 0.0 ? 1 : -1};
    }

private:
    int alpha_;
    double x_;
    int degree_ = 0;
    double previous_ = 0.0;
    double current_ = 1.0;
    int exponent_ = 0;
};

void check_laguerre_domain(int n, int alpha, double x) {
    if (n < 0 || alpha < 0) throw std::invalid_argument("laguerre_assoc: n and alpha must be >= 0");
    if (!(x >= 0.0)) throw std::invalid_argument("laguerre_assoc: x must be >= 0");
}

// Visits n = 0..n_max on the diagonal k = n + d with the magnitude
// log|sqrt(n!/k!) |c|^d L_n^d(c^2) exp(-c^2/2)| and the sign of L_n^d.
template <class Visit>
void diagonal_pass(int d, double c, int n_max, Visit&& visit) {
    const double x = c * c;
    const double base = d * std::log(std::abs(c)) - 0.5 * x;
    LaguerreRecurrence lag(d, x);
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0) lag.advance();
        const ScaledValue l = lag.scaled();
        const double log_mag = 0.5 * (ln_factorial(n) - ln_factorial(n + d)) + base + l.log_abs;
        visit(n, log_mag, l.sign);
    }
}

double signed_exp(double log_mag, int sign) {
    if (sign == 0 || log_mag < -745.0) return 0.0;
    return sign * std::exp(log_mag);
}

}  // namespace

double ln_factorial(int n) {
    if (n < 0) throw std::invalid_argument("ln_factorial: n must be >= 0");
    if (n < kFactorialTableSize) return factorial_table()[n];
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double laguerre_assoc(int n, int alpha, double x) {
    check_laguerre_domain(n, alpha, x);
    LaguerreRecurrence lag(alpha, x);
    for (int i = 0; i < n; ++i) lag.advance();
    return lag.value();
}

ScaledValue laguerre_assoc_scaled(int n, int alpha, double x) {
    check_laguerre_domain(n, alpha, x);
    LaguerreRecurrence lag(alpha, x);
    for (int i = 0; i < n; ++i) lag.advance();
    return lag.scaled();
}

double shift_element(int k, int n, double c) {
    if (k < 0 || n < 0) throw std::invalid_argument("shift_element: indices must be >= 0");
    if (!std::isfinite(c)) throw std::invalid_argument("shift_element: c must be finite");
    if (k < n) {
        const double mirrored = shift_element(n, k, c);
        return ((n - k) % 2 == 0) ? mirrored : -mirrored;
    }
    const int d = k - n;
    if (c == 0.0) return d == 0 ? 1.0 : 0.0;
    const ScaledValue l = laguerre_assoc_scaled(n, d, c * c);
    const double log_mag = 0.5 * (ln_factorial(n) - ln_factorial(k)) +
                           d * std::log(std::abs(c)) - 0.5 * c * c + l.log_abs;
    // (-c)^d contributes a minus sign when c > 0 and d is odd.
    const int power_sign = (d % 2 != 0 && c > 0.0) ? -1 : 1;
    return signed_exp(log_mag, power_sign * l.sign);
}

ShiftElementTable::ShiftElementTable(int n_tr, double c) : n_tr_(n_tr), c_(c) {
    if (n_tr < 0) throw std::invalid_argument("ShiftElementTable: n_tr must be >= 0");
    if (!std::isfinite(c)) throw std::invalid_argument("ShiftElementTable: c must be finite");
    const auto width = static_cast<std::size_t>(n_tr) + 1;
    entries_.assign(width * width, 0.0);
    if (c == 0.0) {
        for (std::size_t i = 0; i < width; ++i) entries_[i * width + i] = 1.0;
        return;
    }
    for (int d = 0; d <= n_tr; ++d) {
        const int power_sign = (d % 2 != 0 && c > 0.0) ? -1 : 1;
        const int mirror_sign = (d % 2 == 0) ? 1 : -1;
        diagonal_pass(d, c, n_tr - d, [&](int n, double log_mag, int sign) {
            const double v = signed_exp(log_mag, power_sign * sign);
            const auto k = static_cast<std::size_t>(n + d);
            entries_[k * width + static_cast<std::size_t>(n)] = v;
            entries_[static_cast<std::size_t>(n) * width + k] = mirror_sign * v;
        });
    }
}

STable::STable(int n_tr, double f) : n_tr_(n_tr), f_(f) {
    if (n_tr < 0) throw std::invalid_argument("s_table: n_tr must be >= 0");
    if (!(f >= 0.0) || !std::isfinite(f)) throw std::invalid_argument("s_table: f must be finite and >= 0");
    const auto width = static_cast<std::size_t>(n_tr) + 1;
    values_.assign(width * width, 0.0);
    if (f == 0.0) {
        for (std::size_t i = 0; i < width; ++i) values_[i * width + i] = (i % 2 == 0) ? 1.0 : -1.0;
        return;
    }
    const double c = 2.0 * f;
    for (int d = 0; d <= n_tr; ++d) {
        diagonal_pass(d, c, n_tr - d, [&](int n, double log_mag, int sign) {
            const int parity_sign = (n % 2 == 0) ? 1 : -1;
            const double v = signed_exp(log_mag, parity_sign * sign);
            const auto k = static_cast<std::size_t>(n + d);
            values_[k * width + static_cast<std::size_t>(n)] = v;
            values_[static_cast<std::size_t>(n) * width + k] = v;
        });
    }
}

ShiftElementTable make_shift_table(int n_tr, double c) { return ShiftElementTable(n_tr, c); }

STable s_table(int n_tr, double f) { return STable(n_tr, f); }

}  // namespace dicke
