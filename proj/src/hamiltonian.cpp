#include "dicke/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dicke/specfun.hpp"

namespace dicke {

namespace {

// Upper-triangle entries (col >= row) are produced by a visitor so that the
// CSR build can run count and fill passes without materializing triplets.
// Within a row the visitors emit ascending columns.

// <M + 1| J_+ |M> with M = m_index - J.
double raising(double j, double m) { return std::sqrt((j - m) * (j + m + 1.0)); }

template <class Emit>
void visit_dm_upper(const BasisSpec& basis, const ModelParams& p, Emit&& emit) {
    const int spin = basis.spin_dim();
    const double j = basis.j();
    const double g = p.lambda() / std::sqrt(static_cast<double>(basis.n_atoms()));
    const double shift = p.lambda() * p.lambda();
    for (int n = 0; n <= basis.n_tr(); ++n) {
        for (int mi = 0; mi < spin; ++mi) {
            const std::size_t r = basis.index(n, mi);
            const double m = basis.m_value(mi);
            emit(r, r, n + p.delta() * m + shift);
            if (n == basis.n_tr() || g == 0.0) continue;
            const double photon = std::sqrt(n + 1.0);
            // (lambda/sqrt N)(a + a^dagger)(J_+ + J_-) couples (n, M) to (n+1, M-1) and (n+1, M+1).
            if (mi > 0) emit(r, basis.index(n + 1, mi - 1), g * photon * raising(j, m - 1.0));
            if (mi < spin - 1) emit(r, basis.index(n + 1, mi + 1), g * photon * raising(j, m));
        }
    }
}

template <class Emit>
void visit_gidm_upper(const BasisSpec& basis, const ModelParams& p, const STable& s, Emit&& emit) {
    const int spin = basis.spin_dim();
    const int n_tr = basis.n_tr();
    const double j = basis.j();
    const double delta = p.delta();
    for (int k = 0; k <= n_tr; ++k) {
        const double col_sign_k = (k % 2 == 0) ? 1.0 : -1.0;
        for (int mi = 0; mi < spin; ++mi) {
            const std::size_t r = basis.index(k, mi);
            const double m = basis.m_value(mi);
            // Diagonal: photon energy plus the cosh term at k = n.
            emit(r, r, k + delta * m * col_sign_k * s(k, k));
            for (int n = k + 1; n <= n_tr; ++n) {
                const int gap = n - k;
                const double sign_n = (n % 2 == 0) ? 1.0 : -1.0;
                const double skn = s(k, n);
                if (gap % 2 == 0) {
                    // i^(n-k) Delta M (-1)^n S_kn on M' = M.
                    const double phase = ((gap / 2) % 2 == 0) ? 1.0 : -1.0;
                    emit(r, basis.index(n, mi), phase * delta * m * sign_n * skn);
                } else {
                    // i^(n-k) (-i) Delta (-1)^n S_kn <M'|J_x|M> on M' = M +- 1,
                    // i^(n-k) (-i) = -(-1)^((n-k+1)/2).
                    const double phase = (((gap + 1) / 2) % 2 == 0) ? -1.0 : 1.0;
                    const double base = phase * delta * sign_n * skn;
                    // Row spin state M' = m; column spin M = M' -+ 1.
                    if (mi > 0) emit(r, basis.index(n, mi - 1), base * 0.5 * raising(j, m - 1.0));
                    if (mi < spin - 1) emit(r, basis.index(n, mi + 1), base * 0.5 * raising(j, m));
                }
            }
        }
    }
}

template <class Visit>
CsrMatrix build_symmetric_csr(std::size_t dim, Visit&& visit, double relative_drop) {
    std::vector<double> row_max(dim, 0.0);
    if (relative_drop > 0.0) {
        visit([&](std::size_t r, std::size_t c, double v) {
            const double a = std::abs(v);
            row_max[r] = std::max(row_max[r], a);
            row_max[c] = std::max(row_max[c], a);
        });
    }
    auto keep = [&](std::size_t r, std::size_t c, double v) {
        if (v == 0.0) return r == c;  // diagonal always stored
        if (relative_drop <= 0.0 || r == c) return true;
        return std::abs(v) >= relative_drop * std::max(row_max[r], row_max[c]);
    };

    CsrMatrix m;
    m.dim = dim;
    m.row_ptr.assign(dim + 1, 0);
    visit([&](std::size_t r, std::size_t c, double v) {
        if (!keep(r, c, v)) return;
        ++m.row_ptr[r + 1];
        if (c != r) ++m.row_ptr[c + 1];
    });
    for (std::size_t i = 0; i < dim; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
    m.col.resize(m.row_ptr[dim]);
    m.val.resize(m.row_ptr[dim]);
    std::vector<std::size_t> cursor(m.row_ptr.begin(), m.row_ptr.end() - 1);
    visit([&](std::size_t r, std::size_t c, double v) {
        if (!keep(r, c, v)) return;
        m.col[cursor[r]] = static_cast<int>(c);
        m.val[cursor[r]++] = v;
        if (c != r) {
            m.col[cursor[c]] = static_cast<int>(r);
            m.val[cursor[c]++] = v;
        }
    });
    return m;
}

void check_params(const BasisSpec& basis, const ModelParams& params, ModelKind expected) {
    if (params.kind() != expected) {
        throw std::invalid_argument(std::string("assemble: expected model ") + to_string(expected) +
                                    ", got " + to_string(params.kind()));
    }
    if (params.n_atoms() != basis.n_atoms()) {
        throw std::invalid_argument("assemble: params made for N=" + std::to_string(params.n_atoms()) +
                                    " but basis has N=" + std::to_string(basis.n_atoms()));
    }
}

}  // namespace

const char* to_string(ModelKind kind) noexcept { return kind == ModelKind::Dm ? "dm" : "gidm"; }

ModelKind parse_model_kind(const char* text) {
    if (std::strcmp(text, "dm") == 0 || std::strcmp(text, "DM") == 0) return ModelKind::Dm;
    if (std::strcmp(text, "gidm") == 0 || std::strcmp(text, "GIDM") == 0) return ModelKind::Gidm;
    throw std::invalid_argument(std::string("unknown model '") + text + "' (expected dm or gidm)");
}

ModelParams ModelParams::from_lambda(ModelKind kind, double delta, double lambda, int n_atoms) {
    if (n_atoms < 1) throw std::invalid_argument("ModelParams: n_atoms must be >= 1");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("ModelParams: delta must be > 0");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("ModelParams: coupling must be >= 0");
    return ModelParams(kind, delta, lambda, lambda / std::sqrt(static_cast<double>(n_atoms)), n_atoms);
}

ModelParams ModelParams::from_f(ModelKind kind, double delta, double f, int n_atoms) {
    if (n_atoms < 1) throw std::invalid_argument("ModelParams: n_atoms must be >= 1");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("ModelParams: delta must be > 0");
    if (!(f >= 0.0) || !std::isfinite(f)) throw std::invalid_argument("ModelParams: coupling must be >= 0");
    return ModelParams(kind, delta, f * std::sqrt(static_cast<double>(n_atoms)), f, n_atoms);
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != dim || y.size() != dim) throw std::invalid_argument("CsrMatrix::multiply: size mismatch");
    for (std::size_t r = 0; r < dim; ++r) {
        double acc = 0.0;
        for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) acc += val[p] * x[static_cast<std::size_t>(col[p])];
        y[r] = acc;
    }
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
    const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
    const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
    const auto it = std::lower_bound(first, last, static_cast<int>(c));
    if (it == last || *it != static_cast<int>(c)) return 0.0;
    return val[static_cast<std::size_t>(it - col.begin())];
}

CsrMatrix CsrMatrix::from_triplets(std::size_t dim, std::vector<Triplet> triplets) {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m;
    m.dim = dim;
    m.row_ptr.assign(dim + 1, 0);
    for (const auto& t : triplets) {
        if (t.row >= dim || t.col >= dim) throw std::out_of_range("CsrMatrix::from_triplets: index out of range");
    }
    std::size_t i = 0;
    for (std::size_t r = 0; r < dim; ++r) {
        while (i < triplets.size() && triplets[i].row == r) {
            const std::size_t c = triplets[i].col;
            double v = 0.0;
            while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) v += triplets[i++].value;
            m.col.push_back(static_cast<int>(c));
            m.val.push_back(v);
        }
        m.row_ptr[r + 1] = m.col.size();
    }
    return m;
}

Eigen::MatrixXd to_dense(const CsrMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.dim);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t r = 0; r < m.dim; ++r) {
        for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) {
            d(static_cast<Eigen::Index>(r), m.col[p]) += m.val[p];
        }
    }
    return d;
}

SparseHamiltonian assemble_dm(const BasisSpec& basis, const ModelParams& params) {
    check_params(basis, params, ModelKind::Dm);
    auto visit = [&](auto&& emit) { visit_dm_upper(basis, params, emit); };
    return {build_symmetric_csr(basis.dim(), visit, 0.0), basis, params, Gauge::Raw};
}

SparseHamiltonian assemble_gidm(const BasisSpec& basis, const ModelParams& params) {
    check_params(basis, params, ModelKind::Gidm);
    const STable s = s_table(basis.n_tr(), params.f());
    auto visit = [&](auto&& emit) { visit_gidm_upper(basis, params, s, emit); };
    return {build_symmetric_csr(basis.dim(), visit, 1e-16), basis, params, Gauge::PhaseRotated};
}

SparseHamiltonian assemble(const BasisSpec& basis, const ModelParams& params) {
    return params.kind() == ModelKind::Dm ? assemble_dm(basis, params) : assemble_gidm(basis, params);
}

Eigen::MatrixXd assemble_gidm_oracle(const BasisSpec& basis, const ModelParams& params,
                                     int internal_cutoff_factor) {
    check_params(basis, params, ModelKind::Gidm);
    if (internal_cutoff_factor < 2) throw std::invalid_argument("assemble_gidm_oracle: cutoff factor must be >= 2");
    const long big = static_cast<long>(internal_cutoff_factor) * basis.n_tr() + 1;
    if (big > 6000) throw std::length_error("assemble_gidm_oracle: internal cutoff too large for dense evaluation");

    using Cd = std::complex<double>;
    const auto P = static_cast<Eigen::Index>(big);
    // a |n> = sqrt(n) |n-1>
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(P, P);
    for (Eigen::Index n = 1; n < P; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const Eigen::MatrixXd gen = 2.0 * params.f() * (a - a.transpose());
    const Eigen::MatrixXcd herm = Cd(0.0, 1.0) * gen.cast<Cd>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
    const Eigen::MatrixXcd& V = es.eigenvectors();
    const Eigen::VectorXd& w = es.eigenvalues();
    // gen = -i V w V^dagger, so cosh(gen) = V cos(w) V^dagger, sinh(gen) = -i V sin(w) V^dagger.
    const Eigen::MatrixXcd cosh_gen = V * w.array().cos().matrix().cast<Cd>().asDiagonal() * V.adjoint();
    const Eigen::MatrixXcd sinh_gen = Cd(0.0, -1.0) * (V * w.array().sin().matrix().cast<Cd>().asDiagonal() * V.adjoint());

    const int spin = basis.spin_dim();
    const double j = basis.j();
    Eigen::MatrixXd jz = Eigen::MatrixXd::Zero(spin, spin);
    Eigen::MatrixXd jx = Eigen::MatrixXd::Zero(spin, spin);
    for (int mi = 0; mi < spin; ++mi) {
        jz(mi, mi) = basis.m_value(mi);
        if (mi + 1 < spin) {
            const double up = 0.5 * raising(j, basis.m_value(mi));
            jx(mi + 1, mi) = up;
            jx(mi, mi + 1) = up;
        }
    }

    const int photons = basis.photon_dim();
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
    const Cd i1(0.0, 1.0);
    auto ipow = [](int p) {
        switch (((p % 4) + 4) % 4) {
            case 0: return Cd(1.0, 0.0);
            case 1: return Cd(0.0, 1.0);
            case 2: return Cd(-1.0, 0.0);
            default: return Cd(0.0, -1.0);
        }
    };
    double max_imag = 0.0;
    for (int k = 0; k < photons; ++k) {
        for (int n = 0; n < photons; ++n) {
            const Cd phase = ipow(n - k);
            for (int mr = 0; mr < spin; ++mr) {
                for (int mc = 0; mc < spin; ++mc) {
                    Cd raw = params.delta() * (jz(mr, mc) * cosh_gen(k, n) + i1 * jx(mr, mc) * sinh_gen(k, n));
                    if (k == n && mr == mc) raw += static_cast<double>(n);
                    const Cd rotated = phase * raw;
                    max_imag = std::max(max_imag, std::abs(rotated.imag()));
                    out(static_cast<Eigen::Index>(basis.index(k, mr)), static_cast<Eigen::Index>(basis.index(n, mc))) =
                        rotated.real();
                }
            }
        }
    }
    if (max_imag > 1e-8) {
        throw std::runtime_error("assemble_gidm_oracle: rotated matrix is not real (max imag " +
                                 std::to_string(max_imag) + ")");
    }
    return out;
}

SymmetryReport symmetry_report(const SparseHamiltonian& h) {
    SymmetryReport rep;
    const CsrMatrix& m = h.matrix;
    for (std::size_t r = 0; r < m.dim; ++r) {
        const int pr = combined_parity(h.basis, r);
        for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) {
            const auto c = static_cast<std::size_t>(m.col[p]);
            rep.max_asymmetry = std::max(rep.max_asymmetry, std::abs(m.val[p] - m.at(c, r)));
            if (m.val[p] != 0.0 && combined_parity(h.basis, c) != pr) ++rep.parity_violations;
        }
    }
    return rep;
}

void write_matrix_market(const CsrMatrix& m, std::ostream& out) {
    std::size_t lower = 0;
    for (std::size_t r = 0; r < m.dim; ++r) {
        for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) {
            if (static_cast<std::size_t>(m.col[p]) <= r) ++lower;
        }
    }
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << m.dim << ' ' << m.dim << ' ' << lower << '\n';
    char buf[64];
    for (std::size_t r = 0; r < m.dim; ++r) {
        for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) {
            if (static_cast<std::size_t>(m.col[p]) > r) continue;
            std::snprintf(buf, sizeof buf, "%.17g", m.val[p]);
            out << (r + 1) << ' ' << (m.col[p] + 1) << ' ' << buf << '\n';
        }
    }
}

}  // namespace dicke
