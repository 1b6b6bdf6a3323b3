#include "dicke/eigensolver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace dicke {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr std::uint64_t kStartSeed = 0x5d1c3e8aULL;

VectorXd to_eigen(std::span<const double> v) {
    VectorXd out(static_cast<Index>(v.size()));
    std::copy(v.begin(), v.end(), out.data());
    return out;
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void matvec(const CsrMatrix& h, const VectorXd& x, VectorXd& y) {
    h.multiply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
               std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
}

void project_out(VectorXd& v, const std::vector<VectorXd>& locked) {
    for (const auto& l : locked) v -= l.dot(v) * l;
}

struct LanczosOutcome {
    double value = 0.0;
    VectorXd vector;
    double residual = std::numeric_limits<double>::infinity();
    long iterations = 0;
    bool converged = false;
};

// Lowest eigenpair of h restricted to the orthogonal complement of `locked`.
LanczosOutcome lanczos_single(const CsrMatrix& h, VectorXd start, const std::vector<VectorXd>& locked,
                              double tol, std::size_t krylov_max, long iteration_cap) {
    const auto n = static_cast<Index>(h.dim);
    const auto available = static_cast<Index>(h.dim - locked.size());
    const Index m_max = std::max<Index>(1, std::min<Index>(static_cast<Index>(krylov_max), available));

    LanczosOutcome best;
    const VectorXd fallback = to_eigen(default_start_vector(h.dim));
    VectorXd q = std::move(start);
    project_out(q, locked);
    if (q.norm() < 1e-12) {
        q = fallback;
        project_out(q, locked);
    }
    q.normalize();

    MatrixXd basis(n, m_max);
    VectorXd w(n);
    long total = 0;
    int kick = 0;
    while (true) {
        std::vector<double> alpha;
        std::vector<double> beta;
        basis.col(0) = q;
        Index m = 0;
        double theta = 0.0;
        VectorXd ritz_coeffs;
        for (Index j = 0; j < m_max; ++j) {
            matvec(h, basis.col(j), w);
            ++total;
            project_out(w, locked);
            // Full reorthogonalization: classical Gram-Schmidt, twice.
            VectorXd coeff = basis.leftCols(j + 1).transpose() * w;
            w.noalias() -= basis.leftCols(j + 1) * coeff;
            VectorXd again = basis.leftCols(j + 1).transpose() * w;
            w.noalias() -= basis.leftCols(j + 1) * again;
            project_out(w, locked);
            alpha.push_back(coeff(j) + again(j));
            const double b = w.norm();
            m = j + 1;

            const bool check = m < 20 || m % 4 == 0 || m == m_max;
            const double scale = std::max(1.0, std::abs(alpha.back()));
            const bool breakdown = b < 1e-13 * scale;
            if (check || breakdown || total >= iteration_cap) {
                Eigen::SelfAdjointEigenSolver<MatrixXd> tri;
                VectorXd diag = Eigen::Map<VectorXd>(alpha.data(), m);
                VectorXd sub = beta.empty() ? VectorXd(0) : VectorXd(Eigen::Map<VectorXd>(beta.data(), m - 1));
                tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
                theta = tri.eigenvalues()(0);
                ritz_coeffs = tri.eigenvectors().col(0);
                const double estimate = b * std::abs(ritz_coeffs(m - 1));
                if (estimate <= 0.5 * tol * std::max(1.0, std::abs(theta)) || breakdown || m == m_max ||
                    total >= iteration_cap) {
                    break;
                }
            }
            beta.push_back(b);
            basis.col(j + 1) = w / b;
        }

        VectorXd y = basis.leftCols(m) * ritz_coeffs;
        project_out(y, locked);
        y.normalize();
        matvec(h, y, w);
        ++total;
        const double rq = y.dot(w);
        const double res = (w - rq * y).norm();
        if (res < best.residual) {
            best.value = rq;
            best.vector = y;
            best.residual = res;
        }
        best.iterations = total;
        if (res <= tol * std::max(1.0, std::abs(rq))) {
            best.converged = true;
            return best;
        }
        if (total >= iteration_cap) return best;
        // Restart from the Ritz vector. A Krylov space that closed before the
        // residual target was met gets a deterministic kick.
        q = y;
        if (m < m_max) {
            q += 1e-3 * (kick % 2 == 0 ? fallback : VectorXd(fallback.reverse()));
            ++kick;
            project_out(q, locked);
        }
        q.normalize();
    }
}

std::vector<double> seeded_start_vector(std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> v(dim);
    double norm2 = 0.0;
    for (auto& x : v) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        x = 1.0 + (u - 0.5);
        norm2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
    return v;
}

GroundState from_outcomes(std::vector<LanczosOutcome> pairs) {
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const LanczosOutcome& a, const LanczosOutcome& b) { return a.value < b.value; });
    GroundState g;
    for (auto& p : pairs) {
        g.energies.push_back(p.value);
        g.residuals.push_back(p.residual);
        g.vectors.push_back(to_std(p.vector));
        g.iterations += p.iterations;
    }
    g.gap = g.size() > 1 ? g.energies[1] - g.energies[0] : std::numeric_limits<double>::quiet_NaN();
    return g;
}

void check_request(int how_many, double tol) {
    if (how_many != 1 && how_many != 2) throw std::invalid_argument("eigensolver: how_many must be 1 or 2");
    if (!(tol >= 1e-14 && tol <= 1e-4)) throw std::invalid_argument("eigensolver: tol must lie in [1e-14, 1e-4]");
}

}  // namespace

bool is_degenerate(const GroundState& g, double threshold) {
    if (g.size() < 2) return false;
    return g.gap < threshold * std::max(1.0, std::abs(g.energies[0]));
}

std::vector<double> default_start_vector(std::size_t dim) { return seeded_start_vector(dim, kStartSeed); }

GroundState lanczos_lowest(const CsrMatrix& h, int how_many, double tol, std::span<const double> warm_start,
                           const SolverOptions& options) {
    check_request(how_many, tol);
    if (h.dim == 0) throw std::invalid_argument("lanczos_lowest: empty matrix");
    if (!warm_start.empty() && warm_start.size() != h.dim) {
        throw std::invalid_argument("lanczos_lowest: warm start has " + std::to_string(warm_start.size()) +
                                    " entries, matrix dim is " + std::to_string(h.dim));
    }
    const auto pairs = static_cast<std::size_t>(std::min<std::size_t>(how_many, h.dim));
    const long cap = std::max<long>(10 * static_cast<long>(h.dim), 50);
    const VectorXd cold = to_eigen(default_start_vector(h.dim));

    std::vector<LanczosOutcome> found;
    std::vector<VectorXd> locked;
    for (std::size_t p = 0; p < pairs; ++p) {
        // A deflated copy of the first start vector has no weight on the
        // rest of a degenerate eigenspace, so later pairs start elsewhere.
        VectorXd start = p == 0 ? cold : to_eigen(seeded_start_vector(h.dim, kStartSeed + p));
        if (p == 0 && !warm_start.empty()) {
            start = to_eigen(warm_start);
            if (start.norm() > 0.0) start.normalize();
            start += 1e-4 * cold;
        }
        LanczosOutcome out = lanczos_single(h, start, locked, tol, options.krylov_max, cap);
        if (!out.converged) {
            throw ConvergenceError("lanczos_lowest: no convergence after " + std::to_string(out.iterations) +
                                       " iterations (best residual " + std::to_string(out.residual) + ")",
                                   out.residual, out.iterations);
        }
        locked.push_back(out.vector);
        found.push_back(std::move(out));
    }
    return from_outcomes(std::move(found));
}

GroundState dense_lowest(const Eigen::MatrixXd& h, int how_many, std::size_t threshold) {
    if (how_many != 1 && how_many != 2) throw std::invalid_argument("dense_lowest: how_many must be 1 or 2");
    if (h.rows() != h.cols() || h.rows() == 0) throw std::invalid_argument("dense_lowest: matrix must be square, non-empty");
    if (static_cast<std::size_t>(h.rows()) > threshold) {
        throw std::length_error("dense_lowest: dimension " + std::to_string(h.rows()) + " exceeds dense threshold " +
                                std::to_string(threshold));
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense_lowest: eigendecomposition failed");
    std::vector<LanczosOutcome> pairs;
    const Index count = std::min<Index>(how_many, h.rows());
    for (Index i = 0; i < count; ++i) {
        LanczosOutcome p;
        p.value = es.eigenvalues()(i);
        p.vector = es.eigenvectors().col(i);
        p.residual = (h * p.vector - p.value * p.vector).norm();
        p.converged = true;
        pairs.push_back(std::move(p));
    }
    return from_outcomes(std::move(pairs));
}

GroundState lowest_eigenpairs(const SparseHamiltonian& h, int how_many, double tol, std::span<const double> warm_start,
                              const SolverOptions& options) {
    check_request(how_many, tol);
    const CsrMatrix& m = h.matrix;
    if (m.dim != h.basis.dim()) throw std::invalid_argument("lowest_eigenpairs: matrix/basis dimension mismatch");
    if (!warm_start.empty() && warm_start.size() != m.dim) {
        throw std::invalid_argument("lowest_eigenpairs: warm start has " + std::to_string(warm_start.size()) +
                                    " entries, matrix dim is " + std::to_string(m.dim));
    }

    // Sector membership and local indices.
    std::vector<int> sector(m.dim);
    std::vector<std::size_t> local(m.dim);
    std::array<std::vector<std::size_t>, 2> members;
    for (std::size_t i = 0; i < m.dim; ++i) {
        sector[i] = combined_parity(h.basis, i) > 0 ? 0 : 1;
        local[i] = members[sector[i]].size();
        members[sector[i]].push_back(i);
    }

    std::array<CsrMatrix, 2> blocks;
    for (int s = 0; s < 2; ++s) {
        CsrMatrix& b = blocks[s];
        b.dim = members[s].size();
        b.row_ptr.assign(b.dim + 1, 0);
        for (std::size_t li = 0; li < b.dim; ++li) {
            const std::size_t r = members[s][li];
            for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) {
                const auto c = static_cast<std::size_t>(m.col[p]);
                if (sector[c] != s) {
                    if (m.val[p] == 0.0) continue;
                    // Parity is not conserved: solve the full matrix instead.
                    return lanczos_lowest(m, how_many, tol, warm_start, options);
                }
                b.col.push_back(static_cast<int>(local[c]));
                b.val.push_back(m.val[p]);
            }
            b.row_ptr[li + 1] = b.col.size();
        }
    }

    const std::vector<double> cold = default_start_vector(m.dim);
    std::vector<LanczosOutcome> all;
    long iterations = 0;
    for (int s = 0; s < 2; ++s) {
        const CsrMatrix& b = blocks[s];
        if (b.dim == 0) continue;
        const int pairs = static_cast<int>(std::min<std::size_t>(how_many, b.dim));

        std::vector<double> warm;
        if (!warm_start.empty()) {
            warm.resize(b.dim);
            double norm2 = 0.0;
            for (std::size_t li = 0; li < b.dim; ++li) {
                warm[li] = warm_start[members[s][li]];
                norm2 += warm[li] * warm[li];
            }
            if (norm2 < 1e-16) warm.clear();
        }
        if (warm.empty()) {
            warm.resize(b.dim);
            for (std::size_t li = 0; li < b.dim; ++li) warm[li] = cold[members[s][li]];
        }

        GroundState part;
        if (b.dim <= options.dense_below) {
            part = dense_lowest(to_dense(b), pairs, options.dense_threshold);
        } else {
            try {
                part = lanczos_lowest(b, pairs, tol, warm, options);
            } catch (const ConvergenceError&) {
                if (b.dim > options.dense_threshold) throw;
                part = dense_lowest(to_dense(b), pairs, options.dense_threshold);
            }
        }
        iterations += part.iterations;
        for (std::size_t i = 0; i < part.size(); ++i) {
            LanczosOutcome o;
            o.value = part.energies[i];
            o.residual = part.residuals[i];
            o.vector = VectorXd::Zero(static_cast<Index>(m.dim));
            for (std::size_t li = 0; li < b.dim; ++li) {
                o.vector(static_cast<Index>(members[s][li])) = part.vectors[i][li];
            }
            all.push_back(std::move(o));
        }
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const LanczosOutcome& a, const LanczosOutcome& b) { return a.value < b.value; });
    all.resize(std::min<std::size_t>(all.size(), static_cast<std::size_t>(how_many)));
    GroundState g = from_outcomes(std::move(all));
    g.iterations = iterations;
    return g;
}

}  // namespace dicke
