#include "doctest.h"

#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Dense>

#include "dicke/eigensolver.hpp"
#include "dicke/hamiltonian.hpp"
#include "dicke/specfun.hpp"

using namespace dicke;

namespace {

using Cd = std::complex<double>;

struct SpinOps {
    Eigen::MatrixXd jz, jx;
};

SpinOps spin_ops(int n_atoms) {
    const int d = n_atoms + 1;
    const double j = 0.5 * n_atoms;
    SpinOps s{Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d)};
    for (int i = 0; i < d; ++i) {
        const double m = i - j;
        s.jz(i, i) = m;
        if (i + 1 < d) {
            const double v = 0.5 * std::sqrt((j - m) * (j + m + 1));
            s.jx(i + 1, i) = v;
            s.jx(i, i + 1) = v;
        }
    }
    return s;
}

Eigen::MatrixXd annihilation(int n_tr) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_tr + 1, n_tr + 1);
    for (int n = 1; n <= n_tr; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

// kron(photon, spin) in the n-major flat layout.
template <class A, class B>
auto kron(const A& p, const B& s) {
    using Scalar = typename A::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(p.rows() * s.rows(), p.cols() * s.cols());
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            out.block(i * s.rows(), j * s.cols(), s.rows(), s.cols()) = p(i, j) * s.template cast<Scalar>();
        }
    }
    return out;
}

// Dicke Hamiltonian rebuilt from operator definitions.
Eigen::MatrixXd dm_from_operators(int n_atoms, int n_tr, double delta, double lambda) {
    const auto s = spin_ops(n_atoms);
    const Eigen::MatrixXd a = annihilation(n_tr);
    const Eigen::MatrixXd ip = Eigen::MatrixXd::Identity(n_tr + 1, n_tr + 1);
    const Eigen::MatrixXd is = Eigen::MatrixXd::Identity(n_atoms + 1, n_atoms + 1);
    Eigen::MatrixXd h = kron(Eigen::MatrixXd(a.transpose() * a), is) + delta * kron(ip, s.jz) +
                        (2.0 * lambda / std::sqrt(static_cast<double>(n_atoms))) *
                            kron(Eigen::MatrixXd(a + a.transpose()), s.jx);
    h.diagonal().array() += lambda * lambda;
    return h;
}

// Raw-gauge (complex Hermitian) gauge-invariant matrix written from the S_kn
// matrix-element formula; spin_prefactor multiplies Delta on the J_z term.
Eigen::MatrixXcd gidm_raw_from_s(const BasisSpec& b, double delta, double f, double spin_prefactor) {
    const STable s(b.n_tr(), f);
    const double j = b.j();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(b.dim()), static_cast<Eigen::Index>(b.dim()));
    for (int k = 0; k <= b.n_tr(); ++k) {
        for (int n = 0; n <= b.n_tr(); ++n) {
            const double pn = (n % 2 == 0) ? 1.0 : -1.0;
            const double pk = (k % 2 == 0) ? 1.0 : -1.0;
            for (int mr = 0; mr < b.spin_dim(); ++mr) {
                for (int mc = 0; mc < b.spin_dim(); ++mc) {
                    const double m = b.m_value(mc);
                    Cd v = 0.0;
                    if (k == n && mr == mc) v += n;
                    if (mr == mc) v += spin_prefactor * delta * 0.5 * s(k, n) * 0.5 * (pn + pk) * m;
                    // (J_+ + J_-) between <M'| and |M>
                    double ladder = 0.0;
                    if (mr == mc + 1) ladder = std::sqrt((j - m) * (j + m + 1));
                    if (mr == mc - 1) ladder = std::sqrt((j + m) * (j - m + 1));
                    v += Cd(0.0, -1.0) * (delta / 2.0) * s(k, n) * 0.5 * (pn - pk) * ladder;
                    h(static_cast<Eigen::Index>(b.index(k, mr)), static_cast<Eigen::Index>(b.index(n, mc))) = v;
                }
            }
        }
    }
    return h;
}

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_CASE("ModelParams keeps lambda and f consistent") {
    const auto p = ModelParams::from_lambda(ModelKind::Dm, 1.0, 2.0, 16);
    CHECK(p.f() == doctest::Approx(0.5));
    const auto q = ModelParams::from_f(ModelKind::Gidm, 1.0, 0.5, 16);
    CHECK(q.lambda() == doctest::Approx(2.0));
    CHECK_THROWS(ModelParams::from_f(ModelKind::Gidm, 0.0, 0.5, 16));
    CHECK_THROWS(ModelParams::from_f(ModelKind::Gidm, 1.0, -0.5, 16));
    CHECK_THROWS(ModelParams::from_lambda(ModelKind::Dm, 1.0, 0.5, 0));
}

TEST_CASE("DM decoupled limit N=1") {
    const BasisSpec b = make_basis(1, 1);
    const auto h = assemble_dm(b, ModelParams::from_lambda(ModelKind::Dm, 1.0, 0.0, 1));
    CHECK(h.matrix.nnz() == 4);
    const Eigen::MatrixXd d = to_dense(h.matrix);
    CHECK(d(0, 0) == -0.5);
    CHECK(d(1, 1) == 0.5);
    CHECK(d(2, 2) == 0.5);
    CHECK(d(3, 3) == 1.5);
    CHECK(dense_lowest(d, 1).energies[0] == -0.5);
}

TEST_CASE("DM hand-evaluated coupling entry") {
    const BasisSpec b = make_basis(2, 3);
    const auto h = assemble_dm(b, ModelParams::from_lambda(ModelKind::Dm, 1.0, 0.3, 2));
    // (n=0, M=-1) <-> (n=1, M=0): (lambda/sqrt N) sqrt(1) sqrt((J-M)(J+M+1)) = 0.3/sqrt2 * sqrt2
    CHECK(h.matrix.at(b.flatten(0, 0), b.flatten(1, 1)) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(h.matrix.at(b.flatten(1, 1), b.flatten(0, 0)) == h.matrix.at(b.flatten(0, 0), b.flatten(1, 1)));
    CHECK(h.matrix.at(b.flatten(0, 0), b.flatten(0, 0)) == doctest::Approx(-1.0 + 0.09));
}

TEST_CASE("DM matches dense operator rebuild") {
    for (const auto& [n, ntr, lambda] : {std::tuple{5, 7, 0.8}, std::tuple{2, 4, 0.3}, std::tuple{8, 10, 1.7}}) {
        const BasisSpec b = make_basis(n, ntr);
        const auto h = assemble_dm(b, ModelParams::from_lambda(ModelKind::Dm, 1.3, lambda, n));
        const Eigen::MatrixXd ref = dm_from_operators(n, ntr, 1.3, lambda);
        CHECK((to_dense(h.matrix) - ref).cwiseAbs().maxCoeff() <= 1e-13);
        CHECK(h.matrix.nnz() <= 5 * b.dim());
    }
}

TEST_CASE("DM symmetry scan N=10 ntr=20") {
    const BasisSpec b = make_basis(10, 20);
    const auto h = assemble_dm(b, ModelParams::from_lambda(ModelKind::Dm, 1.0, 1.0, 10));
    const auto rep = symmetry_report(h);
    CHECK(rep.max_asymmetry == 0.0);
    CHECK(rep.parity_violations == 0);
    CHECK(h.gauge == Gauge::Raw);
}

TEST_CASE("symmetry_report flags a corrupted entry") {
    const BasisSpec b = make_basis(3, 4);
    auto h = assemble_dm(b, ModelParams::from_lambda(ModelKind::Dm, 1.0, 0.6, 3));
    // first off-diagonal entry of row 0
    std::size_t p = h.matrix.row_ptr[0];
    while (static_cast<std::size_t>(h.matrix.col[p]) == 0) ++p;
    h.matrix.val[p] += 1e-3;
    const auto rep = symmetry_report(h);
    CHECK(rep.max_asymmetry == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(rep.parity_violations == 0);
}

TEST_CASE("GIDM at f=0 is a^dagger a + Delta J_z") {
    const BasisSpec b = make_basis(6, 9);
    const auto h = assemble_gidm(b, ModelParams::from_f(ModelKind::Gidm, 1.0, 0.0, 6));
    CHECK(h.gauge == Gauge::PhaseRotated);
    CHECK(h.matrix.nnz() == b.dim());
    for (int n = 0; n <= 9; ++n) {
        for (int m = 0; m <= 6; ++m) CHECK(h.matrix.at(b.flatten(n, m), b.flatten(n, m)) == n + b.m_value(m));
    }
    const auto dm = assemble_dm(b, ModelParams::from_lambda(ModelKind::Dm, 1.0, 0.0, 6));
    CHECK((sorted_eigenvalues(to_dense(h.matrix)) - sorted_eigenvalues(to_dense(dm.matrix))).cwiseAbs().maxCoeff() == 0.0);
    const GroundState g = dense_lowest(to_dense(h.matrix), 1);
    CHECK(g.energies[0] == -3.0);
    CHECK(std::abs(g.vectors[0][b.flatten(0, 0)]) == doctest::Approx(1.0));
}

TEST_CASE("GIDM raw gauge is Hermitian and the rotation is spectrum preserving") {
    const BasisSpec b = make_basis(4, 8);
    const double f = 0.4;
    const Eigen::MatrixXcd raw = gidm_raw_from_s(b, 1.0, f, 2.0);
    CHECK((raw - raw.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(raw.imag().cwiseAbs().maxCoeff() > 0.1);  // genuinely complex

    const auto h = assemble_gidm(b, ModelParams::from_f(ModelKind::Gidm, 1.0, f, 4));
    const Eigen::MatrixXd rotated = to_dense(h.matrix);
    CHECK((rotated - rotated.transpose()).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::VectorXd raw_spec =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(raw, Eigen::EigenvaluesOnly).eigenvalues();
    CHECK((raw_spec - sorted_eigenvalues(rotated)).cwiseAbs().maxCoeff() <= 1e-10);

    // Element by element: rotated(k, n) = i^(n-k) raw(k, n).
    for (int k = 0; k <= 8; ++k) {
        for (int n = 0; n <= 8; ++n) {
            const Cd phase = std::pow(Cd(0.0, 1.0), n - k);
            for (int mr = 0; mr <= 4; ++mr) {
                for (int mc = 0; mc <= 4; ++mc) {
                    const auto r = static_cast<Eigen::Index>(b.index(k, mr));
                    const auto c = static_cast<Eigen::Index>(b.index(n, mc));
                    const Cd expect = phase * raw(r, c);
                    CHECK(std::abs(expect.imag()) <= 1e-15);
                    CHECK(rotated(r, c) == doctest::Approx(expect.real()).epsilon(1e-13).scale(1e-300));
                }
            }
        }
    }
}

TEST_CASE("GIDM analytic assembly matches the operator-function oracle") {
    const BasisSpec b = make_basis(4, 12);
    for (double f : {0.2, 0.6, 1.0}) {
        const auto p = ModelParams::from_f(ModelKind::Gidm, 1.0, f, 4);
        const Eigen::MatrixXd analytic = to_dense(assemble_gidm(b, p).matrix);
        const Eigen::MatrixXd oracle = assemble_gidm_oracle(b, p, 4);
        INFO("f = " << f);
        CHECK((analytic - oracle).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(std::abs(dense_lowest(analytic, 1).energies[0] - dense_lowest(oracle, 1).energies[0]) <= 1e-8);
    }
}

TEST_CASE("Delta prefactor on the J_z term: the operator form fixes it to Delta") {
    // The literal matrix-element formula carries Delta/2 on the J_z term; only
    // the full Delta reproduces cosh/sinh of the operator Hamiltonian.
    const BasisSpec b = make_basis(4, 12);
    const double f = 0.6;
    const auto p = ModelParams::from_f(ModelKind::Gidm, 1.0, f, 4);
    const Eigen::MatrixXd oracle = assemble_gidm_oracle(b, p, 4);
    auto rotate = [&](const Eigen::MatrixXcd& raw) {
        Eigen::MatrixXd out(raw.rows(), raw.cols());
        for (Eigen::Index r = 0; r < raw.rows(); ++r) {
            for (Eigen::Index c = 0; c < raw.cols(); ++c) {
                const auto [k, mr] = b.unflatten(static_cast<std::size_t>(r));
                const auto [n, mc] = b.unflatten(static_cast<std::size_t>(c));
                (void)mr;
                (void)mc;
                out(r, c) = (std::pow(Cd(0.0, 1.0), n - k) * raw(r, c)).real();
            }
        }
        return out;
    };
    const Eigen::MatrixXd literal = rotate(gidm_raw_from_s(b, 1.0, f, 1.0));
    const Eigen::MatrixXd fixed = rotate(gidm_raw_from_s(b, 1.0, f, 2.0));
    CHECK((fixed - oracle).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((literal - oracle).cwiseAbs().maxCoeff() > 0.1);
    // and only the fixed form has eps(f -> 0) = -Delta
    const auto lit0 = gidm_raw_from_s(b, 1.0, 0.0, 1.0);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(lit0).eigenvalues()(0) == doctest::Approx(-1.0));
}

TEST_CASE("operator oracle limits") {
    const BasisSpec b = make_basis(3, 6);
    const Eigen::MatrixXd h0 = assemble_gidm_oracle(b, ModelParams::from_f(ModelKind::Gidm, 1.0, 0.0, 3), 3);
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(h0.rows(), h0.cols());
    for (int n = 0; n <= 6; ++n) {
        for (int m = 0; m <= 3; ++m) {
            const auto i = static_cast<Eigen::Index>(b.index(n, m));
            expect(i, i) = n + b.m_value(m);
        }
    }
    CHECK((h0 - expect).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(dense_lowest(h0, 1).energies[0] == doctest::Approx(-1.5).epsilon(1e-12));

    // <0|cosh(a - a^dagger)|0> = exp(-1/2) at f = 0.5, on the J_z diagonal.
    const Eigen::MatrixXd h = assemble_gidm_oracle(b, ModelParams::from_f(ModelKind::Gidm, 1.0, 0.5, 3), 8);
    const auto i = static_cast<Eigen::Index>(b.index(0, 0));
    CHECK(h(i, i) == doctest::Approx(-1.5 * std::exp(-0.5)).epsilon(1e-10));
}

TEST_CASE("combined parity blocks are exact for both models") {
    std::size_t violations = 0;
    double asym = 0.0;
    for (int n = 1; n <= 10; ++n) {
        for (int ntr : {1, 4, 11, 20}) {
            const BasisSpec b = make_basis(n, ntr);
            for (double c : {0.0, 0.3, 0.7, 1.1, 2.0}) {
                for (const ModelKind kind : {ModelKind::Dm, ModelKind::Gidm}) {
                    const auto h = assemble(b, ModelParams::from_f(kind, 1.0, c, n));
                    const auto rep = symmetry_report(h);
                    violations += rep.parity_violations;
                    asym = std::max(asym, rep.max_asymmetry);
                    if (kind == ModelKind::Gidm) {
                        CHECK(h.matrix.nnz() <= static_cast<std::size_t>(b.dim() * (ntr + 1) * 1.5 + b.dim()));
                    } else {
                        CHECK(h.matrix.nnz() <= 5 * b.dim());
                    }
                }
            }
        }
    }
    CHECK(violations == 0);
    CHECK(asym == 0.0);
}

TEST_CASE("assembly rejects mismatched parameters") {
    const BasisSpec b = make_basis(4, 5);
    CHECK_THROWS_AS(assemble_dm(b, ModelParams::from_lambda(ModelKind::Dm, 1.0, 0.5, 5)), std::invalid_argument);
    CHECK_THROWS_AS(assemble_gidm(b, ModelParams::from_f(ModelKind::Dm, 1.0, 0.5, 4)), std::invalid_argument);
    CHECK_THROWS_AS(assemble_dm(b, ModelParams::from_f(ModelKind::Gidm, 1.0, 0.5, 4)), std::invalid_argument);
}

TEST_CASE("MatrixMarket dump") {
    const BasisSpec b = make_basis(1, 2);
    const auto h = assemble_dm(b, ModelParams::from_lambda(ModelKind::Dm, 1.0, 0.5, 1));
    std::ostringstream out;
    write_matrix_market(h.matrix, out);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real symmetric");
    std::size_t rows = 0, cols = 0, entries = 0;
    in >> rows >> cols >> entries;
    CHECK(rows == 6);
    CHECK(cols == 6);
    CHECK(entries == (h.matrix.nnz() + 6) / 2);
    Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(6, 6);
    for (std::size_t e = 0; e < entries; ++e) {
        std::size_t r = 0, c = 0;
        double v = 0.0;
        in >> r >> c >> v;
        CHECK(c <= r);
        rebuilt(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 1)) = v;
        rebuilt(static_cast<Eigen::Index>(c - 1), static_cast<Eigen::Index>(r - 1)) = v;
    }
    CHECK((rebuilt - to_dense(h.matrix)).cwiseAbs().maxCoeff() == 0.0);
}
