#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "dicke/eigensolver.hpp"
#include "dicke/hamiltonian.hpp"

using namespace dicke;

namespace {

CsrMatrix random_sparse_symmetric(std::size_t dim, double density, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<CsrMatrix::Triplet> t;
    for (std::size_t r = 0; r < dim; ++r) {
        t.push_back({r, r, 4.0 * u(rng)});
        for (std::size_t c = 0; c < r; ++c) {
            if (coin(rng) < density) {
                const double v = u(rng);
                t.push_back({r, c, v});
                t.push_back({c, r, v});
            }
        }
    }
    return CsrMatrix::from_triplets(dim, std::move(t));
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double residual(const CsrMatrix& m, const std::vector<double>& v, double e) {
    std::vector<double> w(v.size());
    m.multiply(v, w);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += (w[i] - e * v[i]) * (w[i] - e * v[i]);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("trivial matrices") {
    const auto one = CsrMatrix::from_triplets(1, {{0, 0, 3.5}});
    const auto g1 = lanczos_lowest(one, 1, 1e-12);
    CHECK(g1.energies[0] == 3.5);
    CHECK(std::abs(g1.vectors[0][0]) == doctest::Approx(1.0));
    CHECK(std::isnan(g1.gap));

    const double t = 0.7;
    const auto two = CsrMatrix::from_triplets(2, {{0, 1, t}, {1, 0, t}});
    const auto g2 = lanczos_lowest(two, 2, 1e-12);
    CHECK(g2.energies[0] == doctest::Approx(-t).epsilon(1e-12));
    CHECK(g2.energies[1] == doctest::Approx(t).epsilon(1e-12));
    CHECK(g2.gap == doctest::Approx(2 * t).epsilon(1e-12));
    CHECK(std::abs(g2.vectors[0][0]) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
    CHECK(g2.vectors[0][0] * g2.vectors[0][1] < 0.0);
}

TEST_CASE("diagonal matrix with known spectrum") {
    std::vector<CsrMatrix::Triplet> t;
    const std::size_t dim = 300;
    for (std::size_t i = 0; i < dim; ++i) t.push_back({i, i, std::cos(0.37 * static_cast<double>(i)) + 0.01 * i});
    const auto m = CsrMatrix::from_triplets(dim, t);
    std::vector<double> d;
    for (const auto& x : t) d.push_back(x.value);
    std::sort(d.begin(), d.end());
    const auto g = lanczos_lowest(m, 2, 1e-12);
    CHECK(g.energies[0] == doctest::Approx(d[0]).epsilon(1e-12));
    CHECK(g.energies[1] == doctest::Approx(d[1]).epsilon(1e-12));
}

TEST_CASE("random sparse symmetric matrices against dense") {
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<std::size_t> dims(2, 500);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t dim = dims(rng);
        const auto m = random_sparse_symmetric(dim, 4.0 / static_cast<double>(dim), rng);
        const Eigen::VectorXd ref =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(to_dense(m), Eigen::EigenvaluesOnly).eigenvalues();
        const auto g = lanczos_lowest(m, 2, 1e-11);
        worst = std::max({worst, std::abs(g.energies[0] - ref(0)), std::abs(g.energies[1] - ref(1))});
        CHECK(std::abs(dot(g.vectors[0], g.vectors[0]) - 1.0) <= 1e-12);
        CHECK(std::abs(dot(g.vectors[0], g.vectors[1])) <= 1e-10);
        CHECK(residual(m, g.vectors[0], g.energies[0]) <= 1e-9);
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("exactly degenerate ground pair is resolved") {
    // Two decoupled identical blocks.
    std::vector<CsrMatrix::Triplet> t;
    for (std::size_t blk = 0; blk < 2; ++blk) {
        const std::size_t o = blk * 20;
        for (std::size_t i = 0; i < 20; ++i) {
            t.push_back({o + i, o + i, static_cast<double>(i)});
            if (i + 1 < 20) {
                t.push_back({o + i, o + i + 1, 0.5});
                t.push_back({o + i + 1, o + i, 0.5});
            }
        }
    }
    const auto m = CsrMatrix::from_triplets(40, t);
    const auto g = lanczos_lowest(m, 2, 1e-12);
    CHECK(std::abs(g.gap) <= 1e-10);
    CHECK(is_degenerate(g));
    CHECK(std::abs(dot(g.vectors[0], g.vectors[1])) <= 1e-10);
    CHECK(residual(m, g.vectors[1], g.energies[1]) <= 1e-9);
}

TEST_CASE("DM decoupled ground energy N=32") {
    const BasisSpec b = make_basis(32, 30);
    const auto h = assemble_dm(b, ModelParams::from_lambda(ModelKind::Dm, 1.0, 0.0, 32));
    const auto g = lowest_eigenpairs(h, 1, 1e-12);
    CHECK(g.energies[0] == doctest::Approx(-16.0).epsilon(1e-12));
    CHECK(std::abs(g.vectors[0][b.flatten(0, 0)]) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("DM small case against dense 9x9") {
    const BasisSpec b = make_basis(2, 2);
    const auto h = assemble_dm(b, ModelParams::from_lambda(ModelKind::Dm, 1.0, 0.5, 2));
    const Eigen::MatrixXd d = to_dense(h.matrix);
    CHECK(d.rows() == 9);
    const auto ref = dense_lowest(d, 2);
    const auto g = lanczos_lowest(h.matrix, 2, 1e-12);
    CHECK(std::abs(g.energies[0] - ref.energies[0]) <= 1e-10);
    CHECK(std::abs(g.energies[1] - ref.energies[1]) <= 1e-10);
    const auto s = lowest_eigenpairs(h, 2, 1e-12);
    CHECK(std::abs(s.energies[0] - ref.energies[0]) <= 1e-10);
}

TEST_CASE("sector-split solve matches full Lanczos and dense") {
    for (const auto& [kind, c] : {std::pair{ModelKind::Dm, 0.9}, std::pair{ModelKind::Gidm, 0.7}}) {
        const BasisSpec b = make_basis(12, 40);
        const auto h = assemble(b, ModelParams::from_f(kind, 1.0, c, 12));
        const auto ref = dense_lowest(to_dense(h.matrix), 2);
        const auto split = lowest_eigenpairs(h, 2, 1e-11);
        const auto full = lanczos_lowest(h.matrix, 2, 1e-11);
        for (int k = 0; k < 2; ++k) {
            CHECK(std::abs(split.energies[k] - ref.energies[k]) <= 1e-9);
            CHECK(std::abs(full.energies[k] - ref.energies[k]) <= 1e-9);
            // each split vector sits in one combined-parity sector
            int sector = 0;
            for (std::size_t i = 0; i < b.dim(); ++i) {
                if (std::abs(split.vectors[k][i]) > 1e-12) {
                    const int p = combined_parity(b, i);
                    if (sector == 0) sector = p;
                    CHECK(p == sector);
                }
            }
        }
    }
}

TEST_CASE("GIDM Lanczos against the oracle spectrum") {
    const BasisSpec b = make_basis(4, 12);
    const auto p = ModelParams::from_f(ModelKind::Gidm, 1.0, 0.6, 4);
    const auto g = lowest_eigenpairs(assemble_gidm(b, p), 1, 1e-12);
    const auto ref = dense_lowest(assemble_gidm_oracle(b, p, 4), 1);
    CHECK(std::abs(g.energies[0] - ref.energies[0]) <= 1e-8);
}

TEST_CASE("ground energy is non-increasing in the photon cutoff") {
    for (const ModelKind kind : {ModelKind::Dm, ModelKind::Gidm}) {
        double prev = INFINITY;
        for (int ntr = 2; ntr <= 40; ntr += 2) {
            const BasisSpec b = make_basis(8, ntr);
            const auto g = lowest_eigenpairs(assemble(b, ModelParams::from_f(kind, 1.0, 0.8, 8)), 1, 1e-12);
            CHECK(g.energies[0] <= prev + 1e-10);
            prev = g.energies[0];
        }
    }
}

TEST_CASE("warm start gives the same answer and is deterministic") {
    const auto p = ModelParams::from_lambda(ModelKind::Dm, 1.0, 0.75, 16);
    const BasisSpec b = make_basis(16, 50);
    const auto h = assemble_dm(b, p);
    const auto cold = lowest_eigenpairs(h, 2, 1e-11);
    const auto neighbour =
        lowest_eigenpairs(assemble_dm(b, ModelParams::from_lambda(ModelKind::Dm, 1.0, 0.7, 16)), 1, 1e-11);
    const auto warm = lowest_eigenpairs(h, 2, 1e-11, neighbour.vectors[0]);
    CHECK(std::abs(cold.energies[0] - warm.energies[0]) <= 1e-10);
    CHECK(std::abs(cold.energies[1] - warm.energies[1]) <= 1e-10);
    const auto again = lowest_eigenpairs(h, 2, 1e-11);
    CHECK(again.energies == cold.energies);
    CHECK(again.vectors == cold.vectors);
    CHECK(default_start_vector(17) == default_start_vector(17));
    CHECK(std::abs(dot(default_start_vector(17), default_start_vector(17)) - 1.0) <= 1e-14);
}

TEST_CASE("input validation") {
    const auto m = CsrMatrix::from_triplets(3, {{0, 0, 1.0}, {1, 1, 2.0}, {2, 2, 3.0}});
    CHECK_THROWS_AS(lanczos_lowest(m, 3, 1e-10), std::invalid_argument);
    CHECK_THROWS_AS(lanczos_lowest(m, 1, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(lanczos_lowest(m, 1, 1e-15), std::invalid_argument);
    const std::vector<double> bad(2, 1.0);
    CHECK_THROWS_AS(lanczos_lowest(m, 1, 1e-10, bad), std::invalid_argument);
    CHECK_THROWS_AS(dense_lowest(Eigen::MatrixXd::Identity(10, 10), 1, 5), std::length_error);
    CHECK_THROWS_AS(dense_lowest(Eigen::MatrixXd::Identity(3, 3), 0), std::invalid_argument);
}

TEST_CASE("iteration cap raises ConvergenceError") {
    // tiny Krylov space on a slowly converging chain
    std::vector<CsrMatrix::Triplet> t;
    const std::size_t dim = 400;
    for (std::size_t i = 0; i < dim; ++i) {
        t.push_back({i, i, 2.0});
        if (i + 1 < dim) {
            t.push_back({i, i + 1, -1.0});
            t.push_back({i + 1, i, -1.0});
        }
    }
    const auto m = CsrMatrix::from_triplets(dim, t);
    SolverOptions opts;
    opts.krylov_max = 2;
    try {
        lanczos_lowest(m, 1, 1e-14, {}, opts);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.iterations() <= static_cast<long>(10 * dim) + 2);
        CHECK(e.best_residual() > 0.0);
    }
}
