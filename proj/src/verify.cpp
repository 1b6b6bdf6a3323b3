#include "dicke/verify.hpp"

#include <algorithm>
#include <cmath>

#include "dicke/eigensolver.hpp"
#include "dicke/hamiltonian.hpp"
#include "dicke/sweep.hpp"

namespace dicke {

std::vector<VerifyCheck> run_verification_suite() {
    std::vector<VerifyCheck> checks;
    auto add = [&](std::string name, double value, double tol) {
        checks.push_back({std::move(name), value, tol, value <= tol});
    };

    const BasisSpec small = make_basis(4, 12);
    for (double f : {0.2, 0.6, 1.0}) {
        const ModelParams p = ModelParams::from_f(ModelKind::Gidm, 1.0, f, 4);
        const Eigen::MatrixXd analytic = to_dense(assemble_gidm(small, p).matrix);
        const Eigen::MatrixXd oracle = assemble_gidm_oracle(small, p, 4);
        const double elementwise = (analytic - oracle).cwiseAbs().maxCoeff();
        const double e_analytic = dense_lowest(analytic, 1).energies[0];
        const double e_oracle = dense_lowest(oracle, 1).energies[0];
        const std::string tag = "gidm N=4 ntr=12 f=" + std::to_string(f).substr(0, 3);
        add(tag + " matrix vs operator oracle", elementwise, 1e-8);
        add(tag + " E0 vs operator oracle", std::abs(e_analytic - e_oracle), 1e-8);
    }

    struct DmCase {
        int n;
        int ntr;
        double lambda;
    };
    for (const DmCase c : {DmCase{2, 2, 0.5}, DmCase{8, 30, 0.7}}) {
        const SparseHamiltonian h = assemble_dm(make_basis(c.n, c.ntr), ModelParams::from_lambda(ModelKind::Dm, 1.0, c.lambda, c.n));
        const double dense = dense_lowest(to_dense(h.matrix), 1).energies[0];
        const double lanczos = lanczos_lowest(h.matrix, 1, 1e-12).energies[0];
        add("dm N=" + std::to_string(c.n) + " ntr=" + std::to_string(c.ntr) + " Lanczos vs dense E0",
            std::abs(dense - lanczos), 1e-10);
    }

    const ScalingReport rep = verify_scaling(80, 70, {0.5, 0.8}, NtrAuto{}, 1.0, 1e-10, 1);
    add("scaling relation N=80 vs N1=70 max |deps|", rep.max_deviation, 5e-2);
    return checks;
}

}  // namespace dicke
