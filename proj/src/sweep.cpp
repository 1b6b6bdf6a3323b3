#include "dicke/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

namespace dicke {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ObservableSet nan_observables() {
    ObservableSet o;
    o.epsilon = o.eta = o.eta_ground = o.alpha = kNaN;
    o.photons.c0 = o.photons.c1 = o.photons.cmult = kNaN;
    o.sigma_x = o.sigma_p = o.r = o.xi = o.pi_entropy = o.gap = kNaN;
    return o;
}

struct SolvedPoint {
    BasisSpec basis;
    GroundState ground;
    long iterations = 0;
};

SolvedPoint solve_fixed(const ModelParams& params, int n_tr, double tol, int pairs, std::span<const double> warm,
                        const BasisSpec* warm_basis) {
    BasisSpec basis = make_basis(params.n_atoms(), n_tr);
    const SparseHamiltonian h = assemble(basis, params);
    std::vector<double> seed;
    if (!warm.empty() && warm_basis != nullptr) seed = resize_state(warm, *warm_basis, basis);
    GroundState g = lowest_eigenpairs(h, pairs, tol, seed);
    const long iters = g.iterations;
    return {basis, std::move(g), iters};
}

Gauge gauge_of(ModelKind kind) { return kind == ModelKind::Dm ? Gauge::Raw : Gauge::PhaseRotated; }

// Solves the points of one warm-start chain in order.
std::vector<SweepRow> run_chain(const std::vector<ModelParams>& points, const NtrPolicy& ntr, double tol, int pairs) {
    std::vector<SweepRow> rows;
    rows.reserve(points.size());
    std::vector<double> prev_state;
    std::optional<BasisSpec> prev_basis;
    for (const ModelParams& params : points) {
        SweepRow row;
        row.model = params.kind();
        row.n_atoms = params.n_atoms();
        row.delta = params.delta();
        row.lambda = params.lambda();
        row.f = params.f();
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const BasisSpec* wb = prev_basis ? &*prev_basis : nullptr;
            SolvedPoint solved = [&] {
                if (const auto* fixed = std::get_if<NtrFixed>(&ntr)) {
                    row.ntr = fixed->value;
                    return solve_fixed(params, fixed->value, tol, pairs, prev_state, wb);
                }
                NtrConvergence c = converge_ntr(params, std::get<NtrAuto>(ntr), tol, pairs, prev_state, wb);
                BasisSpec basis = make_basis(params.n_atoms(), c.n_tr);
                return SolvedPoint{basis, std::move(c.ground), c.iterations};
            }();
            row.ntr = solved.basis.n_tr();
            row.obs = compute_observables(solved.ground, solved.basis, gauge_of(params.kind()));
            row.energy = solved.ground.energies[0];
            row.residual = solved.ground.residuals[0];
            row.iterations = solved.iterations;
            row.converged = true;
            prev_state = solved.ground.vectors[0];
            prev_basis = solved.basis;
        } catch (const std::exception& e) {
            row.obs = nan_observables();
            row.energy = kNaN;
            row.residual = kNaN;
            row.converged = false;
            row.error = e.what();
        }
        row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back(std::move(row));
    }
    return rows;
}

// Runs independent chains on up to `threads` workers; results keep chain order.
std::vector<std::vector<SweepRow>> run_chains(const std::vector<std::vector<ModelParams>>& chains,
                                              const NtrPolicy& ntr, double tol, int pairs, int threads) {
    std::vector<std::vector<SweepRow>> results(chains.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < chains.size(); i = next.fetch_add(1)) {
            results[i] = run_chain(chains[i], ntr, tol, pairs);
        }
    };
    const auto count = static_cast<std::size_t>(std::max(1, threads));
    const std::size_t workers = std::min(count, chains.size());
    if (workers <= 1) {
        worker();
        return results;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

}  // namespace

std::vector<double> CouplingGrid::values() const {
    if (points < 1) throw std::invalid_argument("CouplingGrid: points must be >= 1");
    if (points == 1) return {min};
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = min + (max - min) * i / (points - 1);
    v.back() = max;
    return v;
}

ModelParams make_params(ModelKind kind, double delta, double coupling, CouplingUnit unit, int n_atoms) {
    return unit == CouplingUnit::Lambda ? ModelParams::from_lambda(kind, delta, coupling, n_atoms)
                                        : ModelParams::from_f(kind, delta, coupling, n_atoms);
}

void SweepPlan::validate() const {
    if (grid.points < 1) throw std::invalid_argument("sweep plan: coupling grid needs >= 1 point");
    if (grid.points > 1 && !(grid.max > grid.min)) {
        throw std::invalid_argument("sweep plan: coupling grid must be strictly increasing");
    }
    if (grid.min < 0.0) throw std::invalid_argument("sweep plan: couplings must be >= 0");
    if (atom_counts.empty()) throw std::invalid_argument("sweep plan: no atom counts");
    for (int n : atom_counts) {
        if (n < 1) throw std::invalid_argument("sweep plan: atom counts must be >= 1");
    }
    if (!(delta > 0.0)) throw std::invalid_argument("sweep plan: delta must be > 0");
    if (const auto* a = std::get_if<NtrAuto>(&ntr)) {
        if (!(a->growth > 1.0)) throw std::invalid_argument("sweep plan: AUTO growth factor must be > 1");
        if (!(a->tolerance > 0.0)) throw std::invalid_argument("sweep plan: AUTO tolerance must be > 0");
        if (a->start < 1 || a->cap < a->start) throw std::invalid_argument("sweep plan: AUTO start/cap invalid");
    } else if (std::get<NtrFixed>(ntr).value < 1) {
        throw std::invalid_argument("sweep plan: FIXED n_tr must be >= 1");
    }
    if (pairs != 1 && pairs != 2) throw std::invalid_argument("sweep plan: pairs must be 1 or 2");
    if (threads < 1) throw std::invalid_argument("sweep plan: thread budget must be >= 1");
}

std::vector<double> resize_state(std::span<const double> state, const BasisSpec& from, const BasisSpec& to) {
    if (from.n_atoms() != to.n_atoms()) throw std::invalid_argument("resize_state: atom counts differ");
    if (state.size() != from.dim()) throw std::invalid_argument("resize_state: state/basis size mismatch");
    std::vector<double> out(to.dim(), 0.0);
    const int n_max = std::min(from.n_tr(), to.n_tr());
    for (int n = 0; n <= n_max; ++n) {
        for (int m = 0; m < to.spin_dim(); ++m) out[to.index(n, m)] = state[from.index(n, m)];
    }
    return out;
}

std::vector<int> ntr_schedule(const NtrAuto& policy) {
    std::vector<int> s;
    double current = policy.start;
    int value = policy.start;
    while (value <= policy.cap) {
        s.push_back(value);
        current = std::ceil(current * policy.growth);
        value = std::max(value + 1, static_cast<int>(current));
        current = value;
    }
    return s;
}

NtrConvergence converge_ntr(const ModelParams& params, const NtrAuto& policy, double solver_tol, int pairs,
                            std::span<const double> warm, const BasisSpec* warm_basis) {
    const std::vector<int> schedule = ntr_schedule(policy);
    NtrConvergence out;
    std::optional<SolvedPoint> prev;
    for (int n_tr : schedule) {
        const std::span<const double> seed = prev ? std::span<const double>(prev->ground.vectors[0]) : warm;
        const BasisSpec* seed_basis = prev ? &prev->basis : warm_basis;
        SolvedPoint cur = solve_fixed(params, n_tr, solver_tol, 1, seed, seed_basis);
        out.iterations += cur.iterations;
        out.trace.emplace_back(n_tr, cur.ground.energies[0]);
        if (prev) {
            const double e_prev = prev->ground.energies[0];
            const double e_cur = cur.ground.energies[0];
            if (std::abs(e_prev - e_cur) <= policy.tolerance * std::max(1.0, std::abs(e_cur))) {
                out.n_tr = prev->basis.n_tr();
                if (pairs == 2) {
                    SolvedPoint two = solve_fixed(params, out.n_tr, solver_tol, 2, prev->ground.vectors[0], &prev->basis);
                    out.iterations += two.iterations;
                    out.ground = std::move(two.ground);
                } else {
                    out.ground = std::move(prev->ground);
                }
                return out;
            }
        }
        prev = std::move(cur);
    }
    throw NtrConvergenceError("converge_ntr: no convergence up to N_tr cap " + std::to_string(policy.cap),
                              std::move(out.trace));
}

std::vector<SweepRow> run_sweep(const SweepPlan& plan) {
    plan.validate();
    const std::vector<double> couplings = plan.grid.values();
    std::vector<std::vector<ModelParams>> chains;
    for (int n : plan.atom_counts) {
        std::vector<ModelParams> chain;
        for (double c : couplings) chain.push_back(make_params(plan.model, plan.delta, c, plan.grid.unit, n));
        chains.push_back(std::move(chain));
    }
    auto results = run_chains(chains, plan.ntr, plan.solver_tol, plan.pairs, plan.threads);
    std::vector<SweepRow> rows;
    for (auto& chain : results) {
        for (auto& row : chain) rows.push_back(std::move(row));
    }
    return rows;
}

ScalingReport verify_scaling(int n_atoms, int n_reference, const std::vector<double>& f_grid, const NtrPolicy& ntr,
                             double delta, double solver_tol, int threads) {
    if (n_reference < 1 || n_atoms < n_reference) {
        throw std::invalid_argument("verify_scaling: need N >= N1 >= 1");
    }
    ScalingReport rep;
    rep.n_atoms = n_atoms;
    rep.n_reference = n_reference;
    std::vector<ModelParams> chain_n;
    std::vector<ModelParams> chain_n1;
    for (double f : f_grid) {
        ScalingPoint p;
        p.f = f;
        try {
            p.f1 = scaled_coupling(f, n_atoms, n_reference);
        } catch (const std::domain_error&) {
            p.valid = false;
            ++rep.skipped;
            rep.points.push_back(p);
            continue;
        }
        chain_n.push_back(ModelParams::from_f(ModelKind::Gidm, delta, f, n_atoms));
        chain_n1.push_back(ModelParams::from_f(ModelKind::Gidm, delta, p.f1, n_reference));
        rep.points.push_back(p);
    }
    const auto results = run_chains({chain_n, chain_n1}, ntr, solver_tol, 1, threads);
    std::size_t k = 0;
    double sum = 0.0;
    std::size_t counted = 0;
    for (auto& p : rep.points) {
        if (!p.valid) continue;
        const SweepRow& a = results[0][k];
        const SweepRow& b = results[1][k];
        ++k;
        if (!a.converged || !b.converged) {
            p.valid = false;
            ++rep.skipped;
            continue;
        }
        p.eps_n = a.obs.epsilon;
        p.eps_n1 = b.obs.epsilon;
        p.obs_n = a.obs;
        p.obs_n1 = b.obs;
        p.deviation = std::abs(p.eps_n - p.eps_n1);
        rep.max_deviation = std::max(rep.max_deviation, p.deviation);
        sum += p.deviation;
        ++counted;
    }
    rep.mean_deviation = counted > 0 ? sum / static_cast<double>(counted) : 0.0;
    return rep;
}

}  // namespace dicke
