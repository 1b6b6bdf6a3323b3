#include "dicke/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "dicke/eigensolver.hpp"
#include "dicke/observables.hpp"
#include "dicke/verify.hpp"

namespace dicke::cli {

namespace {

struct RawArgs {
    std::string model;
    std::vector<int> atoms;
    std::string lambda;
    std::string f;
    double delta = 1.0;
    std::string ntr = "auto";
    int ntr_start = NtrAuto{}.start;
    double ntr_growth = NtrAuto{}.growth;
    double ntr_tol = NtrAuto{}.tolerance;
    int ntr_cap = NtrAuto{}.cap;
    std::vector<int> ntr_list;
    double tol = 1e-10;
    std::string format;
    std::string output = "-";
    int threads = 0;
    int verbosity = 0;
    bool timing = false;
    std::string histogram;
    std::string matrix;
};

CouplingGrid parse_coupling(const std::string& text, CouplingUnit unit, const char* flag) {
    CouplingGrid g;
    g.unit = unit;
    const auto first = text.find(':');
    try {
        if (first == std::string::npos) {
            std::size_t used = 0;
            g.min = g.max = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            g.points = 1;
        } else {
            const auto second = text.find(':', first + 1);
            if (second == std::string::npos) throw std::invalid_argument(text);
            g.min = std::stod(text.substr(0, first));
            g.max = std::stod(text.substr(first + 1, second - first - 1));
            g.points = std::stoi(text.substr(second + 1));
            if (g.points < 2) throw UsageError(std::string(flag) + ": a range needs at least 2 points");
            if (!(g.max > g.min)) throw UsageError(std::string(flag) + ": range must be strictly increasing");
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception&) {
        throw UsageError(std::string(flag) + ": expected a value or min:max:points, got '" + text + "'");
    }
    if (g.min < 0.0) throw UsageError(std::string(flag) + ": coupling must be >= 0");
    return g;
}

void add_model_options(CLI::App* sub, RawArgs& a) {
    sub->add_option("--model", a.model, "dm or gidm")->required()->check(CLI::IsMember({"dm", "gidm"}));
    sub->add_option("-N,--atoms", a.atoms, "atom counts, comma separated")->required()->delimiter(',')
        ->check(CLI::PositiveNumber);
    auto* lam = sub->add_option("--lambda", a.lambda, "coupling lambda: value or min:max:points");
    auto* f = sub->add_option("--f", a.f, "coupling f = lambda/sqrt(N): value or min:max:points");
    lam->excludes(f);
    f->excludes(lam);
    sub->add_option("--delta", a.delta, "level splitting (default 1)")->check(CLI::PositiveNumber);
    sub->add_option("--ntr", a.ntr, "photon cutoff: integer or 'auto'");
    sub->add_option("--ntr-start", a.ntr_start, "AUTO: first cutoff")->check(CLI::PositiveNumber);
    sub->add_option("--ntr-growth", a.ntr_growth, "AUTO: growth factor (> 1)");
    sub->add_option("--ntr-tol", a.ntr_tol, "AUTO: relative energy tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--ntr-cap", a.ntr_cap, "AUTO: largest cutoff")->check(CLI::PositiveNumber);
    sub->add_option("--tol", a.tol, "eigensolver residual tolerance")->check(CLI::Range(1e-14, 1e-4));
    sub->add_option("--threads", a.threads, "thread budget")->check(CLI::PositiveNumber);
    sub->add_option("--format", a.format, "output format")->check(CLI::IsMember({"text", "csv", "json"}));
    sub->add_option("-o,--output", a.output, "output path or '-' for standard output");
    sub->add_flag("-v,--verbose", a.verbosity, "verbosity");
}

NtrPolicy make_ntr(const RawArgs& a) {
    if (a.ntr == "auto") {
        if (!(a.ntr_growth > 1.0)) throw UsageError("--ntr-growth: must be > 1");
        if (a.ntr_cap < a.ntr_start) throw UsageError("--ntr-cap: must be >= --ntr-start");
        return NtrAuto{a.ntr_start, a.ntr_growth, a.ntr_tol, a.ntr_cap};
    }
    try {
        std::size_t used = 0;
        const int v = std::stoi(a.ntr, &used);
        if (used != a.ntr.size() || v < 1) throw std::invalid_argument(a.ntr);
        return NtrFixed{v};
    } catch (const std::exception&) {
        throw UsageError("--ntr: expected a positive integer or 'auto', got '" + a.ntr + "'");
    }
}

Format parse_format(const std::string& s) {
    if (s == "text") return Format::Text;
    if (s == "json") return Format::Json;
    return Format::Csv;
}

Gauge gauge_of(ModelKind kind) { return kind == ModelKind::Dm ? Gauge::Raw : Gauge::PhaseRotated; }

std::ofstream open_side_file(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

struct PointSolve {
    BasisSpec basis;
    SparseHamiltonian hamiltonian;
    GroundState ground;
};

PointSolve solve_point(const RunConfig& c, const ModelParams& params) {
    int n_tr = 0;
    GroundState g;
    if (const auto* fixed = std::get_if<NtrFixed>(&c.ntr)) {
        n_tr = fixed->value;
    } else {
        NtrConvergence conv = converge_ntr(params, std::get<NtrAuto>(c.ntr), c.tol, 2);
        n_tr = conv.n_tr;
        g = std::move(conv.ground);
    }
    BasisSpec basis = make_basis(params.n_atoms(), n_tr);
    SparseHamiltonian h = assemble(basis, params);
    if (g.size() == 0) g = lowest_eigenpairs(h, 2, c.tol);
    return {basis, std::move(h), std::move(g)};
}

int run_ground(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const ModelParams params = make_params(c.model, c.delta, c.coupling.min, c.coupling.unit, c.atoms.front());
    std::optional<PointSolve> solved;
    try {
        solved = solve_point(c, params);
    } catch (const NtrConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        for (const auto& [n, e0] : e.trace()) err << "  ntr=" << n << " E0=" << format_double(e0) << '\n';
        return kExitConvergence;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConvergence;
    }
    const PointSolve& s = *solved;
    const ObservableSet o = compute_observables(s.ground, s.basis, gauge_of(params.kind()));

    if (!c.histogram_path.empty()) {
        auto file = open_side_file(c.histogram_path);
        write_histogram(o.photons, file);
    }
    if (!c.matrix_path.empty()) {
        auto file = open_side_file(c.matrix_path);
        write_matrix_market(s.hamiltonian.matrix, file);
    }
    if (o.truncation_warning) err << "warning: photon weight near the cutoff exceeds 1e-8; raise --ntr\n";

    if (c.format == Format::Text) {
        std::ostringstream text;
        text << "model      " << to_string(params.kind()) << "\n"
             << "N          " << params.n_atoms() << "\n"
             << "delta      " << format_double(params.delta()) << "\n"
             << "lambda     " << format_double(params.lambda()) << "\n"
             << "f          " << format_double(params.f()) << "\n"
             << "ntr        " << s.basis.n_tr() << "  (dim " << s.basis.dim() << ")\n"
             << "E0         " << format_double(s.ground.energies[0]) << "\n"
             << "epsilon    " << format_double(o.epsilon) << "\n"
             << "eta        " << format_double(o.eta) << "\n"
             << "alpha      " << format_double(o.alpha) << "\n"
             << "c0 c1 cmult " << format_double(o.photons.c0) << ' ' << format_double(o.photons.c1) << ' '
             << format_double(o.photons.cmult) << "\n"
             << "sigma_x    " << format_double(o.sigma_x) << "\n"
             << "sigma_p    " << format_double(o.sigma_p) << "\n"
             << "r          " << format_double(o.r) << "\n"
             << "xi         " << format_double(o.xi) << "\n"
             << "entropy    " << format_double(o.pi_entropy) << "\n"
             << "gap        " << format_double(o.gap) << (o.degenerate ? "  (degenerate doublet)" : "") << "\n"
             << "residual   " << format_double(s.ground.residuals[0]) << "\n";
        if (c.output == "-") {
            out << text.str();
        } else {
            auto file = open_side_file(c.output);
            file << text.str();
        }
        return kExitOk;
    }
    SweepRow row;
    row.model = params.kind();
    row.n_atoms = params.n_atoms();
    row.delta = params.delta();
    row.lambda = params.lambda();
    row.f = params.f();
    row.ntr = s.basis.n_tr();
    row.obs = o;
    row.energy = s.ground.energies[0];
    row.iterations = s.ground.iterations;
    row.converged = true;
    if (c.output == "-") {
        if (c.format == Format::Csv) emit_csv({row}, out); else emit_json({row}, out);
    } else {
        emit({row}, c.format == Format::Csv ? OutputFormat::Csv : OutputFormat::Json, c.output);
    }
    return kExitOk;
}

int run_sweep_command(const RunConfig& c, std::ostream& out, std::ostream& err) {
    SweepPlan plan;
    plan.model = c.model;
    plan.delta = c.delta;
    plan.grid = c.coupling;
    plan.atom_counts = c.atoms;
    plan.ntr = c.ntr;
    plan.solver_tol = c.tol;
    plan.threads = c.threads;
    const auto rows = run_sweep(plan);
    const EmitOptions options{c.timing};
    const OutputFormat format = c.format == Format::Json ? OutputFormat::Json : OutputFormat::Csv;
    if (c.output == "-") {
        if (format == OutputFormat::Csv) emit_csv(rows, out, options); else emit_json(rows, out, options);
    } else {
        emit(rows, format, c.output, options);
    }
    std::size_t failed = 0;
    for (const auto& r : rows) {
        if (r.converged) continue;
        ++failed;
        err << "point N=" << r.n_atoms << " lambda=" << format_double(r.lambda) << " failed: " << r.error << '\n';
    }
    if (c.verbosity > 0) err << rows.size() << " points, " << failed << " failed\n";
    return failed == 0 ? kExitOk : kExitConvergence;
}

int run_converge(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const ModelParams params = make_params(c.model, c.delta, c.coupling.min, c.coupling.unit, c.atoms.front());
    std::ostringstream table;
    table << "ntr,E0,epsilon\n";
    int code = kExitOk;
    if (!c.ntr_list.empty()) {
        for (int n_tr : c.ntr_list) {
            const BasisSpec basis = make_basis(params.n_atoms(), n_tr);
            try {
                const GroundState g = lowest_eigenpairs(assemble(basis, params), 1, c.tol);
                table << n_tr << ',' << format_double(g.energies[0]) << ','
                      << format_double(normalized_energy(g.energies[0], params.n_atoms())) << '\n';
            } catch (const ConvergenceError& e) {
                err << "ntr=" << n_tr << ": " << e.what() << '\n';
                code = kExitConvergence;
            }
        }
    } else {
        auto policy = std::get_if<NtrAuto>(&c.ntr);
        const NtrAuto autop = policy ? *policy : NtrAuto{};
        std::vector<std::pair<int, double>> trace;
        try {
            trace = converge_ntr(params, autop, c.tol).trace;
        } catch (const NtrConvergenceError& e) {
            err << "error: " << e.what() << '\n';
            trace = e.trace();
            code = kExitConvergence;
        }
        for (const auto& [n, e0] : trace) {
            table << n << ',' << format_double(e0) << ',' << format_double(normalized_energy(e0, params.n_atoms())) << '\n';
        }
    }
    if (c.output == "-") {
        out << table.str();
    } else {
        auto file = open_side_file(c.output);
        file << table.str();
    }
    return code;
}

int run_verify(std::ostream& out) {
    const auto checks = run_verification_suite();
    bool ok = true;
    for (const auto& ch : checks) {
        char line[256];
        std::snprintf(line, sizeof line, "%-52s %12.3e  <= %8.1e  %s\n", ch.name.c_str(), ch.value, ch.tolerance,
                      ch.passed ? "PASS" : "FAIL");
        out << line;
        ok = ok && ch.passed;
    }
    return ok ? kExitOk : kExitVerification;
}

}  // namespace

int default_threads() {
    if (const char* env = std::getenv("DICKE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
    CLI::App app{"Ground states of the Dicke and gauge-invariant Dicke models by exact diagonalization"};
    app.require_subcommand(1);
    RawArgs a;
    auto* ground = app.add_subcommand("ground", "solve one parameter point and print every observable");
    auto* sweep = app.add_subcommand("sweep", "coupling x N grid, emitted as CSV or JSON");
    auto* converge = app.add_subcommand("converge", "photon cutoff convergence trace for one point");
    auto* verify = app.add_subcommand("verify", "run the built-in oracle cross-checks");
    for (auto* sub : {ground, sweep, converge}) add_model_options(sub, a);
    ground->add_option("--histogram", a.histogram, "write the photon histogram (n,prob) to this file");
    ground->add_option("--dump-matrix", a.matrix, "write the Hamiltonian in MatrixMarket format");
    sweep->add_flag("--timing", a.timing, "record wall time per point in the ms column");
    converge->add_option("--ntr-list", a.ntr_list, "explicit cutoffs, comma separated")->delimiter(',')
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    RunConfig c;
    if (verify->parsed()) {
        c.subcommand = Subcommand::Verify;
        return c;
    }
    CLI::App* active = ground->parsed() ? ground : (sweep->parsed() ? sweep : converge);
    c.subcommand = ground->parsed() ? Subcommand::Ground : (sweep->parsed() ? Subcommand::Sweep : Subcommand::Converge);
    c.model = parse_model_kind(a.model.c_str());
    c.delta = a.delta;
    c.atoms = a.atoms;
    if (a.lambda.empty() && a.f.empty()) throw UsageError("one of --lambda or --f is required");
    c.coupling = a.lambda.empty() ? parse_coupling(a.f, CouplingUnit::F, "--f")
                                  : parse_coupling(a.lambda, CouplingUnit::Lambda, "--lambda");
    c.ntr = make_ntr(a);
    c.ntr_list = a.ntr_list;
    c.tol = a.tol;
    c.output = a.output;
    c.threads = a.threads > 0 ? a.threads : default_threads();
    c.verbosity = a.verbosity;
    c.timing = a.timing;
    c.histogram_path = a.histogram;
    c.matrix_path = a.matrix;

    const bool format_given = active->get_option("--format")->count() > 0;
    if (c.subcommand == Subcommand::Ground) {
        c.format = format_given ? parse_format(a.format) : Format::Text;
        if (c.atoms.size() != 1) throw UsageError("-N: ground takes a single atom count");
        if (c.coupling.points != 1) throw UsageError("--lambda/--f: ground takes a single coupling value");
    } else if (c.subcommand == Subcommand::Converge) {
        c.format = Format::Csv;
        if (c.atoms.size() != 1) throw UsageError("-N: converge takes a single atom count");
        if (c.coupling.points != 1) throw UsageError("--lambda/--f: converge takes a single coupling value");
    } else {
        c.format = format_given ? parse_format(a.format) : Format::Csv;
        if (c.format == Format::Text) throw UsageError("--format: sweep writes csv or json");
    }
    return c;
}

int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
    switch (c.subcommand) {
        case Subcommand::Ground: return run_ground(c, out, err);
        case Subcommand::Sweep: return run_sweep_command(c, out, err);
        case Subcommand::Converge: return run_converge(c, out, err);
        case Subcommand::Verify: return run_verify(out);
    }
    return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::optional<RunConfig> config;
    try {
        config = parse_args(argc, argv, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (!config) return kExitOk;
    try {
        return execute(*config, out, err);
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConvergence;
    }
}

}  // namespace dicke::cli
