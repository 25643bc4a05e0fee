#include "infoqm/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "infoqm/analysis.hpp"
#include "infoqm/error.hpp"
#include "infoqm/io.hpp"
#include "infoqm/maxent.hpp"
#include "infoqm/nls.hpp"
#include "infoqm/oscillator.hpp"
#include "infoqm/series.hpp"

#ifndef INFOQM_VERSION
#define INFOQM_VERSION "0.0.0"
#endif

namespace infoqm {

namespace {

using io::Json;

unsigned resolve_threads() {
    const char* env = std::getenv("INFOQM_THREADS");
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (env == nullptr) return hw;
    const std::string s = env;
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || v < 1 || v > 4096)
        throw ValidationError("INFOQM_THREADS must be a positive integer, got '" + s + "'");
    return static_cast<unsigned>(v);
}

/// Shared state of one invocation: where the report goes and what the
/// manifest records.
struct Session {
    Session(std::vector<std::string> a, std::ostream& o, std::ostream& e)
        : args(std::move(a)), out(o), err(e) {}

    std::vector<std::string> args;
    std::ostream& out;
    std::ostream& err;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::vector<std::string> warnings;
    unsigned threads = 1;

    void warn(const std::string& w) {
        warnings.push_back(w);
        err << "infoqm: warning: " << w << "\n";
    }

    void emit(const std::string& path, const std::string& content) {
        if (path.empty()) {
            out << content;
            return;
        }
        io::write_file(path, content);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const Json manifest = {
            {"tool", "infoqm"},
            {"version", INFOQM_VERSION},
            {"command", args},
            {"output", path},
            {"threads", threads},
            {"wall_time_seconds", wall},
            {"warnings", warnings},
        };
        io::write_file(path + ".manifest.json", io::dump(manifest));
    }
};

struct MaxentArgs {
    std::string spec;
    std::string init;
    double tol = 1e-10;
    std::string out;
};

void run_maxent_fit(Session& s, const MaxentArgs& a) {
    const Json spec_json = io::read_json_file(a.spec);
    if (io::is_2d_spec(spec_json)) {
        if (!a.init.empty()) s.warn("--init is ignored for two-dimensional specs");
        const MomentSpec2D spec = io::parse_moment_spec_2d(spec_json);
        const ExpFamilyDensity2D d = fit_multipliers_2d(spec, a.tol);
        s.emit(a.out, io::dump(io::to_json(d, spec)));
        return;
    }
    const MomentSpec1D spec = io::parse_moment_spec_1d(spec_json);
    FitOptions1D options;
    options.tol = a.tol;
    options.factors = io::parse_factors(spec_json.value("factors", Json()));
    if (!a.init.empty()) {
        const Json init = io::read_json_file(a.init);
        if (!init.contains("multipliers") || !init.at("multipliers").is_array())
            throw ValidationError("--init file has no 'multipliers' array");
        options.init = init.at("multipliers").get<std::vector<double>>();
    }
    const ExpFamilyDensity1D d = fit_multipliers_1d(spec, options);
    if (d.diagnostics.tail_mass > 1e-14)
        s.warn("tail mass outside the integration window is " +
               io::format_number(d.diagnostics.tail_mass, 3));
    s.emit(a.out, io::dump(io::to_json(d, spec)));
}

struct SeriesArgs {
    std::string kind = "binomial";
    double a = 1.0;
    double k = -1.0;
    double x = 0.5;
    double y = 1.0;
    int n_max = 60;
    int digits = 12;
    std::string out;
};

void run_series_probe(Session& s, const SeriesArgs& a) {
    if (a.n_max < 0 || a.n_max > kMaxSeriesTerms)
        throw ValidationError("--n-max must lie in [0, " + std::to_string(kMaxSeriesTerms) + "]");
    std::function<SeriesSum(int)> eval;
    if (a.kind == "binomial")
        eval = [&a](int n) { return binomial_series_eval(a.a, a.k, a.x, n); };
    else if (a.kind == "binomial_xy")
        eval = [&a](int n) { return two_var_series_eval(TwoVarSeries::binomial_xy, a.x, a.y, n, a.k); };
    else
        eval = [&a](int n) { return two_var_series_eval(TwoVarSeries::exp_xy, a.x, a.y, n); };

    if (!eval(0).convergent) s.warn("series is outside its region of convergence");
    std::string csv = "N,partial_sum,cauchy_diff\n";
    for (const SeriesProbeRow& r : series_probe(eval, a.n_max))
        csv += std::to_string(r.n) + "," + io::format_number(r.partial_sum, a.digits) + "," +
               io::format_number(r.cauchy_diff, a.digits) + "\n";
    s.emit(a.out, csv);
}

struct TableArgs {
    int n_max = 7;
    std::string format = "csv";
    int digits = 6;
    std::string out;
};

void run_oscillator_table(Session& s, const TableArgs& a) {
    const std::vector<TableRow> rows = table(a.n_max, s.threads);
    if (a.format == "json") {
        Json arr = Json::array();
        const int d = std::min(a.digits, 12);
        for (const TableRow& r : rows)
            arr.push_back({{"n", r.n},
                           {"k", r.k},
                           {"alpha", io::round_significant(r.alpha, d)},
                           {"beta", io::round_significant(r.beta, d)},
                           {"lambda", io::round_significant(r.lambda, d)},
                           {"energy", io::round_significant(r.energy, d)}});
        s.emit(a.out, io::dump({{"rows", arr}}));
        return;
    }
    std::string csv = "n,k,alpha,beta,lambda,energy\n";
    for (const TableRow& r : rows)
        csv += std::to_string(r.n) + "," + std::to_string(r.k) + "," +
               io::format_number(r.alpha, a.digits) + "," + io::format_number(r.beta, a.digits) +
               "," + io::format_number(r.lambda, a.digits) + "," +
               io::format_number(r.energy, a.digits) + "\n";
    s.emit(a.out, csv);
}

struct GroundArgs {
    std::vector<double> domain{-12.0, 12.0};
    std::size_t grid = 2048;
    std::string potential = "harmonic";
    bool lambda_solve = false;
    double b = 0.0;
    std::vector<double> bracket{-3.0, -0.5};
    std::uint64_t seed = 0;
    std::optional<double> tau;
    double tol = 1e-8;
    int max_iters = 200000;
    double eps_log = 1e-100;
    std::string scheme = "semi-implicit";
    std::string resume;
    int probes = 0;
    std::string out;
};

Json solution_json(const GroundStateSolution& sol) {
    return {
        {"flow_norm", sol.flow_norm},
        {"stationarity_residual", sol.diagnostics.stationarity_residual},
        {"energy_increases", sol.diagnostics.energy_increases},
        {"max_energy_increase", sol.diagnostics.max_energy_increase},
        {"final_energy", sol.diagnostics.final_energy},
    };
}

void run_nls_ground(Session& s, const GroundArgs& a) {
    if (!(a.domain[0] < a.domain[1])) throw ValidationError("--domain needs lo < hi");
    if (a.grid < 3 || a.grid > 1000000) throw ValidationError("--grid must lie in [3, 1e6]");
    const Grid1D grid(a.domain[0], a.domain[1], a.grid);
    GridProblem p = a.potential == "harmonic"
                        ? GridProblem::harmonic(grid, a.b)
                        : GridProblem{grid, std::vector<double>(grid.size(), 0.0), a.b, 1e-100};
    p.eps_log = a.eps_log;
    p.validate();

    FlowConfig cfg = FlowConfig::defaults_for(p);
    if (a.tau) cfg.tau = *a.tau;
    cfg.tol_flow = a.tol;
    cfg.max_iters = a.max_iters;
    cfg.seed = a.seed;
    cfg.scheme = a.scheme == "explicit" ? FlowScheme::explicit_euler : FlowScheme::semi_implicit;
    cfg.validate(p);

    std::vector<double> init;
    if (!a.resume.empty()) {
        const Json prev = io::read_json_file(a.resume);
        if (!prev.contains("psi") || !prev.contains("grid"))
            throw ValidationError("--resume file has no 'psi'/'grid'");
        const Json& g = prev.at("grid");
        if (g.value("points", std::size_t{0}) != grid.size() ||
            std::abs(g.value("x_min", NAN) - grid.x_min()) > 1e-12 ||
            std::abs(g.value("x_max", NAN) - grid.x_max()) > 1e-12)
            throw ValidationError("--resume state was computed on a different grid");
        init = prev.at("psi").get<std::vector<double>>();
    } else {
        init = random_positive_init(grid, a.seed, 0);
    }

    Json report;
    GroundStateSolution sol;
    if (a.lambda_solve) {
        SelfConsistentResult r =
            self_consistent_lambda(p, cfg, a.bracket[0], a.bracket[1], std::span<const double>(init));
        report["lambda"] = r.lambda;
        report["outer_iterations"] = r.outer_iterations;
        sol = std::move(r.solution);
    } else {
        sol = gradient_flow_ground_state(p, cfg, std::span<const double>(init));
        report["lambda"] = nullptr;
    }
    if (sol.diagnostics.energy_increases > 0)
        s.warn("flow energy rose at " + std::to_string(sol.diagnostics.energy_increases) +
               " checkpoints");

    if (a.probes > 0) {
        std::optional<std::array<double, 2>> bracket;
        if (a.lambda_solve) bracket = std::array<double, 2>{a.bracket[0], a.bracket[1]};
        const UniquenessReport u = uniqueness_probe(p, cfg, a.probes, bracket, s.threads);
        Json failures = Json::array();
        for (std::size_t i = 0; i < u.failures.size(); ++i)
            if (!u.failures[i].empty()) failures.push_back({{"init", i}, {"error", u.failures[i]}});
        report["uniqueness"] = {{"values", u.values},
                                {"failures", failures},
                                {"max_value_spread", u.max_value_spread},
                                {"max_state_distance", u.max_state_distance}};
    }

    report["b"] = sol.b;
    report["mu"] = sol.mu;
    report["iterations"] = sol.iterations;
    report["grid"] = {{"x_min", grid.x_min()}, {"x_max", grid.x_max()}, {"points", grid.size()}};
    report["psi"] = sol.psi;
    report["diagnostics"] = solution_json(sol);
    report["config"] = {{"tau", cfg.tau},           {"tol_flow", cfg.tol_flow},
                        {"max_iters", cfg.max_iters}, {"seed", cfg.seed},
                        {"scheme", a.scheme},       {"eps_log", p.eps_log},
                        {"potential", a.potential}};
    s.emit(a.out, io::dump(report));
}

struct GramArgs {
    int n_max = 7;
    std::string family = "log";
    std::vector<double> domain{-14.0, 14.0};
    std::size_t points = 8001;
    int digits = 12;
    std::string out;
};

BasisSet make_basis(const std::string& family, int n_max, const Grid1D& grid) {
    return family == "linear" ? linear_basis(n_max, grid) : log_basis(n_max, grid);
}

void run_analyze_gram(Session& s, const GramArgs& a) {
    if (!(a.domain[0] < a.domain[1]) || a.points < 3)
        throw ValidationError("analysis grid needs lo < hi and at least 3 points");
    const Grid1D grid(a.domain[0], a.domain[1], a.points);
    const GramReport g = gram_matrix(make_basis(a.family, a.n_max, grid), s.threads);
    std::string csv = "n";
    for (std::size_t j = 0; j < g.matrix.size(); ++j) csv += "," + std::to_string(j);
    csv += "\n";
    for (std::size_t i = 0; i < g.matrix.size(); ++i) {
        csv += std::to_string(i);
        for (double v : g.matrix[i]) csv += "," + io::format_number(v, a.digits);
        csv += "\n";
    }
    s.emit(a.out, csv);
}

struct ProjectArgs {
    std::string target;
    std::vector<int> orders;
    std::string out;
};

/// Target samples and label from {"type": "state", "n", "family"} or
/// {"type": "gaussian_moment", "power", "width", "scale"}:
/// scale * x^power * exp(-x^2 / (2 width^2)).
std::pair<std::vector<double>, std::string> make_target(const Json& t, const Grid1D& grid) {
    const std::string type = t.value("type", "");
    if (type == "state") {
        const int n = t.value("n", -1);
        const std::string family = t.value("family", "log");
        const OscillatorState st = family == "linear" ? linear_state(n) : solve_state(n);
        return {grid.sample([&st](double x) { return psi_eval(st, x); }),
                family + " state n=" + std::to_string(n)};
    }
    if (type == "gaussian_moment") {
        const int power = t.value("power", 0);
        const double width = t.value("width", 1.0);
        const double scale = t.value("scale", 1.0);
        if (power < 0 || power > 32 || !(width > 0.0))
            throw ValidationError("gaussian_moment target needs power in [0, 32] and width > 0");
        return {grid.sample([=](double x) {
                    return scale * std::pow(x, power) * std::exp(-x * x / (2.0 * width * width));
                }),
                "gaussian_moment power=" + std::to_string(power) +
                    " width=" + io::format_number(width, 12) + " scale=" + io::format_number(scale, 12)};
    }
    throw ValidationError("target type must be 'state' or 'gaussian_moment'");
}

void run_analyze_project(Session& s, const ProjectArgs& a, bool orders_given) {
    const Json j = io::read_json_file(a.target);
    const Json& t = j.contains("target") ? j.at("target") : j;
    const Json basis_cfg = j.value("basis", Json::object());
    const Json grid_cfg = j.value("grid", Json::object());
    const auto domain = grid_cfg.value("domain", std::vector<double>{-14.0, 14.0});
    const auto points = grid_cfg.value("points", std::size_t{8001});
    if (domain.size() != 2 || !(domain[0] < domain[1]) || points < 3)
        throw ValidationError("grid needs domain [lo, hi] with lo < hi and at least 3 points");
    const Grid1D grid(domain[0], domain[1], points);
    const std::string family = basis_cfg.value("family", "log");
    const int n_max = basis_cfg.value("n_max", 7);
    const BasisSet basis = make_basis(family, n_max, grid);

    std::vector<int> orders = a.orders;
    if (!orders_given) {
        if (j.contains("orders")) {
            orders = j.at("orders").get<std::vector<int>>();
        } else {
            for (std::size_t m = 1; m <= basis.size(); ++m) orders.push_back(static_cast<int>(m));
        }
    }
    const auto [samples, label] = make_target(t, grid);

    auto report_json = [&](const ProjectionReport& r) {
        return Json{{"target", r.target},
                    {"orders", r.orders},
                    {"coefficients", r.coefficients},
                    {"residuals", r.residuals},
                    {"condition_numbers", r.condition_numbers},
                    {"basis", {{"family", family}, {"n_max", n_max}}},
                    {"grid", {{"x_min", grid.x_min()}, {"x_max", grid.x_max()}, {"points", grid.size()}}}};
    };
    try {
        s.emit(a.out, io::dump(report_json(completeness_projection(samples, label, basis, orders))));
    } catch (const IllConditionedError& e) {
        Json partial = report_json(e.partial);
        partial["error"] = e.what();
        s.emit(a.out, io::dump(partial));
        throw;
    }
}

}  // namespace

const char* version() { return INFOQM_VERSION; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Session session(args, out, err);

    CLI::App app{"Information-theoretic quantum mechanics toolkit", "infoqm"};
    app.set_version_flag("--version", std::string(INFOQM_VERSION));
    app.require_subcommand(1);

    MaxentArgs maxent;
    auto* maxent_cmd = app.add_subcommand("maxent", "Maximum-entropy densities from moments");
    maxent_cmd->require_subcommand(1);
    auto* fit = maxent_cmd->add_subcommand("fit", "Fit exponential-family multipliers");
    fit->add_option("--spec", maxent.spec, "Moment spec JSON")->required();
    fit->add_option("--init", maxent.init, "Previous fit JSON used as the starting point");
    fit->add_option("--tol", maxent.tol, "Moment tolerance")->check(CLI::PositiveNumber);
    fit->add_option("--out", maxent.out, "Output JSON path");

    SeriesArgs series;
    auto* series_cmd = app.add_subcommand("series", "Power-series tools");
    series_cmd->require_subcommand(1);
    auto* probe = series_cmd->add_subcommand("probe", "Partial sums and Cauchy differences");
    probe->add_option("--kind", series.kind)
        ->check(CLI::IsMember({"binomial", "binomial_xy", "exp_xy"}));
    probe->add_option("--a", series.a);
    probe->add_option("--k", series.k);
    probe->add_option("--x", series.x);
    probe->add_option("--y", series.y);
    probe->add_option("--n-max", series.n_max);
    probe->add_option("--digits", series.digits)->check(CLI::Range(1, 17));
    probe->add_option("--out", series.out, "Output CSV path");

    TableArgs tbl;
    auto* osc_cmd = app.add_subcommand("oscillator", "Closed-form logarithmic oscillator states");
    osc_cmd->require_subcommand(1);
    auto* table_cmd = osc_cmd->add_subcommand("table", "alpha, beta, lambda and energy per level");
    table_cmd->add_option("--n-max", tbl.n_max);
    table_cmd->add_option("--format", tbl.format)->check(CLI::IsMember({"csv", "json"}));
    table_cmd->add_option("--digits", tbl.digits)->check(CLI::Range(1, 17));
    table_cmd->add_option("--out", tbl.out);

    GroundArgs ground;
    auto* nls_cmd = app.add_subcommand("nls", "Grid solver for the logarithmic equation");
    nls_cmd->require_subcommand(1);
    auto* ground_cmd = nls_cmd->add_subcommand("ground", "Nodeless ground state by gradient flow");
    ground_cmd->add_option("--domain", ground.domain)->expected(2);
    ground_cmd->add_option("--grid", ground.grid);
    ground_cmd->add_option("--potential", ground.potential)
        ->check(CLI::IsMember({"harmonic", "zero"}));
    auto* lambda_flag = ground_cmd->add_flag("--lambda-solve", ground.lambda_solve,
                                             "Solve for the self-consistent lambda");
    ground_cmd->add_option("--b", ground.b, "Fixed log coefficient")->excludes(lambda_flag);
    ground_cmd->add_option("--bracket", ground.bracket)->expected(2);
    ground_cmd->add_option("--seed", ground.seed);
    ground_cmd->add_option("--tau", ground.tau);
    ground_cmd->add_option("--tol", ground.tol)->check(CLI::PositiveNumber);
    ground_cmd->add_option("--max-iters", ground.max_iters);
    ground_cmd->add_option("--eps-log", ground.eps_log);
    ground_cmd->add_option("--scheme", ground.scheme)
        ->check(CLI::IsMember({"semi-implicit", "explicit"}));
    ground_cmd->add_option("--resume", ground.resume, "Previous solution JSON used as the start");
    ground_cmd->add_option("--probes", ground.probes, "Repeat from this many seeded starts")
        ->check(CLI::Range(2, 64));
    ground_cmd->add_option("--out", ground.out);

    GramArgs gram;
    ProjectArgs project;
    auto* analyze_cmd = app.add_subcommand("analyze", "Overlaps and projections of the state family");
    analyze_cmd->require_subcommand(1);
    auto* gram_cmd = analyze_cmd->add_subcommand("gram", "Gram matrix of the closed-form states");
    gram_cmd->add_option("--n-max", gram.n_max);
    gram_cmd->add_option("--family", gram.family)->check(CLI::IsMember({"log", "linear"}));
    gram_cmd->add_option("--domain", gram.domain)->expected(2);
    gram_cmd->add_option("--points", gram.points);
    gram_cmd->add_option("--digits", gram.digits)->check(CLI::Range(1, 17));
    gram_cmd->add_option("--out", gram.out);
    auto* project_cmd = analyze_cmd->add_subcommand("project", "Least-squares projection of a target");
    project_cmd->add_option("--target", project.target, "Target spec JSON")->required();
    auto* orders_opt = project_cmd->add_option("--orders", project.orders)->delimiter(',');
    project_cmd->add_option("--out", project.out);

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("infoqm");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "infoqm: " << e.what() << "\n\n" << app.help();
        return kExitInvalid;
    }

    try {
        session.threads = resolve_threads();
        if (*fit) run_maxent_fit(session, maxent);
        else if (*probe) run_series_probe(session, series);
        else if (*table_cmd) run_oscillator_table(session, tbl);
        else if (*ground_cmd) run_nls_ground(session, ground);
        else if (*gram_cmd) run_analyze_gram(session, gram);
        else if (*project_cmd) run_analyze_project(session, project, orders_opt->count() > 0);
        return kExitOk;
    } catch (const ConvergenceError& e) {
        err << "infoqm: error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const InstabilityError& e) {
        err << "infoqm: error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const Error& e) {
        err << "infoqm: error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const nlohmann::json::exception& e) {
        err << "infoqm: error: malformed JSON input: " << e.what() << "\n";
        return kExitInvalid;
    }
}

}  // namespace infoqm
