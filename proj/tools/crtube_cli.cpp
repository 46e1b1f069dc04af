#include "crtube/crtube.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace crtube;

enum exit_code : int { exit_pass = 0, exit_verdict_failure = 1, exit_config_error = 2 };

struct OutputOptions
{
    std::string out;
    std::string format = "json";
};

struct Options
{
    OutputOptions output;
    std::string grid;
    double tol = 1e-8;
    double eps = default_rank_epsilon;
    std::vector<std::string> params;

    std::string rho, p, q, P, Q;
    int sign = 1;
    double pprime0 = 0.0;
    std::optional<double> C;

    int trials = 100;
    std::uint64_t seed = 42;
    double jet_tol = 1e-7;
    double chi_perturbation = 0.0;
};

double parse_double(const std::string& text, const std::string& what)
{
    double x = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw ConfigError(what + ": '" + text + "' is not a number");
    }
    return x;
}

expr::Params parse_params(const Options& o)
{
    expr::Params out;
    for (const auto& kv : o.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("--param: expected name=value, got '" + kv + "'");
        }
        out[kv.substr(0, eq)] = parse_double(kv.substr(eq + 1), "--param " + kv.substr(0, eq));
    }
    if (o.C) {
        out["C"] = *o.C;
    }
    return out;
}

ConicPoly parse_conic(const std::string& text, const std::string& flag)
{
    std::vector<double> a;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string::npos ? text.size() : comma;
        a.push_back(parse_double(text.substr(start, end - start), flag));
        start = end + 1;
    }
    if (a.size() != 3) {
        throw ConfigError(flag + ": expected a0,a1,a2");
    }
    return ConicPoly(a[0], a[1], a[2]);
}

GridSpec grid_of(const Options& o)
{
    return o.grid.empty() ? GridSpec{} : GridSpec::parse(o.grid);
}

void print_summary(const ResidualReport& r, std::ostream& os)
{
    os << "family: " << r.family << '\n';
    os << "points: " << r.points.size() << ", excluded: " << r.excluded << ", errors: " << r.errors.size() << '\n';
    for (const auto& [name, s] : r.summary) {
        os << "  " << name << ": max_abs " << detail::format17(s.max_abs) << ", rms " << detail::format17(s.rms)
           << '\n';
    }
    for (const auto& [name, value] : r.verdicts) {
        const auto it = r.expected.find(name);
        os << "  " << name << ": " << (value ? "true" : "false");
        if (it != r.expected.end()) {
            os << (it->second == value ? "  (as expected)" : "  (EXPECTED " + std::string(it->second ? "true" : "false") + ")");
        }
        os << '\n';
    }
    constexpr std::size_t shown = 5;
    for (std::size_t i = 0; i < r.errors.size() && i < shown; ++i) {
        const auto& e = r.errors[i];
        os << "  error at (" << e.t1 << ", " << e.t2 << "): " << e.message << '\n';
    }
    if (r.errors.size() > shown) {
        os << "  ... " << r.errors.size() - shown << " more errors\n";
    }
    os << (r.pass() ? "PASS" : "FAIL") << '\n';
}

int emit(const ResidualReport& r, const OutputOptions& out)
{
    if (!out.out.empty()) {
        std::ofstream file(out.out);
        if (!file) {
            throw ConfigError("--out: cannot open '" + out.out + "'");
        }
        if (out.format == "csv") {
            write_csv(r, file);
        } else {
            write_json(r, file);
        }
    }
    print_summary(r, std::cout);
    if (!r.errors.empty()) {
        std::cerr << r.errors.front().kind << ": " << r.errors.size() << " grid point(s) failed\n";
        return exit_config_error;
    }
    return r.pass() ? exit_pass : exit_verdict_failure;
}

int run_residuals(const Options& o)
{
    const GridSpec grid = grid_of(o);
    const auto params = parse_params(o);
    const int routes = !o.rho.empty() + (!o.p.empty() || !o.q.empty()) + (!o.P.empty() || !o.Q.empty());
    if (routes != 1) {
        throw ConfigError("residuals: give exactly one of --rho, --p/--q or --P/--Q");
    }
    if (!o.rho.empty()) {
        return emit(expr_report(expr::parse(o.rho, {"t1", "t2"}), params, grid, o.tol, o.eps), o.output);
    }
    if (!o.p.empty() || !o.q.empty()) {
        if (o.p.empty() || o.q.empty()) {
            throw ConfigError("residuals: --p and --q go together");
        }
        nlohmann::json pj = params;
        const PQFamily fam(function_of_v(o.p, params), function_of_v(o.q, params));
        return emit(pq_report(fam, grid, o.tol, o.eps, pj), o.output);
    }
    if (o.P.empty() || o.Q.empty()) {
        throw ConfigError("residuals: --P and --Q go together");
    }
    return emit(conic_report(parse_conic(o.P, "--P"), parse_conic(o.Q, "--Q"), o.sign, o.pprime0, grid, o.tol, o.eps),
                o.output);
}

CounterexampleSpec spec_of(const Options& o)
{
    if (!o.C) {
        throw ConfigError("--C is required");
    }
    return CounterexampleSpec(function_of_v(o.p, parse_params(o)), *o.C);
}

void add_output(CLI::App* cmd, Options& o)
{
    cmd->add_option("--out", o.output.out, "Write the full report to this file");
    cmd->add_option("--format", o.output.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
}

void add_grid(CLI::App* cmd, Options& o)
{
    cmd->add_option("--grid", o.grid, "Grid as \"t1min:t1max:n,t2min:t2max:n\"");
    cmd->add_option("--tol", o.tol, "Tolerance for a normalized residual to count as zero");
    cmd->add_option("--eps", o.eps, "Guard for rho11 > eps and |S| > eps");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Residual checks for rank-one Levi degenerate tube hypersurfaces"};
    app.require_subcommand(1);
    Options o;
    std::function<int()> action;

    auto* residuals = app.add_subcommand("residuals", "Evaluate all surface residuals on a grid");
    residuals->add_option("--rho", o.rho, "Graphing function in t1, t2");
    residuals->add_option("--p", o.p, "p(v) for the (p, q) parametrization");
    residuals->add_option("--q", o.q, "q(v) for the (p, q) parametrization");
    residuals->add_option("--P", o.P, "Conic polynomial a0,a1,a2 with p'' = sign P^(-3/2)");
    residuals->add_option("--Q", o.Q, "Conic polynomial a0,a1,a2 with q' = Q^(-3/2)");
    residuals->add_option("--sign", o.sign, "Branch of p''")->check(CLI::IsMember({-1, 1}));
    residuals->add_option("--pprime0", o.pprime0, "p'(0) for the conic route");
    residuals->add_option("--param", o.params, "Expression parameter name=value (repeatable)");
    residuals->add_option("--C", o.C, "Binds the parameter C");
    add_grid(residuals, o);
    add_output(residuals, o);
    residuals->callback([&] { action = [&] { return run_residuals(o); }; });

    auto* verify = app.add_subcommand("verify", "Run a verification campaign");
    verify->require_subcommand(1);

    auto* theorem = verify->add_subcommand("theorem21", "Random conic pairs (P, Q = cP)");
    theorem->add_option("--trials", o.trials, "Number of trials")->check(CLI::PositiveNumber);
    theorem->add_option("--seed", o.seed, "Random seed");
    add_grid(theorem, o);
    add_output(theorem, o);
    theorem->callback([&] {
        action = [&] { return emit(verify_theorem21(o.trials, o.seed, grid_of(o), o.tol, o.eps), o.output); };
    });

    auto* counter = verify->add_subcommand("counterexample", "Family q = C (p' - p'(0))");
    counter->add_option("--p", o.p, "p(v)")->required();
    counter->add_option("--C", o.C, "The constant C, with C p'' > 0")->required();
    counter->add_option("--param", o.params, "Expression parameter name=value (repeatable)");
    add_grid(counter, o);
    add_output(counter, o);
    counter->callback([&] {
        action = [&] { return emit(verify_counterexample(spec_of(o), grid_of(o), o.tol, o.eps), o.output); };
    });

    auto* prop = verify->add_subcommand("prop32", "Compare rho from (p, q) with the direct formula");
    prop->add_option("--p", o.p, "p(v)")->required();
    prop->add_option("--C", o.C, "The constant C, with C p'' > 0")->required();
    prop->add_option("--param", o.params, "Expression parameter name=value (repeatable)");
    prop->add_option("--jet-tol", o.jet_tol, "Tolerance for the normalized jet difference");
    prop->add_option("--chi-perturbation", o.chi_perturbation, "Offset added to chi (negative control)");
    add_grid(prop, o);
    add_output(prop, o);
    prop->callback([&] {
        action = [&] {
            Prop32Options po;
            po.tol = o.tol;
            po.jet_tol = o.jet_tol;
            po.chi_perturbation = o.chi_perturbation;
            po.eps = o.eps;
            return emit(verify_prop32(spec_of(o), grid_of(o), po), o.output);
        };
    });

    auto* example = app.add_subcommand("example31", "The explicit example p(v) = e^v - 1");
    double example_C = 1.0;
    example->add_option("--C", example_C, "The constant C > 0");
    add_grid(example, o);
    add_output(example, o);
    example->callback([&] { action = [&] { return emit(example31_report(example_C, grid_of(o), o.tol, o.eps), o.output); }; });

    auto* selftest = app.add_subcommand("selftest", "Run the jet, expression and conic invariant checks");
    std::uint64_t selftest_seed = 20240607;
    selftest->add_option("--seed", selftest_seed, "Random seed");
    selftest->callback([&] {
        action = [&] {
            const SelftestResult r = run_selftest(selftest_seed);
            for (const auto& f : r.failures) {
                std::cerr << "FAILED: " << f << '\n';
            }
            std::cout << r.checks << " checks, " << r.failures.size() << " failures\n";
            return r.ok() ? exit_pass : exit_verdict_failure;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const CLI::App* where = &app;
        for (const CLI::App* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front(); sub;
             sub = sub->get_subcommands().empty() ? nullptr : sub->get_subcommands().front()) {
            where = sub;
        }
        std::cerr << where->help();
        return exit_config_error;
    }

    try {
        return action();
    } catch (const ParseError& e) {
        std::cerr << e.what() << '\n';
        if (!e.expected().empty()) {
            std::cerr << "expected one of:";
            for (const auto& x : e.expected()) {
                std::cerr << ' ' << x;
            }
            std::cerr << '\n';
        }
        return exit_config_error;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return exit_config_error;
    }
}
