#include "phiconvex/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace phiconvex::cli {

namespace fs = std::filesystem;
using io::Json;

const char* to_string(Command c)
{
    switch (c) {
    case Command::analyze: return "analyze";
    case Command::gamma: return "gamma";
    case Command::envelope: return "envelope";
    case Command::sandwich: return "sandwich";
    }
    return "analyze";
}

const char* to_string(Check c)
{
    switch (c) {
    case Check::monotone: return "monotone";
    case Check::holder: return "holder";
    case Check::convex: return "convex";
    case Check::affine: return "affine";
    case Check::all: return "all";
    }
    return "all";
}

namespace {

unsigned default_threads()
{
    if (const char* env = std::getenv("PHI_CONVEX_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw UsageError(std::string("PHI_CONVEX_THREADS must be a positive integer, got '") + env + "'");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

io::FunctionSource parse_function_flag(const std::string& text, const char* flag)
{
    try {
        return io::parse_function_spec(text);
    } catch (const io::SpecError& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

/// `--lower` and `--upper` also take a bare CSV path.
io::FunctionSource parse_bound_flag(const std::string& text, const char* flag)
{
    if (text.rfind("catalog:", 0) == 0 || text.rfind("csv:", 0) == 0)
        return parse_function_flag(text, flag);
    if (text.empty())
        throw UsageError(std::string(flag) + ": empty path");
    io::FunctionSource src;
    src.kind = io::FunctionSource::Kind::csv;
    src.path = text;
    return src;
}

void require_readable(const std::string& path, const char* flag)
{
    std::error_code ec;
    if (!fs::is_regular_file(path, ec))
        throw io::IoError(std::string(flag) + ": file not found: '" + path + "'");
}

void require_writable_dir(const std::string& path, const char* flag)
{
    if (path.empty())
        return;
    const fs::path parent = fs::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty() && !fs::is_directory(parent, ec))
        throw io::IoError(std::string(flag) + ": directory does not exist: '" + parent.string() + "'");
}

bool is_csv(const std::optional<io::FunctionSource>& s)
{
    return s && s->kind == io::FunctionSource::Kind::csv;
}

} // namespace

RunConfig parse_args(const std::vector<std::string>& args)
{
    RunConfig cfg;
    std::string check_text = "convex";
    int threads = 0;

    CLI::App app{"Verification of approximate convexity on uniform grids", "phi-convex"};
    app.require_subcommand(1);
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads (default: $PHI_CONVEX_THREADS or all cores)")
                            ->check(CLI::PositiveNumber);
    app.add_flag("--allow-large", cfg.allow_large, "Permit cubic scans on more than 256 nodes");
    app.add_flag("-v,--verbose", cfg.verbosity, "Progress messages on stderr");

    auto* analyze = app.add_subcommand("analyze", "Check a function against an error function");
    auto* gamma = app.add_subcommand("gamma", "Gamma property and Gamma-envelope of an error function");
    auto* envelope = app.add_subcommand("envelope", "Largest Phi-convex minorant by fixed-point iteration");
    auto* sandwich = app.add_subcommand("sandwich", "Is there a Phi-convex h with lower <= h <= upper?");
    for (auto* sub : {analyze, gamma, envelope, sandwich})
        sub->fallthrough();

    struct GridOpts {
        CLI::Option* a = nullptr;
        CLI::Option* b = nullptr;
        CLI::Option* n = nullptr;
        CLI::Option* m_mult = nullptr;
    };
    auto add_grid = [&](CLI::App* sub) {
        GridOpts g;
        g.a = sub->add_option("--a", cfg.a, "Left endpoint of the open interval");
        g.b = sub->add_option("--b", cfg.b, "Right endpoint of the open interval");
        g.n = sub->add_option("--n", cfg.n, "Number of interior nodes")->check(CLI::Range(Index(2), Index(1) << 24));
        g.m_mult = sub->add_option("--m-mult", cfg.m_mult, "Error samples per grid step")
                       ->check(CLI::Range(Index(1), Index(1) << 16));
        return g;
    };

    analyze->add_option("--function", cfg.function_text, "catalog:<name>[:params] or csv:<path>")->required();
    analyze->add_option("--error", cfg.error_text, "power:<p>[:<scale>], zero or csv:<path>")->required();
    const auto analyze_grid = add_grid(analyze);
    analyze->add_option("--check", check_text, "monotone, holder, convex, affine or all")
        ->check(CLI::IsMember({"monotone", "holder", "convex", "affine", "all"}));
    analyze->add_option("--tol", cfg.tol, "Verdict tolerance")->check(CLI::PositiveNumber);
    analyze->add_option("--certificate", cfg.certificate_path, "Write the slope certificate as CSV");
    analyze->add_option("--out", cfg.out_path, "JSON report path");

    gamma->add_option("--error", cfg.error_text, "power:<p>[:<scale>], zero or csv:<path>")->required();
    auto* length_opt = gamma->add_option("--length", cfg.length, "Length of the error domain")
                           ->check(CLI::PositiveNumber);
    auto* m_opt = gamma->add_option("--m", cfg.m, "Number of error steps")->check(CLI::Range(Index(2), Index(1) << 24));
    gamma->add_option("--tol", cfg.tol, "Tolerance")->check(CLI::PositiveNumber);
    gamma->add_option("--max-iter", cfg.max_iter, "Maximum gamma transforms")->check(CLI::PositiveNumber);
    gamma->add_option("--out", cfg.out_path, "JSON report path");

    envelope->add_option("--function", cfg.function_text, "catalog:<name>[:params] or csv:<path>")->required();
    envelope->add_option("--error", cfg.error_text, "power:<p>[:<scale>], zero or csv:<path>")->required();
    const auto envelope_grid = add_grid(envelope);
    envelope->add_option("--tol", cfg.tol, "Convergence tolerance on sup-norm steps")->check(CLI::PositiveNumber);
    envelope->add_option("--max-iter", cfg.max_iter, "Maximum envelope steps")->check(CLI::PositiveNumber);
    envelope->add_option("--trace", cfg.trace_path, "Per-iteration sup-norm steps as CSV");
    envelope->add_option("--out", cfg.out_path, "JSON report path; values also go to a CSV of the same stem");

    sandwich->add_option("--lower", cfg.lower_text, "Lower bound g (CSV path or function spec)")->required();
    sandwich->add_option("--upper", cfg.upper_text, "Upper bound f (CSV path or function spec)")->required();
    sandwich->add_option("--error", cfg.error_text, "power:<p>[:<scale>], zero or csv:<path>")->required();
    const auto sandwich_grid = add_grid(sandwich);
    sandwich->add_option("--tol", cfg.tol, "Tolerance")->check(CLI::PositiveNumber);
    sandwich->add_option("--out", cfg.out_path, "JSON report path");

    std::vector<const char*> argv{"phi-convex"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        for (auto* sub : {analyze, gamma, envelope, sandwich})
            if (sub->parsed())
                throw HelpRequested(sub->help());
        throw HelpRequested(app.help());
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested(app.help("", CLI::AppFormatMode::All));
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    cfg.threads = *threads_opt ? static_cast<unsigned>(threads) : default_threads();

    const GridOpts* grid = nullptr;
    if (analyze->parsed()) {
        cfg.command = Command::analyze;
        grid = &analyze_grid;
    } else if (gamma->parsed()) {
        cfg.command = Command::gamma;
    } else if (envelope->parsed()) {
        cfg.command = Command::envelope;
        grid = &envelope_grid;
    } else {
        cfg.command = Command::sandwich;
        grid = &sandwich_grid;
    }

    try {
        cfg.error = io::parse_error_spec(cfg.error_text);
    } catch (const io::SpecError& e) {
        throw UsageError(std::string("--error: ") + e.what());
    }
    if (cfg.error.kind == io::ErrorSource::Kind::csv)
        require_readable(cfg.error.path, "--error");

    if (cfg.command == Command::analyze || cfg.command == Command::envelope) {
        cfg.function = parse_function_flag(cfg.function_text, "--function");
        if (is_csv(cfg.function))
            require_readable(cfg.function->path, "--function");
    }
    if (cfg.command == Command::sandwich) {
        cfg.lower = parse_bound_flag(cfg.lower_text, "--lower");
        cfg.upper = parse_bound_flag(cfg.upper_text, "--upper");
        if (is_csv(cfg.lower))
            require_readable(cfg.lower->path, "--lower");
        if (is_csv(cfg.upper))
            require_readable(cfg.upper->path, "--upper");
    }

    if (grid) {
        const bool from_csv = is_csv(cfg.function) || is_csv(cfg.lower) || is_csv(cfg.upper);
        if (from_csv) {
            for (auto [opt, name] : {std::pair{grid->a, "--a"}, std::pair{grid->b, "--b"}, std::pair{grid->n, "--n"}})
                if (*opt)
                    throw UsageError(std::string(name) + " conflicts with a CSV function, whose rows fix the grid");
        }
        if (!(cfg.a < cfg.b))
            throw UsageError("--a must be smaller than --b");
        if (cfg.error.kind == io::ErrorSource::Kind::csv && *grid->m_mult)
            throw UsageError("--m-mult conflicts with a CSV error function");
    }

    if (cfg.command == Command::gamma) {
        if (cfg.error.kind == io::ErrorSource::Kind::csv) {
            if (*length_opt)
                throw UsageError("--length conflicts with a CSV error function");
            if (*m_opt)
                throw UsageError("--m conflicts with a CSV error function");
        }
    }

    cfg.check = check_text == "monotone" ? Check::monotone
              : check_text == "holder"   ? Check::holder
              : check_text == "affine"   ? Check::affine
              : check_text == "all"      ? Check::all
                                         : Check::convex;

    require_writable_dir(cfg.out_path, "--out");
    require_writable_dir(cfg.certificate_path, "--certificate");
    require_writable_dir(cfg.trace_path, "--trace");
    return cfg;
}

RunConfig parse_args(int argc, const char* const* argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return parse_args(args);
}

namespace {

class Runner {
public:
    Runner(const RunConfig& cfg, std::ostream& out, std::ostream& err) : cfg_(cfg), out_(out), err_(err) {}

    int dispatch()
    {
        switch (cfg_.command) {
        case Command::analyze: return analyze();
        case Command::gamma: return gamma();
        case Command::envelope: return envelope();
        case Command::sandwich: return sandwich();
        }
        return exit_usage;
    }

private:
    void log(const std::string& message) const
    {
        if (cfg_.verbosity > 0)
            err_ << "phi-convex: " << message << '\n';
    }

    Json header() const
    {
        Json j;
        j["schema"] = io::schema_version;
        j["command"] = to_string(cfg_.command);
        return j;
    }

    void emit(const Json& report, const std::string& path) const
    {
        const std::string text = report.dump(2) + "\n";
        if (path.empty()) {
            out_ << text;
            return;
        }
        std::ofstream file(path, std::ios::binary);
        if (!file || !(file << text))
            throw io::IoError("cannot write '" + path + "'");
        log("wrote " + path);
    }

    GridFunctiond load(const io::FunctionSource& src, const std::optional<GridSpecd>& expected) const
    {
        if (src.kind == io::FunctionSource::Kind::csv)
            return io::load_function_csv(src.path, expected);
        return sample_catalog(io::catalog_entry(src), expected.value_or(GridSpecd(cfg_.a, cfg_.b, cfg_.n)));
    }

    /// Error function on [0, b - a] with m_mult samples per grid step, or the
    /// CSV as given.
    ErrorFunctiond error_for(const GridSpecd& grid) const
    {
        if (cfg_.error.kind == io::ErrorSource::Kind::csv)
            return io::load_error_csv(cfg_.error.path);
        return io::make_error(cfg_.error, grid.length(), cfg_.m_mult * (grid.size() + 1));
    }

    static Json witness_json(const std::optional<NodeWitness<double>>& w)
    {
        if (!w)
            return nullptr;
        return Json{{"indices", w->nodes}, {"coordinates", w->coordinates}};
    }

    int analyze()
    {
        const auto f = load(*cfg_.function, std::nullopt);
        const auto phi = error_for(f.grid());
        log("analyze on " + std::to_string(f.size()) + " nodes");

        Json report = header();
        report["function"] = cfg_.function_text;
        report["error"] = cfg_.error_text;
        report["grid"] = io::to_json(f.grid());
        report["error_function"] = io::to_json(phi);

        const bool all = cfg_.check == Check::all;
        Json checks = Json::object();
        bool ok = true;
        auto record = [&](const char* name, const ConvexityReportd& r) {
            checks[name] = io::to_json(r);
            ok = ok && r.holds;
        };
        if (all || cfg_.check == Check::monotone)
            record("monotone", check_phi_monotone(f, phi, cfg_.tol));
        if (all || cfg_.check == Check::holder)
            record("holder", check_phi_holder(f, phi, cfg_.tol));
        if (all || cfg_.check == Check::convex)
            record("convex", check_phi_convex(f, phi, cfg_.tol));
        if (all || cfg_.check == Check::affine)
            record("affine", check_phi_affine(f, phi, cfg_.tol));
        report["checks"] = checks;

        if (!cfg_.certificate_path.empty()) {
            Json cert;
            const bool affine = cfg_.check == Check::affine;
            cert["kind"] = affine ? "absolute_slope" : "slope";
            cert["path"] = cfg_.certificate_path;
            try {
                const auto c = affine ? build_absolute_slope_certificate(f, phi, cfg_.tol)
                                      : build_slope_certificate(f, phi, cfg_.tol);
                const auto star = affine ? check_absolute_slope_star_holder(c, phi)
                                         : check_slope_star_monotone(c, phi);
                io::save_function_csv(cfg_.certificate_path, c.as_function(), "slope");
                cert["status"] = "written";
                cert["star_check"] = io::to_json(star);
                ok = ok && star.holds;
            } catch (const CertificateError<double>& e) {
                cert["status"] = "refused";
                cert["reason"] = e.what();
                cert["report"] = io::to_json(e.report());
                ok = false;
            }
            report["certificate"] = cert;
        }
        report["all_hold"] = ok;
        emit(report, cfg_.out_path);
        return ok ? exit_ok : exit_violated;
    }

    int gamma()
    {
        const auto phi = cfg_.error.kind == io::ErrorSource::Kind::csv
                             ? io::load_error_csv(cfg_.error.path)
                             : io::make_error(cfg_.error, cfg_.length, cfg_.m);
        const double eps = cfg_.tol.value_or(default_tolerance(phi));
        log("gamma on " + std::to_string(phi.m()) + " error steps");

        const auto g = check_gamma(phi, std::optional<double>(eps));
        Json report = header();
        report["error"] = cfg_.error_text;
        report["error_function"] = io::to_json(phi);
        report["gamma_holds"] = g.holds;
        report["worst_margin"] = g.worst_margin;
        report["tolerance"] = g.tolerance;
        report["checked_count"] = g.checked_count;
        report["witness"] = io::to_json(g)["witness"];

        if (phi.zero_at_origin()) {
            const auto trace = gamma_envelope(phi, eps, cfg_.max_iter.value_or(64));
            Json sups = Json::array();
            for (const auto& it : trace.iterates)
                sups.push_back(it.sup_norm());
            report["envelope_iterations"] = trace.sup_deltas.size();
            report["envelope_converged"] = trace.converged;
            report["envelope_sup_deltas"] = trace.sup_deltas;
            report["envelope_sups"] = sups;
            report["envelope_final"] = io::to_json(trace.final().samples());
        } else {
            report["envelope_iterations"] = 0;
            report["envelope_converged"] = false;
            report["envelope_sup_deltas"] = Json::array();
            report["envelope_sups"] = Json::array();
            report["envelope_final"] = nullptr;
            report["envelope_skipped"] = "error function is nonzero at the origin";
        }

        report["sqrt_subadditive"] = check_sqrt_subadditive(phi, std::optional<double>(eps)).holds;
        report["ratio_subadditive"] = check_ratio_subadditive(phi, std::optional<double>(eps)).holds;
        report["t2_decreasing"] = check_t2_decreasing(phi, std::optional<double>(eps)).holds;
        const auto trend = small_scale_trend(phi);
        report["small_scale_trend"] = {{"t", io::to_json(trend.t)},
                                       {"ratios", io::to_json(trend.ratios)},
                                       {"trend", to_string(trend.trend)}};
        emit(report, cfg_.out_path);
        return g.holds ? exit_ok : exit_violated;
    }

    int envelope()
    {
        const auto f = load(*cfg_.function, std::nullopt);
        const auto phi = error_for(f.grid());
        log("envelope on " + std::to_string(f.size()) + " nodes");
        const auto env = envelope_fixed_point(f, phi, cfg_.tol, cfg_.max_iter);

        Json report = header();
        report["function"] = cfg_.function_text;
        report["error"] = cfg_.error_text;
        report["grid"] = io::to_json(f.grid());
        report["error_function"] = io::to_json(phi);
        report["iterations"] = env.iterations;
        report["converged"] = env.converged;
        report["is_phi_convex"] = env.is_phi_convex;
        report["sup_deltas"] = env.iterates_sup_delta;
        report["values"] = io::to_json(env.result.values());

        if (!cfg_.trace_path.empty()) {
            std::ofstream trace(cfg_.trace_path, std::ios::binary);
            trace << "iteration,sup_delta\n";
            for (std::size_t k = 0; k < env.iterates_sup_delta.size(); ++k)
                trace << k + 1 << ',' << io::format_real(env.iterates_sup_delta[k]) << '\n';
            if (!trace)
                throw io::IoError("cannot write '" + cfg_.trace_path + "'");
        }
        if (!cfg_.out_path.empty()) {
            fs::path json_path = cfg_.out_path;
            fs::path csv_path = fs::path(cfg_.out_path).replace_extension(".csv");
            if (csv_path == json_path)
                json_path.replace_extension(".json");
            emit(report, json_path.string());
            io::save_function_csv(csv_path.string(), env.result);
        } else {
            emit(report, "");
        }
        return exit_ok;
    }

    int sandwich()
    {
        std::optional<GridSpecd> grid;
        std::optional<GridFunctiond> lower, upper;
        if (is_csv(cfg_.upper)) {
            upper = load(*cfg_.upper, std::nullopt);
            grid = upper->grid();
        } else if (is_csv(cfg_.lower)) {
            lower = load(*cfg_.lower, std::nullopt);
            grid = lower->grid();
        }
        if (!upper)
            upper = load(*cfg_.upper, grid);
        if (!lower)
            lower = load(*cfg_.lower, upper->grid());
        const auto phi = error_for(upper->grid());
        log("sandwich on " + std::to_string(upper->size()) + " nodes");

        const auto s = phiconvex::sandwich(*lower, *upper, phi, cfg_.tol);
        Json report = header();
        report["lower"] = cfg_.lower_text;
        report["upper"] = cfg_.upper_text;
        report["error"] = cfg_.error_text;
        report["grid"] = io::to_json(upper->grid());
        report["status"] = to_string(s.status);
        report["inequality_holds"] = s.inequality_holds;
        report["worst_margin"] = s.worst_margin;
        report["tolerance"] = s.tolerance;
        Json w = witness_json(s.witness);
        if (s.witness && s.witness->coordinates.size() == 3) {
            const auto& c = s.witness->coordinates;
            w["t"] = c[2] == c[0] ? 1.0 : (c[2] - c[1]) / (c[2] - c[0]);
        }
        report["witness"] = w;
        report["hypothesis_met"] = s.hypothesis_met ? Json(*s.hypothesis_met) : Json(nullptr);
        report["envelope_iterations"] = s.envelope_iterations;
        report["h"] = s.h ? io::to_json(s.h->values()) : Json(nullptr);
        emit(report, cfg_.out_path);
        switch (s.status) {
        case SandwichStatus::exists: return exit_ok;
        case SandwichStatus::violated: return exit_violated;
        case SandwichStatus::hypothesis_not_met: return exit_hypothesis;
        }
        return exit_hypothesis;
    }

    const RunConfig& cfg_;
    std::ostream& out_;
    std::ostream& err_;
};

} // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    set_thread_count(config.threads);
    allow_large_scans(config.allow_large);
    try {
        return Runner(config, out, err).dispatch();
    } catch (const io::IoError& e) {
        err << "phi-convex: " << e.what() << '\n';
        return exit_io;
    } catch (const Error& e) {
        err << "phi-convex: " << e.what() << '\n';
        return exit_usage;
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    try {
        cfg = parse_args(argc, argv);
    } catch (const HelpRequested& h) {
        out << h.what();
        return exit_ok;
    } catch (const io::IoError& e) {
        err << "phi-convex: " << e.what() << '\n';
        return exit_io;
    } catch (const Error& e) {
        err << "phi-convex: " << e.what() << '\n';
        return exit_usage;
    }
    return run(cfg, out, err);
}

} // namespace phiconvex::cli
