#pragma once

#include "phiconvex/io.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace phiconvex::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_io = 2,
    exit_violated = 3,
    exit_hypothesis = 4,
};

/// Bad command line; the message names the offending flag.
class UsageError : public Error {
public:
    using Error::Error;
};

/// `--help` was given; carries the rendered help text.
class HelpRequested : public Error {
public:
    using Error::Error;
};

enum class Command { analyze, gamma, envelope, sandwich };
enum class Check { monotone, holder, convex, affine, all };

const char* to_string(Command c);
const char* to_string(Check c);

struct RunConfig {
    Command command = Command::analyze;

    std::string function_text;
    std::string error_text;
    std::optional<io::FunctionSource> function;
    std::optional<io::FunctionSource> lower;
    std::optional<io::FunctionSource> upper;
    std::string lower_text;
    std::string upper_text;
    io::ErrorSource error;

    // Function grid; only used for catalog functions.
    double a = 0;
    double b = 1;
    Index n = 64;
    Index m_mult = 2;

    // Error grid for `gamma`.
    double length = 1;
    Index m = 128;

    Check check = Check::convex;
    std::optional<double> tol;
    std::optional<int> max_iter;

    std::string out_path;
    std::string certificate_path;
    std::string trace_path;

    unsigned threads = 1;
    bool allow_large = false;
    int verbosity = 0;
};

/// Arguments exclude the program name.  Throws UsageError, HelpRequested, or
/// io::IoError when a referenced input file does not exist.
RunConfig parse_args(const std::vector<std::string>& args);
RunConfig parse_args(int argc, const char* const* argv);

/// Executes the command.  Reports go to `--out` when given and to `out`
/// otherwise; diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with every error mapped to its exit code.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace phiconvex::cli
