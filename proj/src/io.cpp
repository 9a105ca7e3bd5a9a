#include "phiconvex/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace phiconvex::io {

namespace {

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep))
        parts.push_back(item);
    if (!text.empty() && text.back() == sep)
        parts.emplace_back();
    return parts;
}

double parse_real(const std::string& text, const std::string& context)
{
    if (text.empty())
        throw SpecError(context + ": empty number");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v))
        throw SpecError(context + ": cannot parse '" + text + "' as a finite number");
    return v;
}

std::string trim(std::string s)
{
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
        s.pop_back();
    std::size_t first = 0;
    while (first < s.size() && (s[first] == ' ' || s[first] == '\t'))
        ++first;
    return s.substr(first);
}

struct Table {
    std::vector<double> first;
    std::vector<double> second;
};

Table read_two_columns(const std::string& path, const std::string& header)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || trim(line) != header)
        throw IoError(path + ": expected header '" + header + "'");
    Table table;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = trim(line);
        if (line.empty())
            continue;
        const auto cells = split(line, ',');
        if (cells.size() != 2)
            throw IoError(path + ":" + std::to_string(row) + ": expected two columns");
        try {
            table.first.push_back(parse_real(trim(cells[0]), path));
            table.second.push_back(parse_real(trim(cells[1]), path));
        } catch (const SpecError& e) {
            throw IoError(std::string(e.what()) + " (line " + std::to_string(row) + ")");
        }
    }
    return table;
}

/// Spacing of a sorted, uniformly spaced column.
double uniform_step(const std::vector<double>& xs, const std::string& path)
{
    if (xs.size() < 2)
        throw IoError(path + ": need at least two rows");
    const double h = (xs.back() - xs.front()) / double(xs.size() - 1);
    if (!(h > 0))
        throw IoError(path + ": rows must be sorted by increasing abscissa");
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double expected = xs.front() + double(k) * h;
        if (std::abs(xs[k] - expected) > 1e-9 * h)
            throw IoError(path + ": row " + std::to_string(k + 1) + " breaks uniform spacing");
    }
    return h;
}

} // namespace

std::string format_real(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

FunctionSource parse_function_spec(const std::string& spec)
{
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw SpecError("function spec '" + spec + "' must start with 'catalog:' or 'csv:'");
    const std::string scheme = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    FunctionSource source;
    if (scheme == "csv") {
        if (rest.empty())
            throw SpecError("function spec '" + spec + "' names no file");
        source.kind = FunctionSource::Kind::csv;
        source.path = rest;
        return source;
    }
    if (scheme != "catalog")
        throw SpecError("function spec '" + spec + "' must start with 'catalog:' or 'csv:'");
    auto parts = split(rest, ':');
    if (parts.empty() || parts.front().empty())
        throw SpecError("function spec '" + spec + "' names no catalog entry");
    source.kind = FunctionSource::Kind::catalog;
    source.name = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i)
        source.params.push_back(parse_real(parts[i], "function spec '" + spec + "'"));
    catalog_entry(source); // validates name and parameter count
    return source;
}

ErrorSource parse_error_spec(const std::string& spec)
{
    ErrorSource source;
    if (spec == "zero") {
        source.kind = ErrorSource::Kind::zero;
        return source;
    }
    const auto parts = split(spec, ':');
    if (parts.size() >= 2 && parts[0] == "csv") {
        source.kind = ErrorSource::Kind::csv;
        source.path = spec.substr(4);
        if (source.path.empty())
            throw SpecError("error spec '" + spec + "' names no file");
        return source;
    }
    if (parts[0] == "power" && (parts.size() == 2 || parts.size() == 3)) {
        source.kind = ErrorSource::Kind::power;
        source.exponent = parse_real(parts[1], "error spec '" + spec + "'");
        if (parts.size() == 3)
            source.scale = parse_real(parts[2], "error spec '" + spec + "'");
        if (source.scale < 0)
            throw SpecError("error spec '" + spec + "': scale must be nonnegative");
        return source;
    }
    throw SpecError("error spec '" + spec + "' must be 'power:<p>[:<scale>]', 'zero' or 'csv:<path>'");
}

std::vector<std::string> catalog_names()
{
    return {"power", "neg-power", "abs", "quadratic", "concave", "affine", "constant",
            "exp", "sine", "sawtooth", "kinks", "noisy"};
}

FunctionCatalogEntry<double> catalog_entry(const FunctionSource& source)
{
    const auto& p = source.params;
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (p.size() < lo || p.size() > hi)
            throw SpecError("catalog entry '" + source.name + "' takes " + std::to_string(lo) + ".." +
                            std::to_string(hi) + " parameters");
    };
    auto param = [&](std::size_t i, double fallback) { return i < p.size() ? p[i] : fallback; };
    const std::string& name = source.name;
    if (name == "power") {
        need(1, 1);
        return catalog::power(p[0]);
    }
    if (name == "neg-power") {
        need(1, 1);
        return catalog::neg_power(p[0]);
    }
    if (name == "abs") {
        need(0, 0);
        return catalog::absolute<double>();
    }
    if (name == "quadratic") {
        need(0, 0);
        return catalog::quadratic<double>();
    }
    if (name == "concave") {
        need(0, 0);
        return catalog::concave<double>();
    }
    if (name == "affine") {
        need(0, 2);
        return catalog::affine(param(0, 1.0), param(1, 0.0));
    }
    if (name == "constant") {
        need(0, 1);
        return catalog::constant(param(0, 0.0));
    }
    if (name == "exp") {
        need(0, 0);
        return catalog::exponential<double>();
    }
    if (name == "sine") {
        need(0, 2);
        return catalog::sine(param(0, 1.0), param(1, 1.0));
    }
    if (name == "sawtooth") {
        need(0, 1);
        if (!(param(0, 0.25) > 0))
            throw SpecError("sawtooth period must be positive");
        return catalog::sawtooth(param(0, 0.25));
    }
    if (name == "kinks") {
        need(0, 0);
        return catalog::kinks<double>();
    }
    if (name == "noisy") {
        need(0, 2);
        const double seed = param(1, 1.0);
        if (seed < 0 || seed != std::floor(seed))
            throw SpecError("noisy seed must be a nonnegative integer");
        return catalog::noisy_quadratic(param(0, 0.05), static_cast<std::uint64_t>(seed));
    }
    throw SpecError("unknown catalog entry '" + name + "'");
}

ErrorFunctiond make_error(const ErrorSource& source, double length, Index m)
{
    switch (source.kind) {
    case ErrorSource::Kind::zero:
        return zero_error(length, m);
    case ErrorSource::Kind::power:
        return source.scale * make_power_error(source.exponent, length, m);
    case ErrorSource::Kind::csv: {
        auto phi = load_error_csv(source.path);
        if (phi.m() != m || std::abs(phi.length() - length) > 1e-9 * length)
            throw IoError(source.path + ": error function has length " + format_real(phi.length()) + " and m = " +
                          std::to_string(phi.m()) + ", expected length " + format_real(length) +
                          " and m = " + std::to_string(m));
        return phi;
    }
    }
    throw SpecError("unsupported error source");
}

GridFunctiond load_function_csv(const std::string& path, const std::optional<GridSpecd>& expected)
{
    const auto table = read_two_columns(path, "x,value");
    const double h = uniform_step(table.first, path);
    const auto n = static_cast<Index>(table.first.size());
    GridSpecd grid = expected.value_or(GridSpecd(table.first.front() - h, table.first.back() + h, n));
    if (grid.size() != n)
        throw IoError(path + ": has " + std::to_string(n) + " rows, grid expects " + std::to_string(grid.size()));
    for (Index k = 0; k < n; ++k) {
        const double x = table.first[static_cast<std::size_t>(k)];
        if (!(x > grid.a() && x < grid.b()) || std::abs(x - grid.node(k)) > 1e-9 * grid.step())
            throw IoError(path + ": row " + std::to_string(k + 1) + " does not sit on grid node " +
                          std::to_string(k));
    }
    return GridFunctiond(grid, Eigen::Map<const Samples<double>>(table.second.data(), n));
}

void write_function_csv(std::ostream& out, const GridFunctiond& f, const char* value_header)
{
    out << "x," << value_header << '\n';
    for (Index k = 0; k < f.size(); ++k)
        out << format_real(f.grid().node(k)) << ',' << format_real(f[k]) << '\n';
}

void save_function_csv(const std::string& path, const GridFunctiond& f, const char* value_header)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    write_function_csv(out, f, value_header);
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

ErrorFunctiond load_error_csv(const std::string& path)
{
    const auto table = read_two_columns(path, "t,phi");
    const double step = uniform_step(table.first, path);
    if (table.first.front() != 0)
        throw IoError(path + ": first row must be t = 0");
    const auto count = static_cast<Index>(table.second.size());
    Samples<double> samples = Eigen::Map<const Samples<double>>(table.second.data(), count);
    if ((samples < 0).any())
        throw IoError(path + ": error functions are nonnegative");
    return ErrorFunctiond(step * double(count - 1), std::move(samples));
}

void save_error_csv(const std::string& path, const ErrorFunctiond& phi)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    out << "t,phi\n";
    for (Index j = 0; j <= phi.m(); ++j)
        out << format_real(phi.node(j)) << ',' << format_real(phi[j]) << '\n';
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

Json to_json(const ConvexityReportd& report)
{
    Json j;
    j["verdict"] = report.holds ? "holds" : "fails";
    j["worst_margin"] = report.worst_margin;
    j["tolerance"] = report.tolerance;
    j["checked_count"] = report.checked_count;
    if (report.witness) {
        j["witness"] = {{"indices", report.witness->nodes}, {"coordinates", report.witness->coordinates}};
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

Json to_json(const GammaReportd& report)
{
    Json j;
    j["holds"] = report.holds;
    j["worst_margin"] = report.worst_margin;
    j["tolerance"] = report.tolerance;
    j["checked_count"] = report.checked_count;
    if (report.witness) {
        const auto& w = *report.witness;
        j["witness"] = {{"x", w.x}, {"y", w.y}, {"i", w.i}, {"j", w.j}};
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

Json to_json(const GridSpecd& grid)
{
    return Json{{"a", grid.a()}, {"b", grid.b()}, {"n", grid.size()}, {"h", grid.step()}};
}

Json to_json(const ErrorFunctiond& phi)
{
    return Json{{"length", phi.length()}, {"m", phi.m()}, {"zero_at_origin", phi.zero_at_origin()}};
}

Json to_json(const Samples<double>& values)
{
    Json arr = Json::array();
    for (Index k = 0; k < values.size(); ++k)
        arr.push_back(values[k]);
    return arr;
}

} // namespace phiconvex::io
