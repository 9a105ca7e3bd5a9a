#pragma once

#include "phiconvex/phiconvex.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace phiconvex::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "phi-convex/1";

/// A file could not be read or written, or its contents are malformed.
class IoError : public Error {
public:
    using Error::Error;
};

/// A function or error spec string could not be parsed.
class SpecError : public Error {
public:
    using Error::Error;
};

/// `catalog:<name>[:param...]` or `csv:<path>`.
struct FunctionSource {
    enum class Kind { catalog, csv } kind = Kind::catalog;
    std::string name;
    std::vector<double> params;
    std::string path;
};

/// `power:<p>[:<scale>]`, `zero` or `csv:<path>`.
struct ErrorSource {
    enum class Kind { power, zero, csv } kind = Kind::power;
    double exponent = 1;
    double scale = 1;
    std::string path;
};

FunctionSource parse_function_spec(const std::string& spec);
ErrorSource parse_error_spec(const std::string& spec);

/// Catalog names: power:p, neg-power:p, abs, quadratic, concave, affine[:s[:c]],
/// constant[:c], exp, sine[:freq[:amp]], sawtooth[:period], kinks,
/// noisy[:amp[:seed]].
FunctionCatalogEntry<double> catalog_entry(const FunctionSource& source);
std::vector<std::string> catalog_names();

/// Samples a power or zero source; csv sources are loaded from disk and must
/// match `length` and `m`.
ErrorFunctiond make_error(const ErrorSource& source, double length, Index m);

/// Reads `x,value` rows.  Spacing must be uniform to relative 1e-9; without an
/// expected grid the endpoints are inferred one step outside the first and
/// last rows.
GridFunctiond load_function_csv(const std::string& path, const std::optional<GridSpecd>& expected = std::nullopt);
void write_function_csv(std::ostream& out, const GridFunctiond& f, const char* value_header = "value");
void save_function_csv(const std::string& path, const GridFunctiond& f, const char* value_header = "value");

/// Reads `t,phi` rows from t = 0 to t = length inclusive.
ErrorFunctiond load_error_csv(const std::string& path);
void save_error_csv(const std::string& path, const ErrorFunctiond& phi);

/// 17 significant digits.
std::string format_real(double v);

Json to_json(const ConvexityReportd& report);
Json to_json(const GammaReportd& report);
Json to_json(const GridSpecd& grid);
Json to_json(const ErrorFunctiond& phi);
Json to_json(const Samples<double>& values);

} // namespace phiconvex::io
