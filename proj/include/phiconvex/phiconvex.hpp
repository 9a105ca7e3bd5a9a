#pragma once

#include "phiconvex/catalog.hpp"
#include "phiconvex/convexity.hpp"
#include "phiconvex/envelope.hpp"
#include "phiconvex/errorfn.hpp"
#include "phiconvex/family.hpp"
#include "phiconvex/grid.hpp"
#include "phiconvex/parallel.hpp"

namespace phiconvex {

using GridSpecd = GridSpec<double>;
using GridFunctiond = GridFunction<double>;
using ErrorFunctiond = ErrorFunction<double>;
using ConvexityReportd = ConvexityReport<double>;
using GammaReportd = GammaReport<double>;
using SlopeCertificated = SlopeCertificate<double>;

} // namespace phiconvex
