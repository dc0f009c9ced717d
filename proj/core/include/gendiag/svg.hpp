#pragma once

#include <string>

#include "gendiag/proximity.hpp"

namespace gendiag {

/// Deterministic static traceplot: fixed 960x540 canvas, one polyline per
/// chain with a fixed color cycle, axis labels and a chain legend.
std::string render_traceplot_svg(const MappedChainSet& chains, const std::string& title = "");

}  // namespace gendiag
