// Nonlinear advection u . grad_h u at MAC faces, one piecewise-parabolic
// reconstruction per component and direction with classic monotonicity
// limiting, upwinded by the advecting velocity at the interface. Ghost values
// come from the boundary closures in mac_grid.hpp. Pinned boundary faces
// (velocity / slip normals) return zero.
#pragma once

#include "ibfsi/mac_grid.hpp"

namespace ibfsi {

StaggeredField advect(const StaggeredField& u, const GridSpec& g);

} // namespace ibfsi
