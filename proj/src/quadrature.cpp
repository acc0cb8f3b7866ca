#include "rvm2d/quadrature.hpp"

// Header-only engine; this TU anchors the node tables for the linker.
namespace rvm {
namespace gk {
// odr-use anchors
static_assert(sizeof(xgk) == 8 * sizeof(double), "GK15 table");
}  // namespace gk
}  // namespace rvm
