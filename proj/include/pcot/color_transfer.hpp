#pragma once

#include "pcot/ppm.hpp"
#include "pcot/wm.hpp"

namespace pcot {

// Recolors src toward dst's palette: fits a k-component Gaussian mixture
// circuit to each image's normalized RGB cloud, couples the two at order 2,
// and moves every pixel along the geodesic toward its conditional-
// expectation target. t=0 returns src, t=1 the full transfer.
ImageBuffer color_transfer(const ImageBuffer& src, const ImageBuffer& dst, int components, double t,
                           const WMConfig& cfg);

} // namespace pcot
