#pragma once

#include <string>

#include "fracfem/network.hpp"

namespace fracfem {

/// SVG 1.1 drawing of Γ^(k): levels below k in black, Γ_k in red, ∂Ω grey.
/// Throws std::invalid_argument if k is outside 1..depth.
std::string render_network_svg(const InterfaceNetwork& network, int k, int pixels = 512);

}  // namespace fracfem
