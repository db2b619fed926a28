#pragma once

#include "ph/mesh.hpp"

namespace ph {

// Structured rectangle [0,lx] x [0,ly], nx*ny cells, two triangles per cell.
// sigma_top labels the top edge SIGMA and the rest GAMMA; otherwise all GAMMA.
MeshPtr make_rect(int nx, int ny, double lx, double ly, bool sigma_top);

// Annulus r0 < r < r1 with nr radial and ntheta angular divisions, all GAMMA.
MeshPtr make_annulus(int nr, int ntheta, double r0, double r1);

// Disc of radius r meshed by concentric rings; whole boundary labeled
// SIGMA when sigma is true, else GAMMA.
MeshPtr make_disc(int nrings, int ntheta, double r, bool sigma);

} // namespace ph
