#pragma once

#include "rigidlid/spectral.hpp"

namespace rigidlid {

// u = grad_perp Delta^-1 omega, zero mode dropped.
VectorField biot_savart(const SpectralField& omega);
// -(u . grad) omega, dealiased with 3/2 padding.
SpectralField euler2d_rhs(const SpectralField& omega);

}  // namespace rigidlid
