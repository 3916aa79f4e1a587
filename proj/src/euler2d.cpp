#include "rigidlid/euler2d.hpp"

namespace rigidlid {

VectorField biot_savart(const SpectralField& omega) {
  require(omega.grid().dim() == 2, ErrorCode::InvalidArgument, "Biot-Savart needs a 2D grid");
  return perp_gradient(inverse_laplacian(omega));
}

SpectralField euler2d_rhs(const SpectralField& omega) {
  const Grid& g = omega.grid();
  require(g.dim() == 2, ErrorCode::InvalidArgument, "Euler right-hand side needs a 2D grid");
  const VectorField u = biot_savart(omega);
  const int m = padded_size(g.n(), 3, 2);
  const auto w = padded_physical(omega, m);
  VectorField flux;
  for (const auto& c : u) {
    auto p = padded_physical(c, m);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] *= w[i];
    flux.push_back(from_padded_physical(p, g, m));
  }
  // div u = 0, so (u.grad) omega = div(u omega)
  SpectralField r = divergence(flux);
  r *= -1.0;
  r[0] = 0.0;
  return r;
}

}  // namespace rigidlid
