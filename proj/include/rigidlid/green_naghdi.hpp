#pragma once

#include "rigidlid/spectral.hpp"

namespace rigidlid {

// Depth-dependent operators with h = 1 + eps*zeta. Products involving 1/h are
// evaluated on a grid padded by a factor 2. h0 > 0 turns on the depth check.
VectorField gn_T_apply(const SpectralField& zeta, const VectorField& w, double eps,
                       double h0 = 0.0);
VectorField gn_Q_apply(const SpectralField& zeta, const VectorField& v, double eps,
                       double h0 = 0.0);
// (T[eps zeta] - T[0]) W / eps, arranged so nothing cancels when eps is small.
VectorField gn_T_correction(const SpectralField& zeta, const VectorField& w, double eps);
// (1 + mu T[eps zeta]) X
VectorField gn_forward(const SpectralField& zeta, const VectorField& x, double eps, double mu);

struct GnSolveResult {
  VectorField x;
  int iterations = 0;
  double residual = 0.0;  // true relative residual
};

// Solve (1 + mu T[eps zeta]) X = rhs by right-preconditioned restarted GMRES.
GnSolveResult gn_solve_momentum(const SpectralField& zeta, const VectorField& rhs, double eps,
                                double mu, double tol, int max_iter = 400, double h0 = 0.0);

}  // namespace rigidlid
