#ifndef SADDLE_PROBLEMS_LYAPUNOV_H_
#define SADDLE_PROBLEMS_LYAPUNOV_H_

#include "saddle/types.h"

namespace saddle {

// Largest eigenvalue modulus.
double SpectralRadius(const Mat& f);

// Solves P = W + F^T P F for a stable F (spectral radius < 1 - 1e-9).
// Uses the Kronecker linearization (I - F^T (x) F^T) vec(P) = vec(W) for
// d <= kKroneckerMaxDim and the doubling iteration otherwise. The result is
// symmetrized when W is symmetric. Throws InstabilityError for unstable F.
Mat SolveDiscreteLyapunov(const Mat& f, const Mat& w);

inline constexpr int kKroneckerMaxDim = 40;

// ||P - W - F^T P F||_F / ||P||_F.
double LyapunovResidual(const Mat& f, const Mat& w, const Mat& p);

}  // namespace saddle

#endif  // SADDLE_PROBLEMS_LYAPUNOV_H_
