#include "saddle/problems/lyapunov.h"

#include <algorithm>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace saddle {
namespace {

constexpr double kStabilityMargin = 1e-9;

Mat SolveKronecker(const Mat& f, const Mat& w) {
  const Eigen::Index d = f.rows();
  const Eigen::Index n = d * d;
  // vec(F^T P F) = (F^T (x) F^T) vec(P) for column-major vec.
  Mat m = Mat::Identity(n, n);
  const Mat ft = f.transpose();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      m.block(i * d, j * d, d, d) -= ft(i, j) * ft;
    }
  }
  const Vec rhs = Eigen::Map<const Vec>(w.data(), n);
  const Vec sol = m.partialPivLu().solve(rhs);
  return Eigen::Map<const Mat>(sol.data(), d, d);
}

// P = sum_t (F^T)^t W F^t, summed by squaring: after j rounds the partial
// sum covers 2^j terms.
Mat SolveDoubling(const Mat& f, const Mat& w) {
  Mat p = w;
  Mat a = f;
  for (int round = 0; round < 100; ++round) {
    const Mat next = p + a.transpose() * p * a;
    const double change = (next - p).norm();
    p = next;
    a = a * a;
    if (change <= 1e-16 * p.norm() || a.norm() == 0.0) break;
  }
  return p;
}

}  // namespace

double SpectralRadius(const Mat& f) {
  if (f.rows() != f.cols()) {
    throw InvalidArgument("SpectralRadius: matrix must be square");
  }
  if (f.size() == 0) return 0.0;
  if (!f.allFinite()) {
    throw InvalidArgument("SpectralRadius: non-finite matrix");
  }
  Eigen::EigenSolver<Mat> eig(f, false);
  if (eig.info() != Eigen::Success) {
    throw Error("SpectralRadius: eigenvalue computation failed");
  }
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

Mat SolveDiscreteLyapunov(const Mat& f, const Mat& w) {
  if (f.rows() != f.cols() || w.rows() != f.rows() || w.cols() != f.cols()) {
    throw InvalidArgument("SolveDiscreteLyapunov: dimension mismatch");
  }
  const double rho = SpectralRadius(f);
  if (rho >= 1.0 - kStabilityMargin) {
    throw InstabilityError("SolveDiscreteLyapunov: unstable matrix", rho);
  }
  Mat p = f.rows() <= kKroneckerMaxDim ? SolveKronecker(f, w)
                                       : SolveDoubling(f, w);
  if ((w - w.transpose()).norm() <= 1e-14 * std::max(1.0, w.norm())) {
    p = 0.5 * (p + p.transpose());
  }
  return p;
}

double LyapunovResidual(const Mat& f, const Mat& w, const Mat& p) {
  const double denom = std::max(p.norm(), 1e-300);
  return (p - w - f.transpose() * p * f).norm() / denom;
}

}  // namespace saddle
