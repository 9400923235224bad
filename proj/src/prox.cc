#include "saddle/prox.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Eigenvalues>

namespace saddle {
namespace {

constexpr int kMaxDykstraSweeps = 10000;
constexpr double kDykstraTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

Vec ClampBelow(const Vec& v, double lower) {
  return v.cwiseMax(lower);
}

// Projection onto {y : ||y - center|| <= r}, center = c*1.
Vec ShrinkToBall(const Vec& v, double c, double r) {
  Vec d = v.array() - c;
  const double norm = d.norm();
  if (norm <= r) return v;
  return (d * (r / norm)).array() + c;
}

bool InBall(const Vec& v, double c, double r) {
  return (v.array() - c).matrix().norm() <= r * (1.0 + 1e-15) + 1e-15;
}

}  // namespace

Vec ProxZero(const Vec& v, double /*step*/) { return v; }

Mat ProjectSpectralBox(const Mat& m, double lo, double hi) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument("ProjectSpectralBox: matrix must be square");
  }
  if (!(lo < hi)) {
    throw InvalidArgument("ProjectSpectralBox: requires lo < hi");
  }
  if (!m.allFinite()) {
    throw InvalidArgument("ProjectSpectralBox: non-finite input");
  }
  const Mat sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw Error("ProjectSpectralBox: eigendecomposition failed");
  }
  const Vec clamped = eig.eigenvalues().cwiseMax(lo).cwiseMin(hi);
  const Mat& v = eig.eigenvectors();
  Mat out = v * clamped.asDiagonal() * v.transpose();
  // Remove the round-off asymmetry of the reconstruction.
  return 0.5 * (out + out.transpose());
}

Vec ProjectBoxBall(const Vec& v, double delta, double radius,
                   DykstraReport* report) {
  const auto n = static_cast<double>(v.size());
  if (v.size() == 0) throw InvalidArgument("ProjectBoxBall: empty vector");
  if (delta > 1.0) {
    throw InvalidArgument("ProjectBoxBall: delta > 1 makes the set empty");
  }
  if (radius < 0.0) throw InvalidArgument("ProjectBoxBall: negative radius");

  const double lower = delta / n;
  const double center = 1.0 / n;
  const double r = radius / n;

  if (report != nullptr) *report = DykstraReport{};

  const Vec boxed = ClampBelow(v, lower);
  if (InBall(boxed, center, r)) return boxed;
  const Vec balled = ShrinkToBall(v, center, r);
  if ((balled.array() >= lower).all()) return balled;

  Vec x = v;
  Vec p = Vec::Zero(v.size());
  Vec q = Vec::Zero(v.size());
  const double scale = std::max(1.0, v.norm());
  double change = kInf;
  for (int sweep = 1; sweep <= kMaxDykstraSweeps; ++sweep) {
    const Vec yb = ClampBelow(x + p, lower);
    p = x + p - yb;
    const Vec xn = ShrinkToBall(yb + q, center, r);
    q = yb + q - xn;
    change = std::max((xn - x).norm(), (xn - yb).norm());
    x = xn;
    if (change < kDykstraTol * scale) {
      if (report != nullptr) *report = {sweep, change};
      // The ball iterate is exactly in the ball; snap the residual box gap.
      return ClampBelow(x, lower);
    }
  }
  throw ConvergenceError("ProjectBoxBall: Dykstra did not converge", change);
}

BoxBallProjection::BoxBallProjection(int n, double delta, double radius)
    : n_(n), delta_(delta), radius_(radius) {
  if (n <= 0) throw InvalidArgument("BoxBallProjection: n must be positive");
  if (delta > 1.0) {
    throw InvalidArgument("BoxBallProjection: delta > 1 makes the set empty");
  }
  if (radius < 0.0) throw InvalidArgument("BoxBallProjection: radius < 0");
}

Vec BoxBallProjection::Prox(const Vec& v, double /*step*/) const {
  if (v.size() != n_) {
    throw InvalidArgument("BoxBallProjection: dimension mismatch");
  }
  return ProjectBoxBall(v, delta_, radius_);
}

double BoxBallProjection::Value(const Vec& y) const {
  const double n = n_;
  if (y.size() != n_) return kInf;
  if ((y.array() < delta_ / n - kFeasTol).any()) return kInf;
  if ((n * y.array() - 1.0).matrix().norm() > radius_ + kFeasTol) return kInf;
  return 0.0;
}

SpectralBoxProjection::SpectralBoxProjection(std::vector<SpectralBlock> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) {
    throw InvalidArgument("SpectralBoxProjection: no blocks");
  }
  for (const auto& b : blocks_) {
    if (b.dim <= 0) throw InvalidArgument("SpectralBoxProjection: dim <= 0");
    if (!(0.0 < b.lo && b.lo < b.hi)) {
      throw InvalidArgument("SpectralBoxProjection: requires 0 < lo < hi");
    }
    total_size_ += b.dim * b.dim;
  }
}

Vec SpectralBoxProjection::Prox(const Vec& v, double /*step*/) const {
  if (v.size() != total_size_) {
    throw InvalidArgument("SpectralBoxProjection: dimension mismatch");
  }
  Vec out(v.size());
  Eigen::Index offset = 0;
  for (const auto& b : blocks_) {
    const Eigen::Index len = static_cast<Eigen::Index>(b.dim) * b.dim;
    const Mat block = Eigen::Map<const Mat>(v.data() + offset, b.dim, b.dim);
    Eigen::Map<Mat>(out.data() + offset, b.dim, b.dim) =
        ProjectSpectralBox(block, b.lo, b.hi);
    offset += len;
  }
  return out;
}

double SpectralBoxProjection::Value(const Vec& y) const {
  if (y.size() != total_size_) return kInf;
  Eigen::Index offset = 0;
  for (const auto& b : blocks_) {
    const Mat block = Eigen::Map<const Mat>(y.data() + offset, b.dim, b.dim);
    offset += static_cast<Eigen::Index>(b.dim) * b.dim;
    const double scale = std::max(1.0, block.norm());
    if ((block - block.transpose()).norm() > kFeasTol * scale) return kInf;
    Eigen::SelfAdjointEigenSolver<Mat> eig(block, Eigen::EigenvaluesOnly);
    const Vec& ev = eig.eigenvalues();
    if (ev.minCoeff() < b.lo - kFeasTol * scale ||
        ev.maxCoeff() > b.hi + kFeasTol * scale) {
      return kInf;
    }
  }
  return 0.0;
}

QuadraticRegularizedProx::QuadraticRegularizedProx(
    std::shared_ptr<const ProxOperator> base, double coefficient, Vec center)
    : base_(std::move(base)),
      coefficient_(coefficient),
      center_(std::move(center)) {
  if (!base_) throw InvalidArgument("QuadraticRegularizedProx: null base");
  if (coefficient_ < 0.0) {
    throw InvalidArgument("QuadraticRegularizedProx: negative coefficient");
  }
}

Vec QuadraticRegularizedProx::Prox(const Vec& v, double step) const {
  const double shrink = 1.0 + step * coefficient_;
  return base_->Prox((v + step * coefficient_ * center_) / shrink,
                     step / shrink);
}

double QuadraticRegularizedProx::Value(const Vec& y) const {
  return base_->Value(y) + 0.5 * coefficient_ * (y - center_).squaredNorm();
}

CustomProx::CustomProx(ProxFn prox, ValueFn value, std::string name)
    : prox_(std::move(prox)), value_(std::move(value)), name_(std::move(name)) {
  if (!prox_) throw InvalidArgument("CustomProx: empty prox callback");
  if (!value_) {
    value_ = [](const Vec&) { return 0.0; };
  }
}

std::shared_ptr<const ProxOperator> MakeProx(const ProxSpec& spec) {
  switch (spec.kind) {
    case ProxKind::kZero:
      return std::make_shared<ZeroProx>();
    case ProxKind::kSpectralBox:
      return std::make_shared<SpectralBoxProjection>(spec.blocks);
    case ProxKind::kBoxBall:
      return std::make_shared<BoxBallProjection>(spec.n, spec.delta,
                                                 spec.radius);
    case ProxKind::kCustom:
      return std::make_shared<CustomProx>(spec.custom_prox, spec.custom_value);
  }
  throw InvalidArgument("MakeProx: unknown kind");
}

}  // namespace saddle
