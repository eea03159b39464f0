#include "starcons/relative.hpp"

#include "starcons/dynamics.hpp"
#include "starcons/random.hpp"

#include <algorithm>
#include <cmath>

namespace starcons {

FrameSet::FrameSet(std::vector<Matrix> rotations) : rotations_(std::move(rotations)), dim_(0) {
  if (rotations_.empty()) throw ContractViolation("frame set is empty");
  dim_ = static_cast<int>(rotations_.front().rows());
  for (const auto& r : rotations_) {
    if (r.rows() != dim_ || r.cols() != dim_) throw DimensionMismatch("frames differ in dimension");
    const double resid = (r.transpose() * r - Matrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
    if (resid > 1e-10) throw ContractViolation("frame is not orthogonal");
    if (r.determinant() < 0.0) throw ContractViolation("frame is a reflection, not a rotation");
  }
}

FrameSet FrameSet::identity(std::size_t n, int dim) {
  return FrameSet(std::vector<Matrix>(n, Matrix::Identity(dim, dim)));
}

FrameSet random_frames(std::size_t n, int dim, std::uint64_t seed) {
  if (dim < 2) throw ContractViolation("random_frames: dimension must be at least 2");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<Matrix> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::MatrixXd g(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j)
      if (r(j, j) < 0.0) q.col(j) *= -1.0;
    // Flipping one column maps Haar measure on O(d) \ SO(d) onto SO(d).
    if (q.determinant() < 0.0) q.col(0) *= -1.0;
    out.emplace_back(q);
  }
  return FrameSet(std::move(out));
}

Matrix planar_rotation(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

RelativeRotations::RelativeRotations(const FrameSet& frames) : n_(frames.size()) {
  r_.reserve(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) r_.emplace_back(frames[i].transpose() * frames[j]);
}

LocalStateSet to_local(const BoundaryFamily& family, const Matrix& x, const FrameSet& frames) {
  if (!family.all_unit_spheres())
    throw ContractViolation("relative formulation is defined on the Euclidean unit sphere only");
  if (static_cast<std::size_t>(x.rows()) != frames.size() || x.cols() != frames.dim() ||
      family.size() != frames.size())
    throw DimensionMismatch("to_local: shape mismatch");
  LocalStateSet out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = x.row(i) * frames[static_cast<std::size_t>(i)];
  return out;
}

Matrix to_global(const LocalStateSet& local, const FrameSet& frames) {
  Matrix out(local.rows(), local.cols());
  for (Eigen::Index i = 0; i < local.rows(); ++i)
    out.row(i) = local.row(i) * frames[static_cast<std::size_t>(i)].transpose();
  return out;
}

LocalStateSet relative_step(const WeightMatrix& a, const LocalStateSet& local,
                            const RelativeRotations& relative) {
  const auto n = a.size();
  if (static_cast<std::size_t>(local.rows()) != n || relative.size() != n)
    throw DimensionMismatch("relative_step: shape mismatch");
  const Matrix& w = a.entries();
  LocalStateSet next(local.rows(), local.cols());
  RowVector sum(local.cols());
  for (std::size_t i = 0; i < n; ++i) {
    sum.setZero();
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double aij = w(ii, static_cast<Eigen::Index>(j));
      if (aij > 0.0) sum += aij * (local.row(static_cast<Eigen::Index>(j)) * relative(i, j).transpose());
    }
    const double nrm = sum.norm();
    if (!(nrm >= kZeroRowThreshold)) throw ZeroRowError(i);
    next.row(ii) = sum / nrm;
  }
  return next;
}

double equivalence_check(const WeightMatrix& a, const Matrix& x0, const FrameSet& frames,
                         std::size_t iters) {
  const BoundaryFamily family = BoundaryFamily::uniform(make_const_gamma(1.0, frames.dim()), frames.size());
  const RelativeRotations relative(frames);
  Matrix x = x0;
  LocalStateSet local = to_local(family, x0, frames);
  double worst = (to_global(local, frames) - x).rowwise().norm().maxCoeff();
  for (std::size_t t = 0; t < iters; ++t) {
    x = step(a, family, x);
    local = relative_step(a, local, relative);
    worst = std::max(worst, (to_global(local, frames) - x).rowwise().norm().maxCoeff());
  }
  return worst;
}

}  // namespace starcons
