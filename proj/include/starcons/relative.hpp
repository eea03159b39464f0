#pragma once

// The unit-sphere iteration written in agent-local coordinates, using only
// pairwise rotations between agent frames.

#include "starcons/geometry.hpp"
#include "starcons/graph.hpp"

#include <cstdint>
#include <vector>

namespace starcons {

/// Proper rotations R_i mapping agent i's frame to the global frame.
/// Row-vector convention: the local copy of x is x R_i.
class FrameSet {
 public:
  explicit FrameSet(std::vector<Matrix> rotations);

  std::size_t size() const noexcept { return rotations_.size(); }
  int dim() const noexcept { return dim_; }
  const Matrix& operator[](std::size_t i) const { return rotations_[i]; }
  const std::vector<Matrix>& rotations() const noexcept { return rotations_; }

  static FrameSet identity(std::size_t n, int dim);

 private:
  std::vector<Matrix> rotations_;
  int dim_;
};

/// Haar-distributed proper rotations (QR of Gaussian matrices with sign fix).
FrameSet random_frames(std::size_t n, int dim, std::uint64_t seed);

/// Counterclockwise planar rotation by angle (column-vector convention matrix).
Matrix planar_rotation(double angle);

/// The only frame information relative_step gets: R_ij = R_i^T R_j for all pairs.
class RelativeRotations {
 public:
  explicit RelativeRotations(const FrameSet& frames);

  const Matrix& operator()(std::size_t i, std::size_t j) const { return r_[i * n_ + j]; }
  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_;
  std::vector<Matrix> r_;
};

/// Row i holds x_i expressed in agent i's own frame.
using LocalStateSet = Matrix;

/// x~_i = x_i R_i. The family must be all unit spheres.
LocalStateSet to_local(const BoundaryFamily& family, const Matrix& x, const FrameSet& frames);

/// x_i = x~_i R_i^T.
Matrix to_global(const LocalStateSet& local, const FrameSet& frames);

/// x~_i+ = normalize(sum_j a_ij x~_j R_ij^T).
LocalStateSet relative_step(const WeightMatrix& a, const LocalStateSet& local,
                            const RelativeRotations& relative);

/// Largest |x~_i(t) R_i^T - x_i(t)| over iters steps of both formulations.
double equivalence_check(const WeightMatrix& a, const Matrix& x0, const FrameSet& frames,
                         std::size_t iters);

}  // namespace starcons
