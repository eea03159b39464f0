#pragma once

// Directional functions, star boundaries and radial projections.

#include "starcons/types.hpp"

#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

namespace starcons {

inline constexpr double kInfiniteP = std::numeric_limits<double>::infinity();

/// Sphere of radius r in the p-norm; p is a positive integer or kInfiniteP.
struct LpShape {
  double p = 2.0;
  double r = 1.0;
};

/// base + sum_k weights[k] * max(0, u . anchors.row(k))^powers[k]
struct StarShape {
  double base = 1.0;
  Matrix anchors;  // K x d, unit rows
  std::vector<double> weights;
  std::vector<int> powers;
};

struct ConstShape {
  double c = 1.0;
};

using ShapeDescriptor = std::variant<LpShape, StarShape, ConstShape>;

/// Positive bounded map from unit directions to radii. Immutable.
class DirectionalFunction {
 public:
  DirectionalFunction(ShapeDescriptor descriptor, int dim);

  /// Radius along the unit direction u. u is assumed to have unit norm.
  double operator()(const RowRef& u) const;

  double gamma_min() const noexcept { return gamma_min_; }
  double gamma_max() const noexcept { return gamma_max_; }
  int dim() const noexcept { return dim_; }
  const ShapeDescriptor& descriptor() const noexcept { return descriptor_; }

  /// True when the function is identically 1 (the Euclidean unit sphere).
  bool is_unit_sphere() const noexcept;

 private:
  ShapeDescriptor descriptor_;
  int dim_;
  double gamma_min_ = 0.0;
  double gamma_max_ = 0.0;
};

DirectionalFunction make_lp_gamma(double p, double r, int dim);
DirectionalFunction make_const_gamma(double c, int dim);
DirectionalFunction make_star_gamma(double base, Matrix anchors, std::vector<double> weights,
                                    std::vector<int> powers);

/// Random star boundary: K in {d..4d} anchors, powers in {1..10},
/// base in [0.5, 1.5], weights in (0, 2].
DirectionalFunction make_random_star_gamma(int dim, std::uint64_t seed);

/// One directional function per agent, all in the same dimension.
class BoundaryFamily {
 public:
  BoundaryFamily(std::vector<DirectionalFunction> gammas);

  /// n copies of the same function.
  static BoundaryFamily uniform(const DirectionalFunction& gamma, std::size_t n);

  std::size_t size() const noexcept { return gammas_.size(); }
  int dim() const noexcept { return dim_; }
  const DirectionalFunction& operator[](std::size_t i) const { return gammas_[i]; }
  const std::vector<DirectionalFunction>& gammas() const noexcept { return gammas_; }

  bool all_unit_spheres() const noexcept;

 private:
  std::vector<DirectionalFunction> gammas_;
  int dim_;
};

/// gamma(x/|x|) x/|x|. Throws ZeroRowError(0) for a zero vector.
RowVector radial_project(const DirectionalFunction& gamma, const RowRef& x);

/// Row i projected onto the boundary of family[i].
Matrix rowwise_project(const BoundaryFamily& family, const Matrix& m);

/// Allocation-free variant used by the iteration loops; out may alias m.
void rowwise_project_into(const BoundaryFamily& family, const Matrix& m, Matrix& out);

/// Largest angle between two rows, in radians.
double phi_max(const Matrix& m);

/// Whether |x_i| = gamma_i(x_i/|x_i|) holds for every row within tol.
bool is_on_boundary(const BoundaryFamily& family, const Matrix& x, double tol = 1e-10);

/// Membership of c in the set of vectors orthogonal to some nonzero
/// conical combination of the rows of a (a nonnegative, no zero rows).
bool cone_perp_membership(const Matrix& a, const Vector& c);

}  // namespace starcons
