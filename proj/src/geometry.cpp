#include "starcons/geometry.hpp"

#include "starcons/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace starcons {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double int_pow(double base, int exp) {
  double out = 1.0;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

double lp_norm(const RowRef& u, double p) {
  const double m = u.cwiseAbs().maxCoeff();
  if (std::isinf(p) || m == 0.0) return m;
  if (p == 1.0) return u.cwiseAbs().sum();
  if (p == 2.0) return u.norm();
  const int ip = static_cast<int>(p);
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) s += int_pow(std::abs(u[i]) / m, ip);
  return m * std::pow(s, 1.0 / p);
}

void validate_lp(const LpShape& s) {
  const bool integral = std::isinf(s.p) ? s.p > 0 : (s.p >= 1.0 && std::floor(s.p) == s.p);
  if (!integral) throw ContractViolation("lp gamma: p must be a positive integer or infinity");
  if (!(s.r > 0.0) || !std::isfinite(s.r)) throw ContractViolation("lp gamma: r must be positive");
}

}  // namespace

DirectionalFunction::DirectionalFunction(ShapeDescriptor descriptor, int dim)
    : descriptor_(std::move(descriptor)), dim_(dim) {
  if (dim_ < 2) throw ContractViolation("directional function: dimension must be at least 2");
  std::visit(
      Overloaded{
          [&](const LpShape& s) {
            validate_lp(s);
            // Over the unit sphere |u|_p ranges over [1, d^{1/p-1/2}] for p <= 2
            // and over [d^{1/p-1/2}, 1] for p >= 2.
            const double inv_p = std::isinf(s.p) ? 0.0 : 1.0 / s.p;
            const double corner = std::pow(static_cast<double>(dim_), 0.5 - inv_p);
            gamma_min_ = s.r * std::min(1.0, corner);
            gamma_max_ = s.r * std::max(1.0, corner);
          },
          [&](StarShape& s) {
            const auto k = static_cast<std::size_t>(s.anchors.rows());
            if (s.anchors.rows() > 0 && s.anchors.cols() != dim_)
              throw DimensionMismatch("star gamma: anchor dimension differs from d");
            if (s.weights.size() != k || s.powers.size() != k)
              throw DimensionMismatch("star gamma: anchors, weights and powers differ in length");
            if (!(s.base > 0.0) || !std::isfinite(s.base))
              throw ContractViolation("star gamma: base must be positive");
            double wsum = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
              const double nrm = s.anchors.row(static_cast<Eigen::Index>(i)).norm();
              if (std::abs(nrm - 1.0) > 1e-9)
                throw ContractViolation("star gamma: anchor " + std::to_string(i) +
                                        " is not a unit vector");
              s.anchors.row(static_cast<Eigen::Index>(i)) /= nrm;
              if (!(s.weights[i] > 0.0) || !std::isfinite(s.weights[i]))
                throw ContractViolation("star gamma: weights must be positive");
              if (s.powers[i] < 1) throw ContractViolation("star gamma: powers must be >= 1");
              wsum += s.weights[i];
            }
            gamma_min_ = s.base;
            gamma_max_ = s.base + wsum;
          },
          [&](const ConstShape& s) {
            if (!(s.c > 0.0) || !std::isfinite(s.c))
              throw ContractViolation("const gamma: c must be positive");
            gamma_min_ = gamma_max_ = s.c;
          }},
      descriptor_);
}

double DirectionalFunction::operator()(const RowRef& u) const {
  return std::visit(Overloaded{[&](const LpShape& s) { return s.r / lp_norm(u, s.p); },
                               [&](const StarShape& s) {
                                 double out = s.base;
                                 for (Eigen::Index k = 0; k < s.anchors.rows(); ++k) {
                                   const double dot = s.anchors.row(k).dot(u);
                                   if (dot > 0.0)
                                     out += s.weights[static_cast<std::size_t>(k)] *
                                            int_pow(dot, s.powers[static_cast<std::size_t>(k)]);
                                 }
                                 return out;
                               },
                               [](const ConstShape& s) { return s.c; }},
                    descriptor_);
}

bool DirectionalFunction::is_unit_sphere() const noexcept {
  if (const auto* lp = std::get_if<LpShape>(&descriptor_)) return lp->p == 2.0 && lp->r == 1.0;
  if (const auto* c = std::get_if<ConstShape>(&descriptor_)) return c->c == 1.0;
  return false;
}

DirectionalFunction make_lp_gamma(double p, double r, int dim) {
  return DirectionalFunction(LpShape{p, r}, dim);
}

DirectionalFunction make_const_gamma(double c, int dim) {
  return DirectionalFunction(ConstShape{c}, dim);
}

DirectionalFunction make_star_gamma(double base, Matrix anchors, std::vector<double> weights,
                                    std::vector<int> powers) {
  const auto dim = static_cast<int>(anchors.cols());
  return DirectionalFunction(
      StarShape{base, std::move(anchors), std::move(weights), std::move(powers)}, dim);
}

DirectionalFunction make_random_star_gamma(int dim, std::uint64_t seed) {
  if (dim < 2) throw ContractViolation("random star gamma: dimension must be at least 2");
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> count(dim, 4 * dim);
  std::uniform_int_distribution<int> power(1, 10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss;

  const int k = count(rng);
  const double base = 0.5 + unit(rng);
  Matrix anchors(k, dim);
  std::vector<double> weights(static_cast<std::size_t>(k));
  std::vector<int> powers(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    double nrm = 0.0;
    do {
      for (int j = 0; j < dim; ++j) anchors(i, j) = gauss(rng);
      nrm = anchors.row(i).norm();
    } while (nrm < 1e-8);
    anchors.row(i) /= nrm;
    weights[static_cast<std::size_t>(i)] = 2.0 - 2.0 * unit(rng);  // (0, 2]
    powers[static_cast<std::size_t>(i)] = power(rng);
  }
  return make_star_gamma(base, std::move(anchors), std::move(weights), std::move(powers));
}

BoundaryFamily::BoundaryFamily(std::vector<DirectionalFunction> gammas)
    : gammas_(std::move(gammas)), dim_(0) {
  if (gammas_.size() < 2) throw ContractViolation("boundary family needs at least two agents");
  dim_ = gammas_.front().dim();
  for (const auto& g : gammas_)
    if (g.dim() != dim_) throw DimensionMismatch("boundary family: mixed dimensions");
}

BoundaryFamily BoundaryFamily::uniform(const DirectionalFunction& gamma, std::size_t n) {
  return BoundaryFamily(std::vector<DirectionalFunction>(n, gamma));
}

bool BoundaryFamily::all_unit_spheres() const noexcept {
  return std::all_of(gammas_.begin(), gammas_.end(),
                     [](const DirectionalFunction& g) { return g.is_unit_sphere(); });
}

RowVector radial_project(const DirectionalFunction& gamma, const RowRef& x) {
  if (x.size() != gamma.dim()) throw DimensionMismatch("radial_project: dimension mismatch");
  const double nrm = x.norm();
  if (!(nrm >= kZeroRowThreshold)) throw ZeroRowError(0);
  const RowVector u = x / nrm;
  return gamma(u) * u;
}

void rowwise_project_into(const BoundaryFamily& family, const Matrix& m, Matrix& out) {
  if (static_cast<std::size_t>(m.rows()) != family.size() || m.cols() != family.dim())
    throw DimensionMismatch("rowwise_project: matrix shape does not match the family");
  if (&out != &m) out.resize(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double nrm = m.row(i).norm();
    if (!(nrm >= kZeroRowThreshold)) throw ZeroRowError(static_cast<std::size_t>(i));
    out.row(i) = m.row(i) / nrm;
    out.row(i) *= family[static_cast<std::size_t>(i)](out.row(i));
  }
}

Matrix rowwise_project(const BoundaryFamily& family, const Matrix& m) {
  Matrix out;
  rowwise_project_into(family, m, out);
  return out;
}

double phi_max(const Matrix& m) {
  Matrix u(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double nrm = m.row(i).norm();
    if (!(nrm >= kZeroRowThreshold)) throw ZeroRowError(static_cast<std::size_t>(i));
    u.row(i) = m.row(i) / nrm;
  }
  // 2 atan2(|u - v|, |u + v|) keeps full relative accuracy near 0 and pi,
  // where arccos of the inner product loses half the digits.
  double worst = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = i + 1; j < u.rows(); ++j) {
      const double angle = 2.0 * std::atan2((u.row(i) - u.row(j)).norm(), (u.row(i) + u.row(j)).norm());
      worst = std::max(worst, angle);
    }
  return std::clamp(worst, 0.0, std::numbers::pi);
}

bool is_on_boundary(const BoundaryFamily& family, const Matrix& x, double tol) {
  if (static_cast<std::size_t>(x.rows()) != family.size() || x.cols() != family.dim()) return false;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double nrm = x.row(i).norm();
    if (!(nrm >= kZeroRowThreshold)) return false;
    const RowVector u = x.row(i) / nrm;
    if (std::abs(nrm - family[static_cast<std::size_t>(i)](u)) > tol) return false;
  }
  return true;
}

bool cone_perp_membership(const Matrix& a, const Vector& c) {
  if (a.cols() != c.size()) throw DimensionMismatch("cone_perp_membership: shape mismatch");
  const double cnorm = c.norm();
  if (!(cnorm >= kZeroRowThreshold)) throw ContractViolation("cone_perp_membership: c is zero");
  // A nonnegative combination of the entries of A c^T vanishes for some
  // nonzero weight vector unless they all share one strict sign.
  const Vector ac = a * c;
  const double tol = 1e-12 * a.norm() * cnorm;
  const bool all_pos = (ac.array() > tol).all();
  const bool all_neg = (ac.array() < -tol).all();
  return !(all_pos || all_neg);
}

}  // namespace starcons
