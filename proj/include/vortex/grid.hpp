// Radial grids on [0, R] with quadrature against the measure r dr.
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <memory>

#include "vortex/model.hpp"

namespace vortex {

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Spacing { Uniform, Geometric };

template <class Scalar>
struct Grading {
  Spacing spacing = Spacing::Uniform;
  Scalar ratio = Scalar(1);  // h_{i+1}/h_i for geometric grading

  static Grading uniform() { return {}; }
  static Grading geometric(Scalar ratio) { return {Spacing::Geometric, ratio}; }
};

/// Nodes 0 = r_0 < ... < r_N = R and weights with sum_i w_i f(r_i) ~ int_0^R f r dr.
///
/// The weights are the trapezoid rule applied to f(r) r (so w_0 = 0 and f = 1
/// is integrated exactly), multiplied by a linear factor 1 + a + b r fitted so
/// that f = r is integrated exactly as well. a and b are O(h^2/R^2).
template <class Scalar>
class RadialGrid {
 public:
  using Vec = Vector<Scalar>;

  RadialGrid(Vec nodes, Grading<Scalar> grading) : nodes_(std::move(nodes)), grading_(grading) {
    build_weights();
  }

  const Vec& nodes() const { return nodes_; }
  const Vec& weights() const { return weights_; }
  Scalar node(Eigen::Index i) const { return nodes_[i]; }
  Scalar weight(Eigen::Index i) const { return weights_[i]; }
  /// Number of nodes (cells + 1).
  Eigen::Index size() const { return nodes_.size(); }
  Eigen::Index cells() const { return nodes_.size() - 1; }
  Scalar radius() const { return nodes_[nodes_.size() - 1]; }
  Scalar spacing(Eigen::Index cell) const { return nodes_[cell + 1] - nodes_[cell]; }
  Scalar midpoint(Eigen::Index cell) const { return Scalar(0.5) * (nodes_[cell] + nodes_[cell + 1]); }
  const Grading<Scalar>& grading() const { return grading_; }

  /// Index of the node closest to r.
  Eigen::Index nearest(Scalar r) const {
    Eigen::Index lo = 0, hi = size() - 1;
    while (hi - lo > 1) {
      const Eigen::Index mid = (lo + hi) / 2;
      (nodes_[mid] <= r ? lo : hi) = mid;
    }
    using std::abs;
    return abs(nodes_[lo] - r) <= abs(nodes_[hi] - r) ? lo : hi;
  }

 private:
  void build_weights() {
    const Eigen::Index n = size();
    weights_ = Vec::Zero(n);
    for (Eigen::Index c = 0; c + 1 < n; ++c) {
      const Scalar h = spacing(c);
      weights_[c] += Scalar(0.5) * h * nodes_[c];
      weights_[c + 1] += Scalar(0.5) * h * nodes_[c + 1];
    }
    // moments of the trapezoid weights
    Scalar m0 = 0, m1 = 0, m2 = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      m0 += weights_[i];
      m1 += weights_[i] * nodes_[i];
      m2 += weights_[i] * nodes_[i] * nodes_[i];
    }
    const Scalar R = radius();
    const Scalar exact0 = R * R / Scalar(2);
    const Scalar exact1 = R * R * R / Scalar(3);
    // (1 + a + b r) w: a m0 + b m1 = exact0 - m0, a m1 + b m2 = exact1 - m1
    const Scalar det = m0 * m2 - m1 * m1;
    const Scalar r0 = exact0 - m0, r1 = exact1 - m1;
    const Scalar a = (r0 * m2 - r1 * m1) / det;
    const Scalar b = (m0 * r1 - m1 * r0) / det;
    for (Eigen::Index i = 0; i < n; ++i) weights_[i] *= Scalar(1) + a + b * nodes_[i];
    weights_[0] = Scalar(0);
  }

  Vec nodes_;
  Vec weights_;
  Grading<Scalar> grading_;
};

template <class Scalar>
using GridPtr = std::shared_ptr<const RadialGrid<Scalar>>;

/// Grid with `cells` intervals (cells + 1 nodes) on [0, R].
template <class Scalar>
GridPtr<Scalar> make_grid(Scalar R, Eigen::Index cells, Grading<Scalar> grading = {}) {
  using std::pow;
  if (!(R > 0)) throw DomainError("make_grid: R must be positive");
  if (cells < 16) throw DomainError("make_grid: at least 16 cells required");
  Vector<Scalar> r(cells + 1);
  if (grading.spacing == Spacing::Uniform || grading.ratio == Scalar(1)) {
    for (Eigen::Index i = 0; i <= cells; ++i) r[i] = R * Scalar(i) / Scalar(cells);
  } else {
    if (!(grading.ratio > 0)) throw DomainError("make_grid: geometric ratio must be positive");
    const Scalar q = grading.ratio;
    const Scalar h0 = R * (q - Scalar(1)) / (pow(q, Scalar(cells)) - Scalar(1));
    r[0] = 0;
    Scalar h = h0;
    for (Eigen::Index i = 1; i <= cells; ++i, h *= q) r[i] = r[i - 1] + h;
  }
  r[cells] = R;
  return std::make_shared<const RadialGrid<Scalar>>(std::move(r), grading);
}

/// sum_i w_i f_i
template <class Scalar, class Derived>
Scalar integrate(const RadialGrid<Scalar>& grid, const Eigen::MatrixBase<Derived>& samples) {
  if (samples.size() != grid.size()) throw DomainError("integrate: sample count does not match grid");
  return grid.weights().dot(samples.template cast<Scalar>());
}

namespace detail {

// Three-point derivative weights at node i from nodes (i-1, i, i+1) with
// spacings hm = r_i - r_{i-1}, hp = r_{i+1} - r_i.
template <class Scalar>
inline void central_first(Scalar hm, Scalar hp, Scalar& cm, Scalar& c0, Scalar& cp) {
  cm = -hp / (hm * (hm + hp));
  c0 = (hp - hm) / (hm * hp);
  cp = hm / (hp * (hm + hp));
}

template <class Scalar>
inline void central_second(Scalar hm, Scalar hp, Scalar& cm, Scalar& c0, Scalar& cp) {
  cm = Scalar(2) / (hm * (hm + hp));
  c0 = -Scalar(2) / (hm * hp);
  cp = Scalar(2) / (hp * (hm + hp));
}

}  // namespace detail

/// u' at every node: central three-point differences inside, one-sided
/// second-order at both ends. Non-uniform grids use the Lagrange weights.
template <class Scalar, class Derived>
Vector<Scalar> differentiate(const RadialGrid<Scalar>& grid, const Eigen::MatrixBase<Derived>& u) {
  const Eigen::Index n = grid.size();
  if (n < 3) throw DomainError("differentiate: at least 3 nodes required");
  if (u.size() != n) throw DomainError("differentiate: sample count does not match grid");
  Vector<Scalar> du(n);
  const auto& r = grid.nodes();
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    Scalar cm, c0, cp;
    detail::central_first(r[i] - r[i - 1], r[i + 1] - r[i], cm, c0, cp);
    du[i] = cm * u[i - 1] + c0 * u[i] + cp * u[i + 1];
  }
  {
    const Scalar h1 = r[1] - r[0], h2 = r[2] - r[1];
    du[0] = -(Scalar(2) * h1 + h2) / (h1 * (h1 + h2)) * u[0] + (h1 + h2) / (h1 * h2) * u[1] -
            h1 / (h2 * (h1 + h2)) * u[2];
  }
  {
    const Scalar ha = r[n - 2] - r[n - 3], hb = r[n - 1] - r[n - 2];
    du[n - 1] = hb / (ha * (ha + hb)) * u[n - 3] - (ha + hb) / (ha * hb) * u[n - 2] +
                (Scalar(2) * hb + ha) / (hb * (ha + hb)) * u[n - 1];
  }
  return du;
}

}  // namespace vortex
