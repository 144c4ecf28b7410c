#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "doco/error.hpp"

namespace doco {

enum class DomainVariant { ball, box, shifted_box };

/// Feasible set for the learners. Only shapes with closed-form Euclidean
/// projections are supported: origin-centered l2 balls, symmetric boxes, and
/// axis-aligned shifted boxes (used by one adversarial construction).
struct Domain {
  DomainVariant variant = DomainVariant::ball;
  int d = 0;
  double radius = 0.0;      // ball
  double half_width = 0.0;  // box, symmetric about the origin
  Eigen::VectorXd lo, hi;   // shifted_box

  static Domain ball(int d, double R) {
    if (d < 1 || !(R > 0.0)) fail("invalid-domain", "ball needs d >= 1, R > 0");
    Domain dom;
    dom.variant = DomainVariant::ball;
    dom.d = d;
    dom.radius = R;
    return dom;
  }
  static Domain box(int d, double half_width) {
    if (d < 1 || !(half_width > 0.0)) fail("invalid-domain", "box needs d >= 1, half_width > 0");
    Domain dom;
    dom.variant = DomainVariant::box;
    dom.d = d;
    dom.half_width = half_width;
    return dom;
  }
  static Domain shifted_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    if (lo.size() < 1 || lo.size() != hi.size()) fail("invalid-domain", "shifted_box bounds mismatch");
    for (int i = 0; i < lo.size(); ++i)
      if (!(lo[i] <= hi[i])) fail("invalid-domain", "shifted_box needs lo <= hi");
    Domain dom;
    dom.variant = DomainVariant::shifted_box;
    dom.d = static_cast<int>(lo.size());
    dom.lo = lo;
    dom.hi = hi;
    return dom;
  }

  /// Radius of the largest origin-centered ball inside the domain.
  double inner_radius() const {
    switch (variant) {
      case DomainVariant::ball: return radius;
      case DomainVariant::box: return half_width;
      case DomainVariant::shifted_box: return 0.0;  // lo >= 0 boxes do not contain a ball
    }
    fail("invalid-domain", "unknown variant");
  }
  /// Radius of the smallest origin-centered ball covering the domain.
  double outer_radius() const {
    switch (variant) {
      case DomainVariant::ball: return radius;
      case DomainVariant::box: return half_width * std::sqrt(static_cast<double>(d));
      case DomainVariant::shifted_box: {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
          double m = std::max(std::abs(lo[i]), std::abs(hi[i]));
          s += m * m;
        }
        return std::sqrt(s);
      }
    }
    fail("invalid-domain", "unknown variant");
  }
  double diameter() const {
    switch (variant) {
      case DomainVariant::ball: return 2.0 * radius;
      case DomainVariant::box: return 2.0 * half_width * std::sqrt(static_cast<double>(d));
      case DomainVariant::shifted_box: return (hi - lo).norm();
    }
    fail("invalid-domain", "unknown variant");
  }
  bool contains_origin() const {
    switch (variant) {
      case DomainVariant::ball:
      case DomainVariant::box:
        return true;
      case DomainVariant::shifted_box:
        for (int i = 0; i < d; ++i)
          if (lo[i] > 0.0 || hi[i] < 0.0) return false;
        return true;
    }
    fail("invalid-domain", "unknown variant");
  }
};

inline Eigen::VectorXd project(const Domain& dom, const Eigen::VectorXd& x) {
  if (x.size() != dom.d) fail("invalid-size", "projection input dimension mismatch");
  switch (dom.variant) {
    case DomainVariant::ball: {
      double nrm = x.norm();
      if (nrm <= dom.radius) return x;
      return x * (dom.radius / nrm);
    }
    case DomainVariant::box:
      return x.cwiseMax(-dom.half_width).cwiseMin(dom.half_width);
    case DomainVariant::shifted_box:
      return x.cwiseMax(dom.lo).cwiseMin(dom.hi);
  }
  fail("invalid-domain", "unknown variant");
}

/// Scaled copy (1 - zeta) * dom, used to keep bandit perturbations feasible.
inline Domain shrink(const Domain& dom, double zeta) {
  if (!(zeta > 0.0 && zeta < 1.0)) fail("invalid-shrinkage", "zeta must lie in (0,1)");
  Domain out = dom;
  double s = 1.0 - zeta;
  switch (dom.variant) {
    case DomainVariant::ball:
      out.radius *= s;
      return out;
    case DomainVariant::box:
      out.half_width *= s;
      return out;
    case DomainVariant::shifted_box:
      out.lo *= s;
      out.hi *= s;
      return out;
  }
  fail("invalid-domain", "unknown variant");
}

}  // namespace doco
