#include <doctest.h>

#include <Eigen/Dense>

#include "doco/geometry.hpp"
#include "doco/rng.hpp"
#include "helpers.hpp"

using doco::Domain;
using doco::project;
using doco::shrink;
using Eigen::VectorXd;

namespace {
VectorXd vec2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("projection closed forms") {
  Domain ball = Domain::ball(2, 1.0);
  CHECK(project(ball, vec2(2, 0)) == vec2(1, 0));
  CHECK(project(ball, vec2(0.3, 0.4)) == vec2(0.3, 0.4));

  Domain box = Domain::box(3, 1.0);
  VectorXd x(3);
  x << 1.5, -0.2, -3.0;
  VectorXd want(3);
  want << 1.0, -0.2, -1.0;
  CHECK(project(box, x) == want);

  VectorXd lo(2), hi(2);
  lo << 0.0, 0.0;
  hi << 2.0, 1.0;
  Domain sb = Domain::shifted_box(lo, hi);
  CHECK(project(sb, vec2(-1, 3)) == vec2(0, 1));
  CHECK(thrown_code([&] { project(ball, x); }) == "invalid-size");
}

TEST_CASE("domain derived radii") {
  Domain ball = Domain::ball(4, 2.0);
  CHECK(ball.inner_radius() == 2.0);
  CHECK(ball.outer_radius() == 2.0);
  CHECK(ball.diameter() == 4.0);
  CHECK(ball.contains_origin());

  Domain box = Domain::box(4, 1.0);
  CHECK(box.inner_radius() == 1.0);
  CHECK(box.outer_radius() == doctest::Approx(2.0));
  CHECK(box.diameter() == doctest::Approx(4.0));
  CHECK(box.inner_radius() <= box.outer_radius());
  CHECK(box.diameter() <= 2.0 * box.outer_radius() + 1e-12);

  VectorXd lo(2), hi(2);
  lo << 0.0, 0.0;
  hi << 1.0, 1.0;
  Domain sb = Domain::shifted_box(lo, hi);
  CHECK(sb.inner_radius() == 0.0);
  CHECK(sb.diameter() == doctest::Approx(std::sqrt(2.0)));
  CHECK(sb.contains_origin());

  CHECK(thrown_code([] { Domain::ball(2, 0.0); }) == "invalid-domain");
  CHECK(thrown_code([] { Domain::box(0, 1.0); }) == "invalid-domain");
}

TEST_CASE("shrink scales boundaries") {
  Domain b = shrink(Domain::ball(2, 1.0), 0.1);
  CHECK(b.radius == doctest::Approx(0.9));
  Domain bx = shrink(Domain::box(2, 2.0), 0.5);
  CHECK(bx.half_width == doctest::Approx(1.0));
  CHECK(project(shrink(Domain::ball(2, 1.0), 0.25), vec2(2, 0)) == vec2(0.75, 0));
  CHECK(thrown_code([] { shrink(Domain::ball(2, 1.0), 0.0); }) == "invalid-shrinkage");
  CHECK(thrown_code([] { shrink(Domain::ball(2, 1.0), 1.0); }) == "invalid-shrinkage");
  CHECK(thrown_code([] { shrink(Domain::ball(2, 1.0), -0.3); }) == "invalid-shrinkage");
}

TEST_CASE("projection is non-expansive, idempotent, obtuse") {
  const int d = 5;
  Domain ball = Domain::ball(d, 1.3);
  Domain box = Domain::box(d, 0.8);
  doco::rng::Stream s = doco::rng::Stream::derive(17, "geometry");
  for (const Domain& dom : {ball, box}) {
    for (int rep = 0; rep < 1000; ++rep) {
      VectorXd x(d), y(d);
      for (int i = 0; i < d; ++i) {
        x[i] = 4.0 * (s.uniform() - 0.5);
        y[i] = 4.0 * (s.uniform() - 0.5);
      }
      VectorXd px = project(dom, x);
      VectorXd py = project(dom, y);
      CHECK((px - py).norm() <= (x - y).norm() + 1e-12);
      CHECK((project(dom, px) - px).lpNorm<Eigen::Infinity>() <= 1e-15);
      // <P(x) - x, x - y'> <= -||P(x) - x||^2 for feasible y'
      VectorXd yin = project(dom, y);
      double lhs = (px - x).dot(x - yin);
      CHECK(lhs <= -(px - x).squaredNorm() + 1e-12);
    }
  }
}
