#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "doco/error.hpp"
#include "doco/geometry.hpp"
#include "doco/rng.hpp"

namespace doco {

enum class LossClass { convex, strongly_convex };

/// Hint the comparator solver uses to pick a closed form. `v` holds the
/// summed gradient (linear) or the mean target (quadratic).
struct ComparatorHint {
  enum class Form { none, linear, quadratic } form = Form::none;
  Eigen::VectorXd v;
};

/// A stream of per-round, per-learner losses f_{t,i}. Queries are pure
/// functions of (seed, t, i, x); streams are safe to share across threads.
class LossStream {
 public:
  LossStream(int n, int d, long T, LossClass cls, double G, double mu)
      : n_(n), d_(d), T_(T), cls_(cls), G_(G), mu_(mu) {
    if (n < 1 || d < 1 || T < 1) fail("invalid-size", "loss stream needs n, d, T >= 1");
    if (cls == LossClass::strongly_convex && !(mu > 0.0))
      fail("invalid-parameter", "strongly convex stream needs mu > 0");
  }
  virtual ~LossStream() = default;

  int n() const { return n_; }
  int d() const { return d_; }
  long T() const { return T_; }
  LossClass loss_class() const { return cls_; }
  double G() const { return G_; }
  double mu() const { return mu_; }

  virtual double value(long t, int i, const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd grad(long t, int i, const Eigen::VectorXd& x) const = 0;
  virtual ComparatorHint comparator_hint() const { return {}; }

  /// Closure evaluating the round-t global loss f_t(x) = sum_i f_{t,i}(x).
  /// Subclasses override with a form that amortizes the per-round setup so
  /// regret accounting costs O(d) per query instead of O(n d).
  virtual std::function<double(const Eigen::VectorXd&)> global_loss(long t) const {
    return [this, t](const Eigen::VectorXd& x) {
      double v = 0.0;
      for (int i = 0; i < n_; ++i) v += value(t, i, x);
      return v;
    };
  }

  void check_query(long t, int i, const Eigen::VectorXd& x) const {
    if (t < 1 || t > T_ || i < 0 || i >= n_) fail("invalid-query", "(t, i) out of range");
    if (x.size() != d_) fail("invalid-size", "query dimension mismatch");
  }

 private:
  int n_, d_;
  long T_;
  LossClass cls_;
  double G_, mu_;
};

/// f_{t,i}(x) = <g_{t,i}, x> with each coordinate of g_{t,i} an independent
/// +-G/sqrt(d) sign, so ||g_{t,i}|| = G exactly.
class LinearAdversarialStream : public LossStream {
 public:
  LinearAdversarialStream(int n, int d, long T, double G, std::uint64_t seed)
      : LossStream(n, d, T, LossClass::convex, G, 0.0), seed_(seed) {}

  Eigen::VectorXd gradient_vector(long t, int i) const {
    rng::Stream s = rng::Stream::derive(seed_, "linear-loss", static_cast<std::uint64_t>(t),
                                        static_cast<std::uint64_t>(i));
    double scale = G() / std::sqrt(static_cast<double>(d()));
    Eigen::VectorXd g(d());
    for (int c = 0; c < d(); ++c) g[c] = s.sign() * scale;
    return g;
  }

  double value(long t, int i, const Eigen::VectorXd& x) const override {
    check_query(t, i, x);
    return gradient_vector(t, i).dot(x);
  }
  Eigen::VectorXd grad(long t, int i, const Eigen::VectorXd& x) const override {
    check_query(t, i, x);
    return gradient_vector(t, i);
  }
  ComparatorHint comparator_hint() const override {
    Eigen::VectorXd total = Eigen::VectorXd::Zero(d());
    for (long t = 1; t <= T(); ++t)
      for (int i = 0; i < n(); ++i) total += gradient_vector(t, i);
    return {ComparatorHint::Form::linear, total};
  }
  std::function<double(const Eigen::VectorXd&)> global_loss(long t) const override {
    Eigen::VectorXd g_sum = Eigen::VectorXd::Zero(d());
    for (int i = 0; i < n(); ++i) g_sum += gradient_vector(t, i);
    return [g = std::move(g_sum)](const Eigen::VectorXd& x) { return g.dot(x); };
  }

 private:
  std::uint64_t seed_;
};

/// f_{t,i}(x) = (mu/2) ||x - theta_{t,i}||^2 with targets (D/sqrt(d)) w,
/// w drawn uniformly from {0_d, 1_d}; G = mu * D on the domain.
class QuadraticStream : public LossStream {
 public:
  QuadraticStream(int n, int d, long T, double mu, double D, std::uint64_t seed)
      : LossStream(n, d, T, LossClass::strongly_convex, mu * D, mu), D_(D), seed_(seed) {
    if (!(D > 0.0)) fail("invalid-parameter", "quadratic stream needs D > 0");
  }

  Eigen::VectorXd target(long t, int i) const {
    rng::Stream s = rng::Stream::derive(seed_, "quadratic-target", static_cast<std::uint64_t>(t),
                                        static_cast<std::uint64_t>(i));
    bool ones = s.uniform() < 0.5;
    double v = ones ? D_ / std::sqrt(static_cast<double>(d())) : 0.0;
    return Eigen::VectorXd::Constant(d(), v);
  }

  double value(long t, int i, const Eigen::VectorXd& x) const override {
    check_query(t, i, x);
    return 0.5 * mu() * (x - target(t, i)).squaredNorm();
  }
  Eigen::VectorXd grad(long t, int i, const Eigen::VectorXd& x) const override {
    check_query(t, i, x);
    return mu() * (x - target(t, i));
  }
  ComparatorHint comparator_hint() const override {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d());
    for (long t = 1; t <= T(); ++t)
      for (int i = 0; i < n(); ++i) mean += target(t, i);
    mean /= static_cast<double>(T() * n());
    return {ComparatorHint::Form::quadratic, mean};
  }
  std::function<double(const Eigen::VectorXd&)> global_loss(long t) const override {
    Eigen::VectorXd theta_sum = Eigen::VectorXd::Zero(d());
    double theta_sq = 0.0;
    for (int i = 0; i < n(); ++i) {
      Eigen::VectorXd th = target(t, i);
      theta_sum += th;
      theta_sq += th.squaredNorm();
    }
    return [m = mu(), cnt = n(), ts = std::move(theta_sum), tq = theta_sq](const Eigen::VectorXd& x) {
      return 0.5 * m * (cnt * x.squaredNorm() - 2.0 * ts.dot(x) + tq);
    };
  }

 private:
  double D_;
  std::uint64_t seed_;
};

namespace detail {

// Cycle construction shared by the hard instances: n = 2m + 2 learners, the
// K = ceil(m/2) learners on either side of learner 1 see a trivial loss while
// the rest carry losses that are redrawn every K1 = ceil(m/(2*omega)) rounds.
struct CycleSplit {
  int m, K;
  long K1;
};

inline CycleSplit cycle_split(int n, double omega) {
  if (n < 4 || n % 2 != 0) fail("invalid-construction", "hard instance needs even n >= 4");
  if (!(omega > 0.0 && omega <= 1.0)) fail("invalid-parameter", "omega must lie in (0,1]");
  CycleSplit s;
  s.m = (n - 2) / 2;
  s.K = (s.m + 1) / 2;
  s.K1 = static_cast<long>(std::ceil(s.m / (2.0 * omega)));
  return s;
}

// 1-based learner label l is in the zero-loss group when l <= K or
// l >= n - K + 2 (the learners within K hops of learner 1 on the cycle).
inline bool in_zero_group(int i, int n, int K) {
  int l = i + 1;
  return l <= K || l >= n - K + 2;
}

}  // namespace detail

/// Hard convex instance for the cycle with randomized_gossip(omega): the
/// learners near learner 1 see the zero loss; the rest see a linear loss
/// whose sign vector is redrawn once per K1-round interval.
class LowerBoundConvexStream : public LossStream {
 public:
  LowerBoundConvexStream(int n, int d, long T, double G, double omega, std::uint64_t seed)
      : LossStream(n, d, T, LossClass::convex, G, 0.0),
        split_(detail::cycle_split(n, omega)),
        seed_(seed) {}

  long interval_length() const { return split_.K1; }
  bool is_zero_loss(int i) const { return detail::in_zero_group(i, n(), split_.K); }

  Eigen::VectorXd gradient_vector(long t, int i) const {
    if (is_zero_loss(i)) return Eigen::VectorXd::Zero(d());
    std::uint64_t interval = static_cast<std::uint64_t>((t - 1) / split_.K1);
    rng::Stream s = rng::Stream::derive(seed_, "lb-convex", interval, static_cast<std::uint64_t>(i));
    double scale = G() / std::sqrt(static_cast<double>(d()));
    Eigen::VectorXd g(d());
    for (int c = 0; c < d(); ++c) g[c] = s.sign() * scale;
    return g;
  }

  double value(long t, int i, const Eigen::VectorXd& x) const override {
    check_query(t, i, x);
    return gradient_vector(t, i).dot(x);
  }
  Eigen::VectorXd grad(long t, int i, const Eigen::VectorXd& x) const override {
    check_query(t, i, x);
    return gradient_vector(t, i);
  }
  ComparatorHint comparator_hint() const override {
    Eigen::VectorXd total = Eigen::VectorXd::Zero(d());
    for (long t = 1; t <= T(); ++t)
      for (int i = 0; i < n(); ++i) total += gradient_vector(t, i);
    return {ComparatorHint::Form::linear, total};
  }
  std::function<double(const Eigen::VectorXd&)> global_loss(long t) const override {
    Eigen::VectorXd g_sum = Eigen::VectorXd::Zero(d());
    for (int i = 0; i < n(); ++i) g_sum += gradient_vector(t, i);
    return [g = std::move(g_sum)](const Eigen::VectorXd& x) { return g.dot(x); };
  }

 private:
  detail::CycleSplit split_;
  std::uint64_t seed_;
};

/// Strongly convex hard instance: the zero group sees (mu/2)||x||^2, the
/// carriers see (mu/2)||x - (D/sqrt(d)) w_i||^2 with w_i in {0_d, 1_d} drawn
/// Bernoulli(p) per interval.
class LowerBoundScStream : public LossStream {
 public:
  LowerBoundScStream(int n, int d, long T, double mu, double D, double omega, double p,
                     std::uint64_t seed)
      : LossStream(n, d, T, LossClass::strongly_convex, mu * D, mu),
        split_(detail::cycle_split(n, omega)),
        D_(D),
        p_(p),
        seed_(seed) {
    if (!(D > 0.0)) fail("invalid-parameter", "hard instance needs D > 0");
    if (!(p >= 0.25 && p <= 0.75)) fail("invalid-parameter", "p must lie in [1/4, 3/4]");
  }

  long interval_length() const { return split_.K1; }
  bool is_zero_group(int i) const { return detail::in_zero_group(i, n(), split_.K); }

  Eigen::VectorXd target(long t, int i) const {
    if (is_zero_group(i)) return Eigen::VectorXd::Zero(d());
    std::uint64_t interval = static_cast<std::uint64_t>((t - 1) / split_.K1);
    rng::Stream s = rng::Stream::derive(seed_, "lb-sc", interval, static_cast<std::uint64_t>(i));
    bool ones = s.uniform() < p_;
    double v = ones ? D_ / std::sqrt(static_cast<double>(d())) : 0.0;
    return Eigen::VectorXd::Constant(d(), v);
  }

  double value(long t, int i, const Eigen::VectorXd& x) const override {
    check_query(t, i, x);
    return 0.5 * mu() * (x - target(t, i)).squaredNorm();
  }
  Eigen::VectorXd grad(long t, int i, const Eigen::VectorXd& x) const override {
    check_query(t, i, x);
    return mu() * (x - target(t, i));
  }
  ComparatorHint comparator_hint() const override {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d());
    for (long t = 1; t <= T(); ++t)
      for (int i = 0; i < n(); ++i) mean += target(t, i);
    mean /= static_cast<double>(T() * n());
    return {ComparatorHint::Form::quadratic, mean};
  }
  std::function<double(const Eigen::VectorXd&)> global_loss(long t) const override {
    Eigen::VectorXd theta_sum = Eigen::VectorXd::Zero(d());
    double theta_sq = 0.0;
    for (int i = 0; i < n(); ++i) {
      Eigen::VectorXd th = target(t, i);
      theta_sum += th;
      theta_sq += th.squaredNorm();
    }
    return [m = mu(), cnt = n(), ts = std::move(theta_sum), tq = theta_sq](const Eigen::VectorXd& x) {
      return 0.5 * m * (cnt * x.squaredNorm() - 2.0 * ts.dot(x) + tq);
    };
  }

 private:
  detail::CycleSplit split_;
  double D_, p_;
  std::uint64_t seed_;
};

/// argmin over dom of sum_t sum_i f_{t,i}(x). Uses a closed form when the
/// stream advertises one, otherwise projected gradient descent with Armijo
/// backtracking down to a gradient-mapping residual of 1e-8.
inline Eigen::VectorXd best_fixed_comparator(const LossStream& stream, const Domain& dom) {
  if (dom.d != stream.d()) fail("invalid-size", "comparator domain dimension mismatch");
  ComparatorHint hint = stream.comparator_hint();
  if (hint.form == ComparatorHint::Form::linear) {
    const Eigen::VectorXd& g = hint.v;
    if (dom.variant == DomainVariant::box) {
      Eigen::VectorXd x(dom.d);
      for (int c = 0; c < dom.d; ++c)
        x[c] = g[c] > 0.0 ? -dom.half_width : (g[c] < 0.0 ? dom.half_width : 0.0);
      return x;
    }
    if (dom.variant == DomainVariant::ball) {
      double nrm = g.norm();
      if (nrm == 0.0) return Eigen::VectorXd::Zero(dom.d);
      return -(dom.radius / nrm) * g;
    }
    if (dom.variant == DomainVariant::shifted_box) {
      Eigen::VectorXd x(dom.d);
      for (int c = 0; c < dom.d; ++c) x[c] = g[c] > 0.0 ? dom.lo[c] : dom.hi[c];
      return x;
    }
  }
  if (hint.form == ComparatorHint::Form::quadratic) return project(dom, hint.v);

  // Fallback: minimize the per-query mean (same argmin as the sum).
  auto mean_value = [&](const Eigen::VectorXd& x) {
    double v = 0.0;
    for (long t = 1; t <= stream.T(); ++t)
      for (int i = 0; i < stream.n(); ++i) v += stream.value(t, i, x);
    return v / static_cast<double>(stream.T() * stream.n());
  };
  auto mean_grad = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(stream.d());
    for (long t = 1; t <= stream.T(); ++t)
      for (int i = 0; i < stream.n(); ++i) g += stream.grad(t, i, x);
    return (g / static_cast<double>(stream.T() * stream.n())).eval();
  };

  Eigen::VectorXd x = project(dom, Eigen::VectorXd::Zero(dom.d));
  double fx = mean_value(x);
  double step = 1.0;
  const long max_iter = 1000000;
  for (long iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXd g = mean_grad(x);
    Eigen::VectorXd x_try = project(dom, x - step * g);
    int backtracks = 0;
    double f_try = mean_value(x_try);
    while (f_try > fx - 1e-4 / step * (x_try - x).squaredNorm() && backtracks < 60) {
      step *= 0.5;
      x_try = project(dom, x - step * g);
      f_try = mean_value(x_try);
      ++backtracks;
    }
    double residual = (x - x_try).norm() / std::max(step, 1e-12);
    x = x_try;
    fx = f_try;
    if (residual <= 1e-8) return x;
    step = std::min(step * 2.0, 1e6);
  }
  fail("comparator-failure", "projected gradient descent did not converge");
}

struct GradientEstimate {
  Eigen::VectorXd ghat;
  std::vector<Eigen::VectorXd> queries;  // loss evaluation points, in order
  std::vector<double> values;            // the observed losses
};

namespace detail {
inline void check_exploration(const Domain& dom, double eps) {
  double r = dom.inner_radius();
  if (!(eps > 0.0) || eps > r) fail("invalid-exploration", "eps must lie in (0, r]");
}
}  // namespace detail

/// One-point estimator: ghat = (d/eps) f(center + eps u) u with u uniform on
/// the unit sphere. `dom` is the unshrunken domain; the caller keeps
/// center + eps u feasible by playing in the shrunken domain.
inline GradientEstimate one_point_estimate(const LossStream& stream, long t, int i,
                                           const Eigen::VectorXd& center, double eps,
                                           const Domain& dom, rng::Stream& rng) {
  detail::check_exploration(dom, eps);
  GradientEstimate est;
  Eigen::VectorXd u = rng.unit_sphere(stream.d());
  Eigen::VectorXd q = center + eps * u;
  double v = stream.value(t, i, q);
  est.ghat = (stream.d() / eps) * v * u;
  est.queries.push_back(std::move(q));
  est.values.push_back(v);
  return est;
}

/// Two-point estimator: ghat = (d / 2eps)(f(center + eps u) - f(center - eps u)) u,
/// with ||ghat|| <= d G on G-Lipschitz losses.
inline GradientEstimate two_point_estimate(const LossStream& stream, long t, int i,
                                           const Eigen::VectorXd& center, double eps,
                                           const Domain& dom, rng::Stream& rng) {
  detail::check_exploration(dom, eps);
  GradientEstimate est;
  Eigen::VectorXd u = rng.unit_sphere(stream.d());
  Eigen::VectorXd qp = center + eps * u;
  Eigen::VectorXd qm = center - eps * u;
  double vp = stream.value(t, i, qp);
  double vm = stream.value(t, i, qm);
  est.ghat = (stream.d() / (2.0 * eps)) * (vp - vm) * u;
  est.queries.push_back(std::move(qp));
  est.queries.push_back(std::move(qm));
  est.values.push_back(vp);
  est.values.push_back(vm);
  return est;
}

}  // namespace doco
