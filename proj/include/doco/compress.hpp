#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "doco/error.hpp"
#include "doco/rng.hpp"

namespace doco {

enum class CompressorVariant { identity, rand_k, top_k, randomized_gossip, rescaled_unbiased };

/// Tagged description of a contractive compression operator together with the
/// parameters that determine its contraction factor omega and byte cost.
struct CompressorKind {
  CompressorVariant variant = CompressorVariant::identity;
  int k = 0;         // rand_k / top_k
  double p = 1.0;    // randomized_gossip
  double tau = 1.0;  // rescaled_unbiased, tau >= 1

  static CompressorKind identity() { return {CompressorVariant::identity}; }
  static CompressorKind rand_k(int k) {
    if (k < 1) fail("invalid-compressor", "rand_k needs k >= 1");
    return {CompressorVariant::rand_k, k};
  }
  static CompressorKind top_k(int k) {
    if (k < 1) fail("invalid-compressor", "top_k needs k >= 1");
    return {CompressorVariant::top_k, k};
  }
  static CompressorKind randomized_gossip(double p) {
    if (!(p > 0.0 && p <= 1.0)) fail("invalid-compressor", "randomized_gossip needs p in (0,1]");
    CompressorKind c{CompressorVariant::randomized_gossip};
    c.p = p;
    return c;
  }
  static CompressorKind rescaled_unbiased(double tau) {
    if (!(tau >= 1.0)) fail("invalid-compressor", "rescaled_unbiased needs tau >= 1");
    CompressorKind c{CompressorVariant::rescaled_unbiased};
    c.tau = tau;
    return c;
  }

  std::string name() const {
    switch (variant) {
      case CompressorVariant::identity: return "identity";
      case CompressorVariant::rand_k: return "rand_k(" + std::to_string(k) + ")";
      case CompressorVariant::top_k: return "top_k(" + std::to_string(k) + ")";
      case CompressorVariant::randomized_gossip: return "randomized_gossip(" + std::to_string(p) + ")";
      case CompressorVariant::rescaled_unbiased: return "rescaled_unbiased(" + std::to_string(tau) + ")";
    }
    return "?";
  }
};

/// Contraction factor omega in (0, 1]; E||C(x) - x||^2 <= (1 - omega) ||x||^2.
inline double omega_of(const CompressorKind& kind, int d) {
  switch (kind.variant) {
    case CompressorVariant::identity:
      return 1.0;
    case CompressorVariant::rand_k:
    case CompressorVariant::top_k:
      if (kind.k > d) fail("invalid-compressor", "k exceeds dimension");
      return static_cast<double>(kind.k) / d;
    case CompressorVariant::randomized_gossip:
      return kind.p;
    case CompressorVariant::rescaled_unbiased:
      return 1.0 / kind.tau;
  }
  fail("invalid-compressor", "unknown variant");
}

/// Byte cost of one transmitted message: 8-byte values, 4-byte coordinate
/// indices, no framing. For randomized_gossip this is the sent-branch cost
/// (8d + 1); a miss costs 1 byte and the realized cost lives on the payload.
inline std::uint64_t payload_bytes(const CompressorKind& kind, int d) {
  switch (kind.variant) {
    case CompressorVariant::identity:
      return 8ull * d;
    case CompressorVariant::rand_k:
    case CompressorVariant::top_k:
      return static_cast<std::uint64_t>(kind.k) * (8 + 4);
    case CompressorVariant::randomized_gossip:
      return 8ull * d + 1;
    case CompressorVariant::rescaled_unbiased:
      return static_cast<std::uint64_t>(std::ceil(8.0 * d / kind.tau));
  }
  fail("invalid-compressor", "unknown variant");
}

/// Expected per-message byte charge (differs from payload_bytes only for
/// randomized_gossip, whose realized cost depends on the hit/miss draw).
inline double expected_payload_bytes(const CompressorKind& kind, int d) {
  if (kind.variant == CompressorVariant::randomized_gossip)
    return kind.p * (8.0 * d) + 1.0;
  return static_cast<double>(payload_bytes(kind, d));
}

struct CompressedPayload {
  Eigen::VectorXd dense_equiv;  // the value C(x) the algorithm uses
  std::uint64_t wire_bytes = 0;  // realized cost charged to the ledger
};

inline CompressedPayload compress(const CompressorKind& kind, const Eigen::VectorXd& x,
                                  rng::Stream& rng) {
  const int d = static_cast<int>(x.size());
  CompressedPayload out;
  switch (kind.variant) {
    case CompressorVariant::identity:
      out.dense_equiv = x;
      out.wire_bytes = payload_bytes(kind, d);
      return out;
    case CompressorVariant::rand_k: {
      if (kind.k > d) fail("invalid-compressor", "k exceeds dimension");
      // Fisher-Yates prefix: k indices without replacement.
      std::vector<int> idx(d);
      std::iota(idx.begin(), idx.end(), 0);
      out.dense_equiv = Eigen::VectorXd::Zero(d);
      for (int i = 0; i < kind.k; ++i) {
        int j = i + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(d - i)));
        std::swap(idx[i], idx[j]);
        out.dense_equiv[idx[i]] = x[idx[i]];
      }
      out.wire_bytes = payload_bytes(kind, d);
      return out;
    }
    case CompressorVariant::top_k: {
      if (kind.k > d) fail("invalid-compressor", "k exceeds dimension");
      // Deterministic; ties broken toward the lowest coordinate index.
      std::vector<int> idx(d);
      std::iota(idx.begin(), idx.end(), 0);
      std::partial_sort(idx.begin(), idx.begin() + kind.k, idx.end(), [&x](int a, int b) {
        double ma = std::abs(x[a]), mb = std::abs(x[b]);
        if (ma != mb) return ma > mb;
        return a < b;
      });
      out.dense_equiv = Eigen::VectorXd::Zero(d);
      for (int i = 0; i < kind.k; ++i) out.dense_equiv[idx[i]] = x[idx[i]];
      out.wire_bytes = payload_bytes(kind, d);
      return out;
    }
    case CompressorVariant::randomized_gossip: {
      bool sent = rng.uniform() < kind.p;
      if (sent) {
        out.dense_equiv = x;
        out.wire_bytes = 8ull * d + 1;
      } else {
        out.dense_equiv = Eigen::VectorXd::Zero(d);
        out.wire_bytes = 1;  // one byte for the miss signal
      }
      return out;
    }
    case CompressorVariant::rescaled_unbiased: {
      // Stochastic sign quantization scaled by 1/tau: unbiased before the
      // rescale, with E||Q(x)||^2 <= sqrt(d) ||x||^2 for the canonical
      // tau = sqrt(d) choice.
      double nrm = x.norm();
      out.dense_equiv = Eigen::VectorXd::Zero(d);
      if (nrm > 0.0) {
        for (int i = 0; i < d; ++i) {
          double prob = std::abs(x[i]) / nrm;
          double draw = rng.uniform();
          if (draw < prob)
            out.dense_equiv[i] = (x[i] >= 0.0 ? nrm : -nrm) / kind.tau;
        }
      }
      out.wire_bytes = payload_bytes(kind, d);
      return out;
    }
  }
  fail("invalid-compressor", "unknown variant");
}

struct RepeatedResult {
  Eigen::VectorXd total;                  // c_L = sum of deltas
  std::vector<CompressedPayload> deltas;  // each is a separately charged message
};

/// L-fold residual compression: c_0 = 0, delta_i = C(x - c_{i-1}),
/// c_i = c_{i-1} + delta_i. Error contracts as (1 - omega)^L.
inline RepeatedResult repeated_compress(const CompressorKind& kind, const Eigen::VectorXd& x,
                                        long L, rng::Stream& rng) {
  if (L < 1) fail("invalid-rounds", "repeated compressor needs L >= 1");
  RepeatedResult res;
  res.total = Eigen::VectorXd::Zero(x.size());
  res.deltas.reserve(static_cast<std::size_t>(L));
  for (long i = 0; i < L; ++i) {
    CompressedPayload delta = compress(kind, x - res.total, rng);
    res.total += delta.dense_equiv;
    res.deltas.push_back(std::move(delta));
  }
  return res;
}

}  // namespace doco
