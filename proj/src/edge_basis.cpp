#include "qg/edge_basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qg {

FundamentalValues fundamental_pair(double lambda, double x) {
  FundamentalValues v;
  if (std::abs(lambda) < 1e-9) {
    const double x2 = x * x;
    v.s = x * (1.0 - lambda * x2 / 6.0 + lambda * lambda * x2 * x2 / 120.0);
    v.c = 1.0 - lambda * x2 / 2.0 + lambda * lambda * x2 * x2 / 24.0;
    v.ds = v.c;
  } else if (lambda > 0.0) {
    const double k = std::sqrt(lambda);
    v.c = std::cos(k * x);
    v.s = std::sin(k * x) / k;
    v.ds = v.c;
  } else {
    const double k = std::sqrt(-lambda);
    v.c = std::cosh(k * x);
    v.s = std::sinh(k * x) / k;
    v.ds = v.c;
  }
  v.dc = -lambda * v.s;
  return v;
}

double reduce_angle(double alpha) {
  double r = std::fmod(alpha, std::numbers::pi);
  if (r < 0.0) r += std::numbers::pi;
  if (r >= std::numbers::pi) r = 0.0;
  return r;
}

MixedTracePair mixed_trace(double alpha, const TracePair& t) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  return {c * t.f - s * t.df, s * t.f + c * t.df, reduce_angle(alpha)};
}

TracePair mixed_trace_inverse(const MixedTracePair& m, double alpha) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  return {c * m.tau + s * m.tau_prime, -s * m.tau + c * m.tau_prime};
}

TracePair edge_eval(double a, double b, double lambda, double x, double length, DerivativeSide side) {
  if (x < 0.0 || x > length) throw std::out_of_range("edge_eval: coordinate outside the edge");
  const FundamentalValues v = fundamental_pair(lambda, x);
  TracePair t{a * v.c + b * v.s, a * v.dc + b * v.ds};
  if (side == DerivativeSide::Outgoing) {
    if (x == length && x != 0.0) {
      t.df = -t.df;
    } else if (x != 0.0) {
      throw std::out_of_range("edge_eval: outgoing derivative requested away from an endpoint");
    }
  }
  return t;
}

EdgeGram edge_gram(double lambda, double l) {
  EdgeGram g;
  const double l2 = l * l;
  if (std::abs(lambda) * l2 < 1e-4) {
    const double q = lambda;
    g.cc = l - q * l * l2 / 3.0 + q * q * l * l2 * l2 / 15.0;
    g.cs = l2 / 2.0 - q * l2 * l2 / 6.0 + q * q * l2 * l2 * l2 / 45.0;
    g.ss = l * l2 / 3.0 - q * l * l2 * l2 / 15.0 + 2.0 * q * q * l * l2 * l2 * l2 / 315.0;
    return g;
  }
  if (lambda > 0.0) {
    const double k = std::sqrt(lambda);
    const double s2 = std::sin(2.0 * k * l) / (4.0 * k);
    const double sn = std::sin(k * l);
    g.cc = l / 2.0 + s2;
    g.ss = (l / 2.0 - s2) / lambda;
    g.cs = sn * sn / (2.0 * lambda);
  } else {
    const double k = std::sqrt(-lambda);
    const double s2 = std::sinh(2.0 * k * l) / (4.0 * k);
    const double sn = std::sinh(k * l);
    g.cc = l / 2.0 + s2;
    g.ss = (s2 - l / 2.0) / (-lambda);
    g.cs = sn * sn / (2.0 * (-lambda));
  }
  return g;
}

}  // namespace qg
