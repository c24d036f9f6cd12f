#pragma once

namespace qg {

/// Values at x of the solutions of -f'' = lambda f with
/// c(0) = 1, c'(0) = 0, s(0) = 0, s'(0) = 1.
struct FundamentalValues {
  double c = 1.0;
  double dc = 0.0;
  double s = 0.0;
  double ds = 1.0;
};

FundamentalValues fundamental_pair(double lambda, double x);

/// Value and derivative at a point, the derivative taken along the edge orientation.
struct TracePair {
  double f = 0.0;
  double df = 0.0;
};

struct MixedTracePair {
  double tau = 0.0;        // cos(a) f - sin(a) f'
  double tau_prime = 0.0;  // sin(a) f + cos(a) f'
  double alpha = 0.0;      // reduced to [0, pi)
};

/// Reduces an angle to [0, pi).
double reduce_angle(double alpha);

/// Applies the rotation by alpha. The stored alpha is reduced, the rotation is not.
MixedTracePair mixed_trace(double alpha, const TracePair& t);
TracePair mixed_trace_inverse(const MixedTracePair& m, double alpha);

enum class DerivativeSide {
  Along,     ///< f' along the edge orientation
  Outgoing,  ///< outward derivative at an endpoint: f'(0) at the tail, -f'(l) at the head
};

/// f = a c + b s at coordinate x in [0, length]. With Outgoing, x must be an endpoint.
/// Throws std::out_of_range when x lies outside the edge.
TracePair edge_eval(double a, double b, double lambda, double x, double length,
                    DerivativeSide side = DerivativeSide::Along);

/// Exact integrals over [0, l] of c^2, c s and s^2.
struct EdgeGram {
  double cc = 0.0;
  double cs = 0.0;
  double ss = 0.0;
};

EdgeGram edge_gram(double lambda, double length);

}  // namespace qg
