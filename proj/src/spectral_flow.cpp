#include "qg/spectral_flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "qg/errors.hpp"
#include "qg/robin_map.hpp"
#include "qg/solver.hpp"

namespace qg {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

ParameterInterval ParameterInterval::full_loop() {
  ParameterInterval I;
  I.a = ExtendedReal::infinity();
  I.b = ExtendedReal::infinity();
  I.loop = true;
  return I;
}

ParameterInterval ParameterInterval::path(const ExtendedReal& a, const ExtendedReal& b, bool reversed) {
  ParameterInterval I;
  I.a = a;
  I.b = b;
  I.reversed = reversed;
  return I;
}

ParameterInterval ParameterInterval::zero_to_inf() { return path(0.0, ExtendedReal::infinity()); }

ParameterInterval ParameterInterval::inf_to_zero() { return path(ExtendedReal::infinity(), 0.0); }

std::pair<double, double> ParameterInterval::angles() const {
  if (loop) return {-kPi, kPi};
  const double ta = a.angle();
  double tb = b.angle();
  if (tb <= ta) tb += 2.0 * kPi;
  return {ta, tb};
}

SFResult sf_via_robin(const MetricGraph& g, const std::vector<int>& B, double alpha, double mu,
                      const ParameterInterval& I) {
  SFResult r;
  r.mu = mu;
  r.method = "robin-map";
  const RobinMap map = robin_matrix(g, B, alpha, mu);
  if (map.matrix.rows() == 0) return r;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(map.matrix, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& kappa = es.eigenvalues();
  const double tau = 1e-8 * kappa.cwiseAbs().maxCoeff();
  const auto [theta0, theta1] = I.angles();
  const int sign = I.reversed ? -1 : 1;
  for (int i = 0; i < kappa.size(); ++i) {
    const double t = std::abs(kappa(i)) <= tau ? 0.0 : -kappa(i);
    double theta = 2.0 * std::atan(t);
    while (theta <= theta0) theta += 2.0 * kPi;
    while (theta > theta0 + 2.0 * kPi) theta -= 2.0 * kPi;
    if (theta <= theta1) {
      r.sf += sign;
      r.crossings.push_back({theta, ExtendedReal(t), sign});
    }
  }
  return r;
}

ProblemFamily delta_family(const MetricGraph& g, std::vector<int> B, double alpha) {
  return [g, B = std::move(B), alpha](double theta) {
    return delta_family_member(g, B, alpha, ExtendedReal::from_angle(theta));
  };
}

namespace {

struct Sample {
  double theta = 0.0;
  int base = 0;               // eigenvalues below the window
  std::vector<double> values;  // window eigenvalues with multiplicity, index base + 1 + i
  bool shaky = false;          // an unresolved cluster lies near the level
};

class Tracker {
 public:
  Tracker(const ProblemFamily& family, double mu, const TrackingOptions& opts)
      : family_(family), mu_(mu), opts_(opts), tol_(1e-7 * std::max(1.0, std::abs(mu))) {}

  SFResult run(double theta0, double theta1) {
    result_.mu = mu_;
    result_.method = "tracking";
    const double span = theta1 - theta0;
    const int cells = std::max(8, static_cast<int>(std::ceil(opts_.initial_cells * span / (2.0 * kPi))));
    // Singular angles get a cell of width min_cell; all other cells carry no shift.
    const double h = 0.5 * opts_.min_cell;
    std::vector<double> knots = {theta0, theta1};
    for (double x : opts_.singular) {
      if (x - h > theta0 && x - h < theta1) knots.push_back(x - h);
      if (x + h > theta0 && x + h < theta1) knots.push_back(x + h);
    }
    std::sort(knots.begin(), knots.end());
    Sample prev = sample(theta0);
    for (std::size_t k = 1; k < knots.size(); ++k) {
      const double a = knots[k - 1];
      const double b = knots[k];
      const int pieces = b - a <= opts_.min_cell ? 1 : std::max(1, static_cast<int>(std::ceil(cells * (b - a) / span)));
      for (int i = 1; i <= pieces; ++i) {
        Sample next = i == pieces ? sample(b) : split(a + (b - a) * (i - 0.5) / pieces, a + (b - a) * (i + 0.5) / pieces);
        process(prev, next);
        prev = std::move(next);
      }
    }
    return result_;
  }

 private:
  Sample sample(double theta) {
    if (++result_.samples > opts_.max_samples) throw SolverError("tracking sample cap reached");
    const BoundaryProblem p = family_(theta);
    const double d = opts_.window;
    SolverOptions so;
    so.resolution = 0.5 * d;
    so.root_tol = opts_.root_tol;
    for (int j = 0; j < 16; ++j) {
      try {
        const EigenvalueList list = eigenvalues_in(p, mu_ - d * (1.0 + 0.031 * j), mu_ + d * (1.071 + 0.017 * j), so);
        Sample s{theta, list.below, list.expanded()};
        s.shaky = std::any_of(list.values.begin(), list.values.end(), [&](const Eigenvalue& e) {
          return e.unresolved && std::abs(e.lambda - mu_) <= 0.5 * d;
        });
        return s;
      } catch (const WindowGuardError&) {
      }
    }
    throw SolverError("no tracking window at theta = " + std::to_string(theta));
  }

  // Interior sample of (a, b); near-degenerate clusters at the level are
  // avoided where possible since their members are not separated.
  Sample split(double a, double b) {
    Sample s;
    for (double frac : {0.5, 0.381966, 0.618034, 0.25, 0.75}) {
      s = sample(a + frac * (b - a));
      if (!s.shaky) break;
    }
    return s;
  }

  static int below(const Sample& s, double level) {
    return s.base + static_cast<int>(std::count_if(s.values.begin(), s.values.end(),
                                                   [&](double x) { return x < level; }));
  }

  // Index of the partner of a[i] in b under the index shift, or -1.
  static int partner(const Sample& a, int i, const Sample& b, int shift) {
    const int j = a.base + i + shift - b.base;
    return j >= 0 && j < static_cast<int>(b.values.size()) ? j : -1;
  }

  // Largest displacement over index pairs present in both lists, or infinity
  // when an eigenvalue of the inner window has no partner.
  double displacement(const Sample& s0, const Sample& s1, int shift) const {
    double worst = 0.0;
    for (int i = 0; i < static_cast<int>(s0.values.size()); ++i) {
      const int j = partner(s0, i, s1, shift);
      if (j >= 0) {
        worst = std::max(worst, std::abs(s1.values[j] - s0.values[i]));
      } else if (std::abs(s0.values[i] - mu_) <= 0.5 * opts_.window) {
        return std::numeric_limits<double>::infinity();
      }
    }
    for (int j = 0; j < static_cast<int>(s1.values.size()); ++j) {
      if (std::abs(s1.values[j] - mu_) <= 0.5 * opts_.window && partner(s1, j, s0, -shift) < 0) {
        return std::numeric_limits<double>::infinity();
      }
    }
    return worst;
  }

  bool match(const Sample& s0, const Sample& s1, int shift) const {
    if (!(displacement(s0, s1, shift) <= 0.25 * opts_.window)) return false;
    const double inner = 0.5 * opts_.window;
    for (double level : {mu_ - inner, mu_ - tol_, mu_ + inner}) {
      int moved = 0;
      for (int i = 0; i < static_cast<int>(s0.values.size()); ++i) {
        const int j = partner(s0, i, s1, shift);
        if (j < 0) continue;
        moved += static_cast<int>(s1.values[j] < level) - static_cast<int>(s0.values[i] < level);
      }
      if (below(s1, level) - below(s0, level) != shift + moved) return false;
    }
    return true;
  }

  // Up-crossings minus down-crossings of mu among matched pairs.
  int crossings(const Sample& s0, const Sample& s1, int shift) const {
    const double level = mu_ - tol_;
    return shift - (below(s1, level) - below(s0, level));
  }

  bool has_crossing(const Sample& s0, const Sample& s1, int shift) const {
    const double level = mu_ - tol_;
    for (int i = 0; i < static_cast<int>(s0.values.size()); ++i) {
      const int j = partner(s0, i, s1, shift);
      if (j >= 0 && (s0.values[i] < level) != (s1.values[j] < level)) return true;
    }
    return false;
  }

  void accept(const Sample& s0, const Sample& s1, int shift) {
    const int c = crossings(s0, s1, shift);
    result_.sf += c;
    result_.wraps += shift;
    if (c != 0) {
      const double theta = 0.5 * (s0.theta + s1.theta);
      const int sign = c > 0 ? 1 : -1;
      for (int k = 0; k < std::abs(c); ++k) result_.crossings.push_back({theta, ExtendedReal::from_angle(theta), sign});
    }
  }

  bool contains_singular(const Sample& s0, const Sample& s1) const {
    if (opts_.singular.empty()) return true;
    return std::any_of(opts_.singular.begin(), opts_.singular.end(),
                       [&](double x) { return x >= s0.theta - 1e-14 && x <= s1.theta + 1e-14; });
  }

  void process(const Sample& s0, const Sample& s1) {
    const double width = s1.theta - s0.theta;
    if (!contains_singular(s0, s1)) {
      if (width <= opts_.locate || below(s0, mu_ - tol_) == below(s1, mu_ - tol_)) {
        accept(s0, s1, 0);
        return;
      }
    } else if (!opts_.singular.empty() && width > 1.5 * opts_.min_cell) {
      // A shift and a crossing in one coarse cell can cancel in the counts.
    } else if (match(s0, s1, 0)) {
      if (width <= opts_.locate || !has_crossing(s0, s1, 0)) {
        accept(s0, s1, 0);
        return;
      }
    } else if (width <= 1.5 * opts_.min_cell) {
      int best = 0;
      double best_disp = std::numeric_limits<double>::infinity();
      for (int k = 1; k <= 2 * opts_.max_shift; ++k) {
        const int shift = k % 2 == 1 ? (k + 1) / 2 : -k / 2;
        if (!match(s0, s1, shift)) continue;
        const double d = displacement(s0, s1, shift);
        if (d < best_disp) {
          best = shift;
          best_disp = d;
        }
      }
      if (best != 0) {
        accept(s0, s1, best);
        return;
      }
      throw SolverError("unresolved curve matching near theta = " + std::to_string(s0.theta));
    }
    const Sample mid = split(s0.theta, s1.theta);
    process(s0, mid);
    process(mid, s1);
  }

  const ProblemFamily& family_;
  double mu_;
  TrackingOptions opts_;
  double tol_;
  SFResult result_;
};

}  // namespace

SFResult sf_via_tracking(const ProblemFamily& family, double theta0, double theta1, double mu,
                         const TrackingOptions& opts) {
  if (!(theta1 > theta0)) throw std::invalid_argument("tracking needs theta1 > theta0");
  return Tracker(family, mu, opts).run(theta0, theta1);
}

std::vector<double> wrap_angles(double theta0, double theta1, bool with_zero) {
  std::vector<double> out;
  const double step = with_zero ? kPi : 2.0 * kPi;
  const double phase = with_zero ? 0.0 : kPi;
  for (double k = std::ceil((theta0 - phase) / step - 1e-12); phase + k * step <= theta1 + 1e-12; k += 1.0) {
    out.push_back(phase + k * step);
  }
  return out;
}

SFResult sf_via_tracking(const MetricGraph& g, const std::vector<int>& B, double alpha, double mu,
                         const ParameterInterval& I, const TrackingOptions& opts) {
  const auto [theta0, theta1] = I.angles();
  TrackingOptions o = opts;
  if (o.singular.empty()) o.singular = wrap_angles(theta0, theta1, std::abs(std::sin(alpha)) > 1e-12);
  SFResult r = sf_via_tracking(delta_family(g, B, alpha), theta0, theta1, mu, o);
  if (I.reversed) {
    r.sf = -r.sf;
    for (Crossing& c : r.crossings) c.sign = -c.sign;
  }
  return r;
}

std::string CurveTable::csv() const {
  std::string out = "t,branch,lambda\n";
  char buf[96];
  for (const CurvePoint& p : rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%d,%.12g\n", p.t, p.branch, p.lambda);
    out += buf;
  }
  return out;
}

CurveTable curve_samples(const MetricGraph& g, const std::vector<int>& B, double alpha, const std::vector<double>& ts,
                         double lo, double hi) {
  CurveTable table;
  std::vector<Sample> samples;
  for (double t : ts) {
    const BoundaryProblem p = delta_family_member(g, B, alpha, t);
    EigenvalueList list;
    bool ok = false;
    for (int j = 0; j < 16 && !ok; ++j) {
      const double d = 1e-6 * j * std::max(1.0, hi - lo);
      try {
        list = eigenvalues_in(p, lo - d, hi + d);
        ok = true;
      } catch (const WindowGuardError&) {
      }
    }
    if (!ok) throw SolverError("no window for curve samples at t = " + std::to_string(t));
    samples.push_back({t, list.below, list.expanded()});
  }
  // Branch ids are absolute indices minus the branches that entered from -infinity.
  int offset = 0;
  std::vector<std::pair<int, double>> last;  // branch id -> last value
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Sample& s = samples[k];
    if (k > 0) {
      const Sample& prev = samples[k - 1];
      double best = std::numeric_limits<double>::infinity();
      int best_shift = 0;
      for (int shift : {0, 1, -1, 2, -2, 3, -3}) {
        double cost = 0.0;
        int overlap = 0;
        for (int i = 0; i < static_cast<int>(prev.values.size()); ++i) {
          const int j = prev.base + i + shift - s.base;
          if (j < 0 || j >= static_cast<int>(s.values.size())) continue;
          cost += std::abs(s.values[j] - prev.values[i]);
          ++overlap;
        }
        if (overlap == 0) continue;
        cost /= overlap;
        if (cost < best - 1e-12) {
          best = cost;
          best_shift = shift;
        }
      }
      offset += best_shift;
    }
    for (int i = 0; i < static_cast<int>(s.values.size()); ++i) {
      const int branch = s.base + 1 + i - offset;
      table.rows.push_back({s.theta, branch, s.values[i]});
    }
  }
  std::map<int, double> prev_value;
  for (const CurvePoint& p : table.rows) {
    const auto it = prev_value.find(p.branch);
    if (it != prev_value.end() && p.lambda < it->second - 1e-6 * std::max(1.0, std::abs(p.lambda))) {
      if (std::find(table.non_monotone.begin(), table.non_monotone.end(), p.branch) == table.non_monotone.end()) {
        table.non_monotone.push_back(p.branch);
      }
    }
    prev_value[p.branch] = p.lambda;
  }
  return table;
}

Eigen::MatrixXcd global_unitary(const BoundaryProblem& p) {
  const int n = p.size();
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(n, n);
  int offset = 0;
  for (const LocalCondition& lc : p.local) {
    const Eigen::MatrixXcd Uv = vertex_unitary(lc);
    U.block(offset, offset, Uv.rows(), Uv.cols()) = Uv;
    offset += static_cast<int>(Uv.rows());
  }
  return U;
}

WindingResult winding_number(const UnitaryLoop& loop) {
  constexpr int kInitial = 64;
  constexpr int kCap = 1 << 20;
  WindingResult r;
  const auto phase = [&](double theta) {
    ++r.samples;
    return std::arg(loop.U(theta).determinant());
  };
  const auto wrapped = [](double d) { return std::remainder(d, 2.0 * kPi); };
  double total = 0.0;
  double th0 = loop.theta0;
  double ph0 = phase(th0);
  const double h = (loop.theta1 - loop.theta0) / kInitial;
  for (int i = 1; i <= kInitial; ++i) {
    const double th1 = i == kInitial ? loop.theta1 : loop.theta0 + h * i;
    const double ph1 = phase(th1);
    // Refine the step until every phase increment is below pi / 2.
    std::vector<std::pair<double, double>> stack = {{th1, ph1}};
    double a = th0;
    double pa = ph0;
    while (!stack.empty()) {
      const auto [b, pb] = stack.back();
      const double d = wrapped(pb - pa);
      if (std::abs(d) < 0.5 * kPi) {
        total += d;
        a = b;
        pa = pb;
        stack.pop_back();
        continue;
      }
      if (r.samples > kCap || b - a < 1e-14) throw SolverError("winding refinement cap reached");
      const double m = 0.5 * (a + b);
      stack.push_back({m, phase(m)});
    }
    th0 = th1;
    ph0 = ph1;
  }
  const double turns = total / (2.0 * kPi);
  r.wind = static_cast<int>(std::lround(turns));
  r.residue = std::abs(turns - r.wind);
  if (r.residue > 1e-6) throw SolverError("winding residue " + std::to_string(r.residue) + " exceeds 1e-6");
  return r;
}

SfWindResult sf_wind_check(const ProblemFamily& family, double theta0, double theta1, double mu,
                           const TrackingOptions& opts) {
  SfWindResult r;
  r.sf = sf_via_tracking(family, theta0, theta1, mu, opts);
  UnitaryLoop loop{[&](double theta) { return global_unitary(family(theta)); }, theta0, theta1};
  r.wind = winding_number(loop).wind;
  return r;
}

ProblemFamily single_edge_loop(double length) {
  const MetricGraph g({"a", "b"}, {{0, 1, length}});
  return [g](double theta) {
    Eigen::MatrixXcd U(1, 1);
    U(0, 0) = std::polar(1.0, theta);
    return BoundaryProblem(g, {UnitaryGeneral{U}, NeumannKirchhoff{}});
  };
}

SFResult sf_composite(const MetricGraph& g, const RobinPointSet& nodal, const RobinPointSet& robin, double alpha,
                      double level, bool i_plus, bool iprime_plus) {
  const PlacedPoints p0 = place_points(g, nodal.points);
  const PlacedPoints pa = place_points(g, robin.points);
  // H_0^f(I) => H runs from I to 0; H => H_alpha^f(I') runs from 0 to I'.
  const ParameterInterval leg0 =
      i_plus ? ParameterInterval::path(0.0, ExtendedReal::infinity(), true) : ParameterInterval::inf_to_zero();
  const ParameterInterval leg1 =
      iprime_plus ? ParameterInterval::zero_to_inf() : ParameterInterval::path(ExtendedReal::infinity(), 0.0, true);
  SFResult a = sf_via_robin(p0.sub.graph, p0.B, 0.0, level, leg0);
  const SFResult b = sf_via_robin(pa.sub.graph, pa.B, alpha, level, leg1);
  a.sf += b.sf;
  a.crossings.insert(a.crossings.end(), b.crossings.begin(), b.crossings.end());
  return a;
}

}  // namespace qg
