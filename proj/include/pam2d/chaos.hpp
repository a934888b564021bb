#pragma once

#include "pam2d/noise.hpp"
#include "pam2d/polymer.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pam2d {

enum class Variant { stratonovich, wick };

Variant variant_from_string(std::string_view name);
std::string to_string(Variant variant);

/// Initial datum u0: a constant or an arbitrary bounded function.
class InitialCondition {
 public:
  static InitialCondition constant(double value);
  static InitialCondition function(std::function<double(const Point&)> f);
  /// Periodic bilinear interpolation of a grid field.
  static InitialCondition grid(PeriodicField field);

  double operator()(const Point& x) const { return f_ ? f_(x) : value_; }
  bool is_constant() const { return !f_; }

 private:
  double value_ = 1.0;
  std::function<double(const Point&)> f_;
};

/// 2D heat kernel q_t(x) = exp(-|x|^2 / 2t) / (2 pi t).
inline double heat_kernel(double t, const Point& x) {
  return std::exp(-0.5 * x.squaredNorm() / t) / (2.0 * kPi * t);
}

/// Phi(y) = int_0^t phi_eps(x + B_s - y) ds by the midpoint rule.
double phi_functional(const BrownianPath& path, const Mollifier& mollifier, double eps, const Point& x,
                      const Point& y, double guard_ratio = kDefaultStepGuardRatio);

/// Phi at every column of ys.
Eigen::VectorXd phi_functional(const BrownianPath& path, const Mollifier& mollifier, double eps, const Point& x,
                               const PointSet& ys, double guard_ratio = kDefaultStepGuardRatio);

/// Order-n coefficients at evaluation tuples; points[j] is 2 x n.
struct ChaosCoefficient {
  Variant variant = Variant::stratonovich;
  int n = 0;
  double t = 0.0;
  double eps = 0.0;
  Point x = Point::Zero();
  double prefactor = 1.0;
  std::vector<PointSet> points;
  Eigen::VectorXd values;
  Eigen::VectorXd ses;
};

/// f_{eps,n}(y; t, x) = prefactor / n! * E[u0(x + B_t) e^gamma prod_k Phi(y_k)]
/// with prefactor exp(m_eps - C_eps t) from the ledger (whose eps is used for
/// Phi). The wick variant requires a unit-weight ensemble and uses prefactor 1.
ChaosCoefficient chaos_coeff_mc(int n, const Point& x, std::span<const PointSet> points,
                                const WeightedEnsemble& ensemble, const RenormLedger& ledger,
                                const Mollifier& mollifier, const InitialCondition& u0, Variant variant);

/// Closed-form Wick coefficient for the white-noise limit; nullopt when two of
/// x, y_1..y_n coincide (the time integral diverges logarithmically).
std::optional<double> wick_coeff_analytic(int n, double t, const Point& x, const PointSet& points,
                                          const InitialCondition& u0);

/// Per pair i of (A_i, B_i): w_A w_B u0 u0 and M_i = int int R_eps(B^A_s - B^B_u),
/// the sufficient statistics of the two-replica estimators.
struct ReplicaPairs {
  double prefactor = 1.0;
  double eps = 0.0;
  double t = 0.0;
  Eigen::VectorXd log_weight;  // log(w_A w_B)
  Eigen::VectorXd initial;     // u0(x + B^A_t) u0(x + B^B_t)
  Eigen::VectorXd overlap;     // M_i
};

/// Pairs the i-th paths of two independent ensembles (distinct master seeds).
ReplicaPairs replica_pairs(const WeightedEnsemble& a, const WeightedEnsemble& b, const RenormLedger& ledger,
                           const Mollifier& mollifier, const InitialCondition& u0, const Point& x, Variant variant);

/// n! ||f_{eps,n}||^2 = prefactor^2 / n! * E[w_A w_B u0 u0 M^n].
Estimate coeff_norm_estimate(int n, const ReplicaPairs& pairs);

struct TruncationReport {
  int max_order = 0;
  std::vector<Estimate> terms;         // n! ||f_n||^2, n = 0..N
  std::vector<Estimate> partial_sums;  // sum over n <= N, errors from the per-pair sums
  Estimate target;                     // E[u_eps(t, x)^2] by two-replica Feynman-Kac
  bool nondecreasing = true;
};

/// Partial sums of the chaos norms against exp(-2 C_eps t) E[u0 u0 exp(S_A + S_B + M)],
/// S the raw self-intersections at the ledger's eps, on the same pairs.
TruncationReport truncated_second_moment(int max_order, const WeightedEnsemble& a, const WeightedEnsemble& b,
                                         const RenormLedger& ledger, const Mollifier& mollifier,
                                         const InitialCondition& u0, const Point& x);

/// h = sum_c values[c] 1_{cell c}, cells of equal area; W(h) = sum h_c sqrt(area) Z_c.
struct CellFunction {
  double cell_area = 1.0;
  Eigen::VectorXd values;
  double norm() const { return std::sqrt(cell_area * values.squaredNorm()); }
};

struct IsometryReport {
  int n = 0;
  Estimate second_moment;  // E[H_n(W(h))^2]
  double target = 0.0;     // n!
  bool pass = false;
  std::vector<int> other_orders;
  std::vector<Estimate> cross_moments;  // E[H_n H_m] for m in other_orders
  bool orthogonal = true;
};

/// MC check of E[H_n(W(h))^2] = n! (within 4 SE) and E[H_n H_m] = 0 for
/// m in [0, max_other], m != n. Throws InvalidParameter unless |‖h‖ - 1| <= 1e-10.
IsometryReport hermite_isometry_check(int n, const CellFunction& h, Index samples, std::uint64_t seed,
                                      int max_other = 4);

/// CSV with header "variant,n,t,x1,x2,y1_1,y1_2,...,yK_1,yK_2,value,se" (K = max order, blanks pad).
void write_coefficients_csv(std::ostream& out, std::span<const ChaosCoefficient> rows);

}  // namespace pam2d
