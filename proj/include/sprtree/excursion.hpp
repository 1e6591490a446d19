#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sprtree {

// Piecewise-linear excursion path: a finite list of breakpoints
// (t_0, v_0), ..., (t_k, v_k) with t_0 = 0, strictly increasing times,
// v_0 = v_k = 0 and v_i >= 0 in between, evaluated by linear interpolation.
// Canonical form merges collinear breakpoints and forbids flat segments.
//
// Values at interior breakpoints are strictly positive for every path the
// samplers or the excision produce; splices at a boundary time (insert with
// u in {0,1}, reinsertion of a subpath at an end of the host) legitimately
// touch zero in the interior, so the container admits v_i = 0.
class Excursion {
 public:
  Excursion() = default;
  Excursion(std::vector<double> times, std::vector<double> values);

  double zeta() const { return times_.back(); }
  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

  // linear interpolation; throws std::domain_error outside [0, zeta]
  double operator()(double t) const;

  double max_value() const;
  bool strictly_positive_inside() const;

  // index i with times[i] <= t <= times[i+1] (lower segment at breakpoints)
  std::size_t segment_index(double t) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

// Straddle interval of the path above level `a` around time `s`:
// s_lo = last time <= s with e = a, s_hi = first time >= s with e = a.
// Degenerate (s, s) when e(s) = a.
struct GammaPoint {
  double s = 0;
  double level = 0;
  double s_lo = 0;
  double s_hi = 0;
};

GammaPoint straddle(const Excursion& e, double s, double a);

// Splits e at gp into the subpath above the straddle (shifted to start at
// time 0 and level 0) and the remainder with the gap closed up.
// Rejects degenerate straddles and the whole-path straddle at level 0.
std::pair<Excursion, Excursion> excise(const Excursion& e, const GammaPoint& gp);

// Unit-length splice: rescale `piece` to length rho and `host` to length
// 1 - rho, then insert the piece at fraction u of the host, riding at the
// host's level there. Both inputs must have unit length.
Excursion insert(const Excursion& piece, const Excursion& host, double u, double rho);

// Time scaling by c with height scaling by sqrt(c).
Excursion rescale(const Excursion& e, double c);

// Pointwise height scaling (times unchanged).
Excursion scale_heights(const Excursion& e, double c);

// Left endpoints of the connected components of {e > a} that start at
// level a, sorted.
std::vector<double> level_starts(const Excursion& e, double a);

// Excise at gp and splice the raw subpath back into the remainder at time
// v, riding at the remainder's level there. Preserves total length.
Excursion path_spr(const Excursion& e, const GammaPoint& gp, double v);

bool approx_equal(const Excursion& a, const Excursion& b, double tol = 1e-12);

// CSV with header "t,value", one breakpoint per row, 17 significant digits.
std::string to_csv(const Excursion& e);
Excursion excursion_from_csv(std::istream& in);
Excursion excursion_from_csv_string(const std::string& s);

}  // namespace sprtree
