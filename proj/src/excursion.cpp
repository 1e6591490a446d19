#include "sprtree/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace sprtree {

namespace {

constexpr double kMergeTol = 1e-12;

// Merge duplicate times and collinear middles; validate shape.
void canonicalize(std::vector<double>& t, std::vector<double>& v) {
  if (t.size() != v.size()) throw std::invalid_argument("excursion: times/values size mismatch");
  if (t.size() < 2) throw std::invalid_argument("excursion: needs at least two breakpoints");
  if (t.front() != 0.0) throw std::invalid_argument("excursion: first time must be 0");

  std::vector<double> rt, rv;
  rt.reserve(t.size());
  rv.reserve(v.size());
  rt.push_back(t[0]);
  rv.push_back(v[0]);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] < rt.back() - kMergeTol) throw std::invalid_argument("excursion: times not increasing");
    if (t[i] <= rt.back() + kMergeTol) {
      if (std::fabs(v[i] - rv.back()) > 1e-9)
        throw std::invalid_argument("excursion: coincident times with different values");
      continue;  // duplicate breakpoint from a splice junction
    }
    rt.push_back(t[i]);
    rv.push_back(v[i]);
  }
  // collinear merge: drop (t_i, v_i) lying on the chord of its neighbours
  std::vector<double> ct, cv;
  ct.push_back(rt[0]);
  cv.push_back(rv[0]);
  for (std::size_t i = 1; i + 1 < rt.size(); ++i) {
    double t0 = ct.back(), v0 = cv.back();
    double frac = (rt[i] - t0) / (rt[i + 1] - t0);
    double on_chord = v0 + frac * (rv[i + 1] - v0);
    if (std::fabs(rv[i] - on_chord) <= kMergeTol) continue;
    ct.push_back(rt[i]);
    cv.push_back(rv[i]);
  }
  ct.push_back(rt.back());
  cv.push_back(rv.back());
  t = std::move(ct);
  v = std::move(cv);

  if (t.size() < 2) throw std::invalid_argument("excursion: degenerate after canonicalization");
  if (v.front() != 0.0 || v.back() != 0.0)
    throw std::invalid_argument("excursion: endpoint values must be exactly 0");
  if (t.back() <= 0.0) throw std::invalid_argument("excursion: length must be positive");
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] < 0.0) throw std::invalid_argument("excursion: negative interior value");
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i] == v[i + 1]) throw std::invalid_argument("excursion: flat segment");
}

// exact crossing time of level a on the segment (t0,v0)-(t1,v1)
double crossing_time(double t0, double v0, double t1, double v1, double a) {
  return t0 + (a - v0) * (t1 - t0) / (v1 - v0);
}

}  // namespace

Excursion::Excursion(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  canonicalize(times_, values_);
}

double Excursion::operator()(double t) const {
  if (t < 0.0 || t > zeta()) throw std::domain_error("excursion eval: time outside [0, zeta]");
  std::size_t i = segment_index(t);
  double t0 = times_[i], t1 = times_[i + 1];
  return values_[i] + (t - t0) * (values_[i + 1] - values_[i]) / (t1 - t0);
}

std::size_t Excursion::segment_index(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - times_.begin());
  if (i == 0) return 0;
  if (i >= times_.size()) return times_.size() - 2;
  return i - 1;
}

double Excursion::max_value() const {
  double m = 0;
  for (double v : values_) m = std::max(m, v);
  return m;
}

bool Excursion::strictly_positive_inside() const {
  for (std::size_t i = 1; i + 1 < values_.size(); ++i)
    if (values_[i] <= 0.0) return false;
  return true;
}

GammaPoint straddle(const Excursion& e, double s, double a) {
  const auto& t = e.times();
  const auto& v = e.values();
  if (s <= 0.0 || s >= e.zeta()) throw std::domain_error("straddle: s outside (0, zeta)");
  double es = e(s);
  if (a < 0.0 || a > es) throw std::domain_error("straddle: level outside [0, e(s)]");

  GammaPoint gp;
  gp.s = s;
  gp.level = a;
  if (es == a) {  // degenerate straddle at the point itself
    gp.s_lo = gp.s_hi = s;
    return gp;
  }

  // e(s) > a here, so the path is above a on an open interval around s and
  // crosses a at a breakpoint or strictly inside a segment on either side.
  std::size_t seg = e.segment_index(s);
  {
    std::size_t j = seg;  // invariant: e > a on (left end considered, s]
    for (;;) {
      if (v[j] <= a) {
        gp.s_lo = (v[j] == a) ? t[j] : crossing_time(t[j], v[j], t[j + 1], v[j + 1], a);
        break;
      }
      --j;  // v[0] = 0 <= a terminates the walk
    }
  }
  {
    std::size_t j = seg;
    for (;;) {
      if (v[j + 1] <= a) {
        gp.s_hi = (v[j + 1] == a) ? t[j + 1] : crossing_time(t[j], v[j], t[j + 1], v[j + 1], a);
        break;
      }
      ++j;
    }
  }
  return gp;
}

std::pair<Excursion, Excursion> excise(const Excursion& e, const GammaPoint& gp) {
  if (gp.s_hi <= gp.s_lo) throw std::domain_error("excise: degenerate straddle, nothing above the point");
  if (gp.s_lo <= 0.0 && gp.s_hi >= e.zeta())
    throw std::domain_error("excise: whole-path straddle at level 0 leaves an empty remainder");

  const auto& t = e.times();
  const auto& v = e.values();
  const double a = gp.level;

  std::vector<double> ht{0.0}, hv{0.0};
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > gp.s_lo && t[i] < gp.s_hi) {
      ht.push_back(t[i] - gp.s_lo);
      hv.push_back(v[i] - a);
    }
  }
  ht.push_back(gp.s_hi - gp.s_lo);
  hv.push_back(0.0);
  Excursion hat(std::move(ht), std::move(hv));

  std::vector<double> ct, cv;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < gp.s_lo) {
      ct.push_back(t[i]);
      cv.push_back(v[i]);
    }
  }
  ct.push_back(gp.s_lo);
  cv.push_back(gp.s_lo == 0.0 ? 0.0 : a);
  double shift = gp.s_hi - gp.s_lo;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > gp.s_hi) {
      ct.push_back(t[i] - shift);
      cv.push_back(v[i]);
    }
  }
  if (cv.size() >= 2) cv.back() = 0.0;
  Excursion check(std::move(ct), std::move(cv));
  return {std::move(hat), std::move(check)};
}

namespace {

// splice `piece` into `host` at time x0, lifted to the host's level there
Excursion splice_at(const Excursion& host, const Excursion& piece, double x0) {
  const double base = host(x0);
  const double len = piece.zeta();
  std::vector<double> t, v;
  const auto& ht = host.times();
  const auto& hv = host.values();
  for (std::size_t i = 0; i < ht.size(); ++i) {
    if (ht[i] < x0) {
      t.push_back(ht[i]);
      v.push_back(hv[i]);
    }
  }
  t.push_back(x0);
  v.push_back(base);
  const auto& pt = piece.times();
  const auto& pv = piece.values();
  for (std::size_t i = 1; i + 1 < pt.size(); ++i) {
    t.push_back(x0 + pt[i]);
    v.push_back(base + pv[i]);
  }
  t.push_back(x0 + len);
  v.push_back(base);
  for (std::size_t i = 0; i < ht.size(); ++i) {
    if (ht[i] > x0) {
      t.push_back(ht[i] + len);
      v.push_back(hv[i]);
    }
  }
  return Excursion(std::move(t), std::move(v));
}

}  // namespace

Excursion insert(const Excursion& piece, const Excursion& host, double u, double rho) {
  if (std::fabs(piece.zeta() - 1.0) > 1e-9 || std::fabs(host.zeta() - 1.0) > 1e-9)
    throw std::domain_error("insert: both inputs must have unit length");
  if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("insert: rho outside (0, 1)");
  if (u < 0.0 || u > 1.0) throw std::domain_error("insert: u outside [0, 1]");
  Excursion p = rescale(piece, rho);
  Excursion h = rescale(host, 1.0 - rho);
  return splice_at(h, p, (1.0 - rho) * u);
}

Excursion rescale(const Excursion& e, double c) {
  if (!(c > 0.0)) throw std::domain_error("rescale: scale must be positive");
  std::vector<double> t(e.times()), v(e.values());
  double r = std::sqrt(c);
  for (auto& x : t) x *= c;
  for (auto& y : v) y *= r;
  v.front() = 0.0;
  v.back() = 0.0;
  return Excursion(std::move(t), std::move(v));
}

Excursion scale_heights(const Excursion& e, double c) {
  if (!(c > 0.0)) throw std::domain_error("scale_heights: scale must be positive");
  std::vector<double> t(e.times()), v(e.values());
  for (auto& y : v) y *= c;
  return Excursion(std::move(t), std::move(v));
}

std::vector<double> level_starts(const Excursion& e, double a) {
  if (a < 0.0) throw std::domain_error("level_starts: negative level");
  const auto& t = e.times();
  const auto& v = e.values();
  std::vector<double> out;
  bool inside = false;
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    if (!inside) {
      if (v[j] == a && v[j + 1] > a) {
        out.push_back(t[j]);
        inside = true;
      } else if (v[j] < a && v[j + 1] > a) {
        out.push_back(crossing_time(t[j], v[j], t[j + 1], v[j + 1], a));
        inside = true;
      }
    }
    if (inside && v[j + 1] <= a) inside = false;
  }
  return out;
}

Excursion path_spr(const Excursion& e, const GammaPoint& gp, double v) {
  auto [hat, check] = excise(e, gp);
  if (v < 0.0 || v > check.zeta()) throw std::domain_error("path_spr: insertion time outside remainder");
  return splice_at(check, hat, v);
}

bool approx_equal(const Excursion& a, const Excursion& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::fabs(a.times()[i] - b.times()[i]) > tol) return false;
    if (std::fabs(a.values()[i] - b.values()[i]) > tol) return false;
  }
  return true;
}

std::string to_csv(const Excursion& e) {
  std::string out = "t,value\n";
  char buf[80];
  for (std::size_t i = 0; i < e.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", e.times()[i], e.values()[i]);
    out += buf;
  }
  return out;
}

Excursion excursion_from_csv(std::istream& in) {
  std::string line;
  std::vector<double> t, v;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("t,", 0) == 0) continue;  // header row
    }
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("excursion csv: malformed row: " + line);
    t.push_back(std::stod(line.substr(0, comma)));
    v.push_back(std::stod(line.substr(comma + 1)));
  }
  return Excursion(std::move(t), std::move(v));
}

Excursion excursion_from_csv_string(const std::string& s) {
  std::istringstream in(s);
  return excursion_from_csv(in);
}

}  // namespace sprtree
