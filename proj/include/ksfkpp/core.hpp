// Shared data model: parameters, uniform grids, sampled fields and
// elementary calculus on them.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ksfkpp {

/// Physical parameters of the chemotaxis system: sensitivity chi and
/// signal length-scale parameter d.
struct Params {
  double chi = 0.0;
  double d = 1.0;

  void validate() const {
    if (!std::isfinite(chi)) throw std::invalid_argument("Params: chi must be finite");
    if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("Params: d must be finite and > 0");
  }
};

/// Uniform mesh on [x_min, x_max] with n nodes.  Node i is x_min + i*dx,
/// computed by multiplication so there is no accumulated drift.
class Grid1D {
 public:
  Grid1D() = default;

  static Grid1D make(double x_min, double x_max, std::size_t n) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max))
      throw std::invalid_argument("Grid1D: bounds must be finite");
    if (!(x_min < x_max)) throw std::invalid_argument("Grid1D: x_min must be < x_max");
    if (n < 3) throw std::invalid_argument("Grid1D: need at least 3 nodes");
    Grid1D g;
    g.x_min_ = x_min;
    g.x_max_ = x_max;
    g.n_ = n;
    g.dx_ = (x_max - x_min) / static_cast<double>(n - 1);
    return g;
  }

  /// Grid with spacing dx starting at x_min; the node count is rounded so
  /// that the last node lands on x_max.
  static Grid1D with_spacing(double x_min, double x_max, double dx) {
    if (!(dx > 0.0)) throw std::invalid_argument("Grid1D: dx must be > 0");
    const double cells = (x_max - x_min) / dx;
    const auto n = static_cast<std::size_t>(std::llround(cells)) + 1;
    if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells))
      throw std::invalid_argument("Grid1D: (x_max - x_min) is not a multiple of dx");
    return make(x_min, x_max, n);
  }

  [[nodiscard]] double x_min() const { return x_min_; }
  [[nodiscard]] double x_max() const { return x_max_; }
  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] double dx() const { return dx_; }
  [[nodiscard]] double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx_; }

  [[nodiscard]] std::vector<double> nodes() const {
    std::vector<double> xs(n_);
    for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
    return xs;
  }

  /// Index of the node closest to x (clamped to the grid).
  [[nodiscard]] std::size_t nearest(double x) const {
    const double s = std::round((x - x_min_) / dx_);
    if (s <= 0.0) return 0;
    if (s >= static_cast<double>(n_ - 1)) return n_ - 1;
    return static_cast<std::size_t>(s);
  }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double x_min_ = 0.0;
  double x_max_ = 1.0;
  std::size_t n_ = 0;
  double dx_ = 0.0;
};

inline Grid1D grid_make(double x_min, double x_max, std::size_t n) {
  return Grid1D::make(x_min, x_max, n);
}

/// A real function sampled on the nodes of a grid.
struct Field {
  Grid1D grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid1D& g, double fill = 0.0) : grid(g), values(g.n(), fill) {}
  Field(const Grid1D& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n()) throw std::invalid_argument("Field: value count does not match grid");
  }

  template <class F>
  static Field sample(const Grid1D& g, F&& f) {
    Field out(g);
    for (std::size_t i = 0; i < g.n(); ++i) out.values[i] = f(g.x(i));
    return out;
  }

  [[nodiscard]] std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  [[nodiscard]] bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  [[nodiscard]] double max() const {
    double m = values.front();
    for (double v : values) m = std::max(m, v);
    return m;
  }
  [[nodiscard]] double min() const {
    double m = values.front();
    for (double v : values) m = std::min(m, v);
    return m;
  }

  /// Piecewise-linear interpolation; returns NaN outside the grid.
  [[nodiscard]] double interpolate(double x) const {
    const double s = (x - grid.x_min()) / grid.dx();
    const double last = static_cast<double>(grid.n() - 1);
    if (s < -1e-12 || s > last + 1e-12) return std::nan("");
    if (s >= last) return values.back();
    if (s <= 0.0) return values.front();
    const auto i = static_cast<std::size_t>(s);
    const double w = s - static_cast<double>(i);
    return (1.0 - w) * values[i] + w * values[i + 1];
  }
};

/// Population density, signal and time of the evolution problem.
struct CauchyState {
  double t = 0.0;
  Field u;
  Field v;
};

/// Second-order centred derivative with second-order one-sided stencils
/// at the two endpoints.
inline Field derivative_central(const Field& f) {
  const std::size_t n = f.size();
  const double h = f.grid.dx();
  Field out(f.grid);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return out;
}

/// Result of a trapezoid integration; the requested limits are snapped to
/// the nearest nodes and the snapped limits are reported.
struct TrapezoidResult {
  double value = 0.0;
  double a_snapped = 0.0;
  double b_snapped = 0.0;
};

inline TrapezoidResult trapezoid(const Field& f, double a, double b) {
  const Grid1D& g = f.grid;
  const double slack = 0.5 * g.dx();
  if (!(a <= b)) throw std::invalid_argument("trapezoid: need a <= b");
  if (a < g.x_min() - slack || b > g.x(g.n() - 1) + slack)
    throw std::out_of_range("trapezoid: interval outside the grid");
  const std::size_t ia = g.nearest(a);
  const std::size_t ib = g.nearest(b);
  double s = 0.0;
  for (std::size_t i = ia; i < ib; ++i) s += 0.5 * (f[i] + f[i + 1]);
  return {s * g.dx(), g.x(ia), g.x(ib)};
}

inline TrapezoidResult trapezoid(const Field& f) {
  return trapezoid(f, f.grid.x_min(), f.grid.x(f.grid.n() - 1));
}

// ---------------------------------------------------------------------------
// CSV helpers.  Numbers are written with 17 significant digits so files
// round-trip bit-exactly.

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_field_csv(std::ostream& os, const Field& f) {
  os << "x,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) os << format_real(f.grid.x(i)) << ',' << format_real(f[i]) << '\n';
}

/// Reads an `x,value` CSV written on a uniform grid.
inline Field read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,value", 0) != 0)
    throw std::runtime_error("read_field_csv: missing 'x,value' header");
  std::vector<double> xs, vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("read_field_csv: malformed row '" + line + "'");
    xs.push_back(std::stod(line.substr(0, comma)));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (xs.size() < 3) throw std::runtime_error("read_field_csv: need at least 3 rows");
  return Field(Grid1D::make(xs.front(), xs.back(), xs.size()), std::move(vs));
}

}  // namespace ksfkpp
