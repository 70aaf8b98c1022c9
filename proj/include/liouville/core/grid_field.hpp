#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "liouville/core/geometry.hpp"
#include "liouville/errors.hpp"

namespace liouville {

enum class DomainShape { disk, square };

/// Node-centered samples on [-extent, extent]^2. Nodes outside the domain
/// mask hold NaN. Index (i, j) is column i (x) and row j (y), row-major.
class GridField {
 public:
  GridField() = default;

  GridField(double extent, int n, DomainShape shape, double alpha = 0.0)
      : extent_(extent), n_(n), shape_(shape), alpha_(alpha) {
    require(extent > 0.0 && std::isfinite(extent), ErrorKind::invalid_argument, "grid extent must be positive");
    require(n >= 16, ErrorKind::invalid_argument, "grid needs at least 16 samples per axis");
    h_ = 2.0 * extent_ / (n_ - 1);
    mask_.assign(static_cast<std::size_t>(n_) * n_, 0);
    values_.assign(mask_.size(), std::numeric_limits<double>::quiet_NaN());
    const double lim = extent_ * (1.0 + 1e-12);
    for (int j = 0; j < n_; ++j)
      for (int i = 0; i < n_; ++i) {
        Point p = node(i, j);
        bool in = shape_ == DomainShape::square || norm(p) <= lim;
        mask_[index(i, j)] = in ? 1 : 0;
      }
  }

  template <class F>
  static GridField sample(double extent, int n, DomainShape shape, double alpha, F&& f) {
    GridField g(extent, n, shape, alpha);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (g.in_domain(i, j)) g.at(i, j) = f(g.node(i, j));
    return g;
  }

  double extent() const { return extent_; }
  int n() const { return n_; }
  double h() const { return h_; }
  double alpha() const { return alpha_; }
  DomainShape shape() const { return shape_; }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n_ + i; }
  Point node(int i, int j) const { return {-extent_ + i * h_, -extent_ + j * h_}; }
  bool in_domain(int i, int j) const { return mask_[index(i, j)] != 0; }

  double& at(int i, int j) { return values_[index(i, j)]; }
  double at(int i, int j) const { return values_[index(i, j)]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<unsigned char>& mask() const { return mask_; }

  /// Whether a point lies in the domain (disk or square) itself.
  bool contains(Point p) const {
    const double lim = extent_ * (1.0 + 1e-12);
    if (shape_ == DomainShape::disk) return norm(p) <= lim;
    return std::abs(p.x) <= lim && std::abs(p.y) <= lim;
  }

  /// Bilinear interpolation; every corner of the containing cell must be in the mask.
  double interpolate(Point p) const {
    double fx = (p.x + extent_) / h_, fy = (p.y + extent_) / h_;
    const double slack = 1e-9;
    if (!(fx >= -slack && fy >= -slack && fx <= n_ - 1 + slack && fy <= n_ - 1 + slack))
      throw Error(ErrorKind::out_of_domain, "interpolation point outside the grid");
    int i = std::clamp(static_cast<int>(std::floor(fx)), 0, n_ - 2);
    int j = std::clamp(static_cast<int>(std::floor(fy)), 0, n_ - 2);
    double tx = std::clamp(fx - i, 0.0, 1.0), ty = std::clamp(fy - j, 0.0, 1.0);
    double v00 = at(i, j), v10 = at(i + 1, j), v01 = at(i, j + 1), v11 = at(i + 1, j + 1);
    if (!(std::isfinite(v00) && std::isfinite(v10) && std::isfinite(v01) && std::isfinite(v11))) {
      // Accept points sitting on a valid node even when the cell is partly masked out.
      int ni = static_cast<int>(std::lround(fx)), nj = static_cast<int>(std::lround(fy));
      if (std::abs(fx - ni) < slack && std::abs(fy - nj) < slack && std::isfinite(at(ni, nj))) return at(ni, nj);
      throw Error(ErrorKind::out_of_domain, "interpolation point outside the masked domain");
    }
    return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 + tx * ty * v11;
  }

  /// Whether bilinear interpolation is defined at p.
  bool interpolable(Point p) const {
    double fx = (p.x + extent_) / h_, fy = (p.y + extent_) / h_;
    if (!(fx >= 0.0 && fy >= 0.0 && fx <= n_ - 1 && fy <= n_ - 1)) return false;
    int i = std::clamp(static_cast<int>(std::floor(fx)), 0, n_ - 2);
    int j = std::clamp(static_cast<int>(std::floor(fy)), 0, n_ - 2);
    return std::isfinite(at(i, j)) && std::isfinite(at(i + 1, j)) && std::isfinite(at(i, j + 1)) &&
           std::isfinite(at(i + 1, j + 1));
  }

  double min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : values_)
      if (std::isfinite(v)) m = std::min(m, v);
    return m;
  }
  double max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values_)
      if (std::isfinite(v)) m = std::max(m, v);
    return m;
  }

  void check_finite() const {
    for (std::size_t k = 0; k < values_.size(); ++k)
      if (mask_[k] && !std::isfinite(values_[k]))
        throw Error(ErrorKind::invalid_argument, "masked-in node holds a non-finite value");
  }

 private:
  double extent_ = 1.0;
  int n_ = 0;
  double h_ = 0.0;
  DomainShape shape_ = DomainShape::disk;
  double alpha_ = 0.0;
  std::vector<unsigned char> mask_;
  std::vector<double> values_;
};

/// Radial samples u(r_i); optional slopes du/dr enable Hermite interpolation.
struct RadialProfile {
  std::vector<double> nodes;
  std::vector<double> values;
  std::vector<double> slopes;
  double alpha = 0.0;

  void validate() const {
    require(nodes.size() == values.size() && nodes.size() >= 2, ErrorKind::invalid_argument,
            "radial profile needs matching nodes and values");
    require(slopes.empty() || slopes.size() == nodes.size(), ErrorKind::invalid_argument,
            "radial slopes must match nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      require(std::isfinite(values[i]), ErrorKind::invalid_argument, "radial profile value not finite");
      if (i > 0) require(nodes[i] > nodes[i - 1], ErrorKind::invalid_argument, "radial nodes must increase");
    }
  }

  double r_max() const { return nodes.back(); }

  double operator()(double r) const {
    require(r >= nodes.front() - 1e-14 && r <= nodes.back() * (1.0 + 1e-12), ErrorKind::out_of_domain,
            "radius outside the radial profile");
    auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
    std::size_t k = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
    if (k + 1 >= nodes.size()) return values.back();
    double r0 = nodes[k], r1 = nodes[k + 1], dr = r1 - r0;
    double t = (r - r0) / dr;
    if (slopes.empty()) return values[k] + t * (values[k + 1] - values[k]);
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * values[k] + (t3 - 2 * t2 + t) * dr * slopes[k] + (-2 * t3 + 3 * t2) * values[k + 1] +
           (t3 - t2) * dr * slopes[k + 1];
  }
};

/// Writes the plain-text field format: four header lines then n^2 values.
inline void write_field(const GridField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot open field file for writing: " + path);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", f.extent());
  out << "extent " << buf << "\n";
  out << "n " << f.n() << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", f.alpha());
  out << "alpha " << buf << "\n";
  out << "mask " << (f.shape() == DomainShape::disk ? "disk" : "square") << "\n";
  for (int j = 0; j < f.n(); ++j) {
    for (int i = 0; i < f.n(); ++i) {
      double v = f.at(i, j);
      if (std::isfinite(v))
        std::snprintf(buf, sizeof buf, "%.17g", v);
      else
        std::snprintf(buf, sizeof buf, "nan");
      out << buf << (i + 1 == f.n() ? '\n' : ' ');
    }
  }
  if (!out) throw Error(ErrorKind::io, "failed writing field file: " + path);
}

inline GridField read_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open field file: " + path);
  auto header = [&](const char* key) {
    std::string line, k, v;
    if (!std::getline(in, line)) throw Error(ErrorKind::io, std::string("field file missing header ") + key);
    std::istringstream ls(line);
    ls >> k >> v;
    if (k != key) throw Error(ErrorKind::io, std::string("field file header expected ") + key);
    return v;
  };
  auto num = [&](const std::string& s) {
    char* end = nullptr;
    double x = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw Error(ErrorKind::io, "unparseable number in field file: " + s);
    return x;
  };
  double extent = num(header("extent"));
  int n = static_cast<int>(num(header("n")));
  double alpha = num(header("alpha"));
  std::string m = header("mask");
  DomainShape shape;
  if (m == "disk" || m == "1")
    shape = DomainShape::disk;
  else if (m == "square" || m == "0")
    shape = DomainShape::square;
  else
    throw Error(ErrorKind::io, "unknown mask flag in field file: " + m);
  GridField f(extent, n, shape, alpha);
  std::string tok;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (!(in >> tok)) throw Error(ErrorKind::io, "field file truncated");
      double v = tok == "nan" ? std::numeric_limits<double>::quiet_NaN() : num(tok);
      if (f.in_domain(i, j)) f.at(i, j) = v;
    }
  f.check_finite();
  return f;
}

}  // namespace liouville
