#include "galaxy/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace galaxy {

void require_same_dim(std::size_t a, std::size_t b) {
  if (a == 0 || b == 0) throw DimensionMismatch("zero-dimensional operand");
  if (a != b) {
    throw DimensionMismatch("dimension mismatch: " + std::to_string(a) + " vs " +
                            std::to_string(b));
  }
}

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

namespace {

template <class Out, class A, class B, class Op>
Out zip(const A& a, const B& b, Op op) {
  require_same_dim(a.dim(), b.dim());
  Out out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = op(a[i], b[i]);
  return out;
}

}  // namespace

Vector operator-(const Point& a, const Point& b) {
  return zip<Vector>(a, b, std::minus<>{});
}
Point operator+(const Point& p, const Vector& v) {
  return zip<Point>(p, v, std::plus<>{});
}
Point operator-(const Point& p, const Vector& v) {
  return zip<Point>(p, v, std::minus<>{});
}
Vector operator+(const Vector& a, const Vector& b) {
  return zip<Vector>(a, b, std::plus<>{});
}
Vector operator-(const Vector& a, const Vector& b) {
  return zip<Vector>(a, b, std::minus<>{});
}
Vector operator*(double s, const Vector& v) {
  Vector out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] = s * v[i];
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double inner_product(const Vector& u, const Vector& v) {
  require_same_dim(u.dim(), v.dim());
  return dot(u.coords(), v.coords());
}

double squared_norm(const Vector& v) { return dot(v.coords(), v.coords()); }

double euclidean_norm(const Vector& v) { return std::sqrt(squared_norm(v)); }

double distance(const Point& a, const Point& b) {
  require_same_dim(a.dim(), b.dim());
  return std::sqrt(squared_distance(a.coords(), b.coords()));
}

Point project_point_onto_line(const Point& o, const Point& u, const Point& y) {
  require_same_dim(o.dim(), u.dim());
  require_same_dim(o.dim(), y.dim());
  const Vector dir = u - o;
  const double dd = squared_norm(dir);
  if (dd == 0.0) throw DegenerateGeometry("line through coincident points");
  const double s = inner_product(y - o, dir) / dd;
  return o + s * dir;
}

Vector project_vector_onto_vector(const Vector& v, const Vector& u) {
  require_same_dim(v.dim(), u.dim());
  const double uu = squared_norm(u);
  if (uu == 0.0) throw DegenerateGeometry("projection onto the zero vector");
  return (inner_product(u, v) / uu) * u;
}

double projection_norm(const Vector& v, const Vector& u) {
  require_same_dim(v.dim(), u.dim());
  const double nu = euclidean_norm(u);
  if (nu == 0.0) throw DegenerateGeometry("projection onto the zero vector");
  return std::abs(inner_product(u, v)) / nu;
}

double angle_at(const Point& center, const Point& a, const Point& b) {
  const Vector da = a - center;
  const Vector db = b - center;
  const double na = euclidean_norm(da);
  const double nb = euclidean_norm(db);
  if (na == 0.0 || nb == 0.0) throw DegenerateGeometry("angle at a coincident point");
  const double c = std::clamp(inner_product(da, db) / (na * nb), -1.0, 1.0);
  return std::acos(c);
}

bool approx_equal(double a, double b, double rel, double abs) {
  const double diff = std::abs(a - b);
  if (diff <= abs) return true;
  return diff <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace galaxy
