#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "galaxy/errors.hpp"

namespace galaxy {

struct PointTag {};
struct VectorTag {};

// Runtime-dimension tuple of reals. Points and vectors share storage but are
// distinct types: point - point is a vector, point + vector is a point.
template <class Tag>
class Tuple {
 public:
  Tuple() = default;
  explicit Tuple(std::size_t dim, double fill = 0.0) : c_(dim, fill) {}
  explicit Tuple(std::vector<double> coords) : c_(std::move(coords)) {}
  Tuple(std::initializer_list<double> coords) : c_(coords) {}

  std::size_t dim() const { return c_.size(); }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }

  std::span<const double> coords() const { return c_; }
  std::span<double> coords() { return c_; }
  const std::vector<double>& raw() const { return c_; }

  bool operator==(const Tuple&) const = default;

 private:
  std::vector<double> c_;
};

using Point = Tuple<PointTag>;
using Vector = Tuple<VectorTag>;

// Throws DimensionMismatch unless a and b have the same (nonzero) dimension.
void require_same_dim(std::size_t a, std::size_t b);

// True iff every coordinate is finite.
bool all_finite(std::span<const double> xs);

Vector operator-(const Point& a, const Point& b);
Point operator+(const Point& p, const Vector& v);
Point operator-(const Point& p, const Vector& v);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& v);

// Raw-span kernels used by the hot simulation loops.
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

double inner_product(const Vector& u, const Vector& v);
double euclidean_norm(const Vector& v);
double squared_norm(const Vector& v);
double distance(const Point& a, const Point& b);

// Foot of the perpendicular from y onto the line through o and u.
Point project_point_onto_line(const Point& o, const Point& u, const Point& y);

// (<u,v>/<u,u>) u
Vector project_vector_onto_vector(const Vector& v, const Vector& u);

// |<u,v>| / ||u||, the length of project_vector_onto_vector(v, u).
double projection_norm(const Vector& v, const Vector& u);

// Angle subtended at center by a and b, in [0, pi].
double angle_at(const Point& center, const Point& a, const Point& b);

// Relative comparison with an absolute floor near zero.
bool approx_equal(double a, double b, double rel = 1e-9, double abs = 1e-12);

}  // namespace galaxy
