#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

namespace emunet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Dimension {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
};

// Rectangular input space. Bounds are validated on construction: lower <
// upper for every dimension and names unique.
class Domain {
 public:
  Domain() = default;
  explicit Domain(std::vector<Dimension> dims);

  std::size_t size() const { return dims_.size(); }
  bool empty() const { return dims_.empty(); }
  const Dimension& dim(std::size_t i) const { return dims_.at(i); }
  const std::vector<Dimension>& dims() const { return dims_; }
  std::vector<std::string> names() const;

  double width(std::size_t i) const { return dims_[i].upper - dims_[i].lower; }

  // Affine map into [0,1]^p. Throws DomainError if x lies outside the box
  // (beyond a relative tolerance); use the unchecked variant where
  // extrapolation is permitted.
  Vector to_unit_cube(const Vector& x) const;
  Vector to_unit_cube_unchecked(const Vector& x) const;
  Vector from_unit_cube(const Vector& u) const;

  // Row-wise map of an n x p matrix of points.
  Matrix to_unit_cube_rows(const Matrix& points) const;
  Matrix from_unit_cube_rows(const Matrix& unit_points) const;

  bool contains(const Vector& x, double rel_tol = 1e-12) const;

  bool operator==(const Domain& other) const;

 private:
  std::vector<Dimension> dims_;
};

// A set of points in a domain, stored in natural units (one row per point).
struct DesignMatrix {
  Matrix points;
  Domain domain;

  int n() const { return static_cast<int>(points.rows()); }
  int p() const { return static_cast<int>(points.cols()); }

  // Checks shape against the domain; containment of every point optionally
  // (held-out designs projected into coefficient channels may extrapolate).
  void validate(bool require_inside = true) const;
};

}  // namespace emunet
