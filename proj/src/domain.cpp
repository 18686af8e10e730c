#include "emunet/domain.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "emunet/errors.hpp"

namespace emunet {

Domain::Domain(std::vector<Dimension> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DomainError("domain must have at least one dimension");
  std::set<std::string> seen;
  for (const auto& d : dims_) {
    if (!(d.lower < d.upper)) {
      std::ostringstream os;
      os << "invalid domain: dimension '" << d.name << "' has lower " << d.lower
         << " >= upper " << d.upper;
      throw DomainError(os.str());
    }
    if (!std::isfinite(d.lower) || !std::isfinite(d.upper))
      throw DomainError("invalid domain: non-finite bound in dimension '" + d.name + "'");
    if (!seen.insert(d.name).second)
      throw DomainError("invalid domain: duplicate dimension name '" + d.name + "'");
  }
}

std::vector<std::string> Domain::names() const {
  std::vector<std::string> out;
  out.reserve(dims_.size());
  for (const auto& d : dims_) out.push_back(d.name);
  return out;
}

Vector Domain::to_unit_cube(const Vector& x) const {
  if (!contains(x))
    throw DomainError("point outside domain in to_unit_cube");
  return to_unit_cube_unchecked(x);
}

Vector Domain::to_unit_cube_unchecked(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dims_.size())
    throw DomainError("dimension mismatch in to_unit_cube");
  Vector u(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    u[i] = (x[i] - dims_[i].lower) / width(i);
  return u;
}

Vector Domain::from_unit_cube(const Vector& u) const {
  if (static_cast<std::size_t>(u.size()) != dims_.size())
    throw DomainError("dimension mismatch in from_unit_cube");
  Vector x(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    x[i] = dims_[i].lower + u[i] * width(i);
  return x;
}

Matrix Domain::to_unit_cube_rows(const Matrix& points) const {
  Matrix out(points.rows(), points.cols());
  for (Eigen::Index r = 0; r < points.rows(); ++r)
    out.row(r) = to_unit_cube_unchecked(points.row(r).transpose()).transpose();
  return out;
}

Matrix Domain::from_unit_cube_rows(const Matrix& unit_points) const {
  Matrix out(unit_points.rows(), unit_points.cols());
  for (Eigen::Index r = 0; r < unit_points.rows(); ++r)
    out.row(r) = from_unit_cube(unit_points.row(r).transpose()).transpose();
  return out;
}

bool Domain::contains(const Vector& x, double rel_tol) const {
  if (static_cast<std::size_t>(x.size()) != dims_.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double slack = rel_tol * width(i);
    if (x[i] < dims_[i].lower - slack || x[i] > dims_[i].upper + slack) return false;
  }
  return true;
}

bool Domain::operator==(const Domain& other) const {
  if (dims_.size() != other.dims_.size()) return false;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i].name != other.dims_[i].name || dims_[i].lower != other.dims_[i].lower ||
        dims_[i].upper != other.dims_[i].upper)
      return false;
  }
  return true;
}

void DesignMatrix::validate(bool require_inside) const {
  if (static_cast<std::size_t>(points.cols()) != domain.size())
    throw DomainError("design matrix column count does not match domain");
  if (points.rows() < 1) throw DomainError("design matrix must contain at least one point");
  if (!require_inside) return;
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    if (!domain.contains(points.row(r).transpose()))
      throw DomainError("design point outside domain at row " + std::to_string(r));
  }
}

}  // namespace emunet
