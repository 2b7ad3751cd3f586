#pragma once

#include <Eigen/Core>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ssp {

using Vector = Eigen::VectorXd;

/// A "simple" set: one whose Euclidean projection has a closed form.
/// Supported shapes cover everything the solvers and problem builders need:
/// the whole space, the nonnegative orthant, boxes, a single halfspace
/// c'x <= d, a single hyperplane c'x = d, and nonnegativity restricted to a
/// subset of coordinates.
class SimpleSet {
 public:
  enum class Kind {
    WholeSpace,
    NonnegativeOrthant,
    Box,
    Halfspace,
    Hyperplane,
    CoordinateNonnegative
  };

  static SimpleSet whole_space() { return SimpleSet(Kind::WholeSpace); }

  static SimpleSet nonnegative_orthant() {
    return SimpleSet(Kind::NonnegativeOrthant);
  }

  static SimpleSet box(Vector lower, Vector upper) {
    if (lower.size() != upper.size())
      throw std::invalid_argument("box: bound dimensions differ");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
      if (lower[i] > upper[i])
        throw std::invalid_argument("box: lower bound exceeds upper bound");
    SimpleSet s(Kind::Box);
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    return s;
  }

  static SimpleSet halfspace(Vector c, double d) {
    if (c.squaredNorm() == 0.0)
      throw std::invalid_argument("halfspace: zero normal");
    SimpleSet s(Kind::Halfspace);
    s.normal_ = std::move(c);
    s.offset_ = d;
    return s;
  }

  static SimpleSet hyperplane(Vector c, double d) {
    if (c.squaredNorm() == 0.0)
      throw std::invalid_argument("hyperplane: zero normal");
    SimpleSet s(Kind::Hyperplane);
    s.normal_ = std::move(c);
    s.offset_ = d;
    return s;
  }

  /// Nonnegativity on the listed coordinates only; the rest are free.
  static SimpleSet coordinate_nonnegative(std::vector<Eigen::Index> indices) {
    SimpleSet s(Kind::CoordinateNonnegative);
    s.indices_ = std::move(indices);
    return s;
  }

  Kind kind() const { return kind_; }

  Vector project(const Vector& v) const {
    switch (kind_) {
      case Kind::WholeSpace:
        return v;
      case Kind::NonnegativeOrthant:
        return v.cwiseMax(0.0);
      case Kind::Box:
        return v.cwiseMax(lower_).cwiseMin(upper_);
      case Kind::Halfspace: {
        const double viol = normal_.dot(v) - offset_;
        if (viol <= 0.0) return v;
        return v - (viol / normal_.squaredNorm()) * normal_;
      }
      case Kind::Hyperplane: {
        const double viol = normal_.dot(v) - offset_;
        return v - (viol / normal_.squaredNorm()) * normal_;
      }
      case Kind::CoordinateNonnegative: {
        Vector out = v;
        for (Eigen::Index i : indices_) out[i] = std::max(out[i], 0.0);
        return out;
      }
    }
    throw std::logic_error("SimpleSet: unknown kind");
  }

  bool contains(const Vector& v, double tol = 0.0) const {
    switch (kind_) {
      case Kind::WholeSpace:
        return true;
      case Kind::NonnegativeOrthant:
        return (v.array() >= -tol).all();
      case Kind::Box:
        return ((v - lower_).array() >= -tol).all() &&
               ((upper_ - v).array() >= -tol).all();
      case Kind::Halfspace:
        return normal_.dot(v) - offset_ <= tol;
      case Kind::Hyperplane:
        return std::abs(normal_.dot(v) - offset_) <= tol;
      case Kind::CoordinateNonnegative:
        for (Eigen::Index i : indices_)
          if (v[i] < -tol) return false;
        return true;
    }
    throw std::logic_error("SimpleSet: unknown kind");
  }

 private:
  explicit SimpleSet(Kind kind) : kind_(kind) {}

  Kind kind_;
  Vector lower_, upper_;
  Vector normal_;
  double offset_ = 0.0;
  std::vector<Eigen::Index> indices_;
};

inline Vector project(const SimpleSet& set, const Vector& v) {
  return set.project(v);
}

}  // namespace ssp
