#pragma once

#include "protomech/errors.hpp"
#include "protomech/numerics/grid.hpp"

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <string>
#include <type_traits>
#include <vector>

namespace protomech::numerics {

using Complex = std::complex<double>;

template <typename Scalar>
using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Values of one scalar quantity at every point of a PeriodicGrid.
template <typename Scalar>
class Field {
 public:
  using scalar_type = Scalar;

  Field() = default;
  explicit Field(PeriodicGrid grid) : grid_(std::move(grid)), values_(Values<Scalar>::Zero(grid_.size())) {}
  Field(PeriodicGrid grid, Values<Scalar> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw InvalidInput("Field: value count " + std::to_string(values_.size()) +
                         " does not match grid size " + std::to_string(grid_.size()));
  }

  static Field constant(const PeriodicGrid& grid, Scalar c) {
    return Field(grid, Values<Scalar>::Constant(grid.size(), c));
  }

  /// Samples `f(x)` with x an Eigen::VectorXd of coordinates.
  template <typename F>
  static Field sample(const PeriodicGrid& grid, F&& f) {
    Values<Scalar> v(grid.size());
    for (Index i = 0; i < grid.size(); ++i) v[i] = static_cast<Scalar>(f(grid.point(i)));
    return Field(grid, std::move(v));
  }

  const PeriodicGrid& grid() const { return grid_; }
  const Values<Scalar>& values() const { return values_; }
  Values<Scalar>& values() { return values_; }
  Index size() const { return values_.size(); }

  Scalar operator[](Index i) const { return values_[i]; }
  Scalar& operator[](Index i) { return values_[i]; }

  bool all_finite() const {
    if constexpr (std::is_same_v<Scalar, Complex>) {
      return values_.real().allFinite() && values_.imag().allFinite();
    } else {
      return values_.allFinite();
    }
  }

  Field& operator+=(const Field& o) {
    require_same_grid(grid_, o.grid_, "Field::+=");
    values_ += o.values_;
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same_grid(grid_, o.grid_, "Field::-=");
    values_ -= o.values_;
    return *this;
  }
  Field& operator*=(Scalar s) {
    values_ *= s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, Scalar s) { return a *= s; }
  friend Field operator*(Scalar s, Field a) { return a *= s; }

 private:
  PeriodicGrid grid_;
  Values<Scalar> values_;
};

using ScalarField = Field<double>;
using ComplexField = Field<Complex>;

/// Pointwise product of two fields on the same grid.
template <typename Scalar>
Field<Scalar> pointwise_product(const Field<Scalar>& a, const Field<Scalar>& b) {
  require_same_grid(a.grid(), b.grid(), "pointwise_product");
  return Field<Scalar>(a.grid(), a.values().cwiseProduct(b.values()));
}

inline ComplexField to_complex(const ScalarField& f) {
  return ComplexField(f.grid(), f.values().cast<Complex>());
}
inline ScalarField real_part(const ComplexField& f) { return ScalarField(f.grid(), f.values().real()); }
inline ScalarField imag_part(const ComplexField& f) { return ScalarField(f.grid(), f.values().imag()); }

struct CovariantTag {};
struct ContravariantTag {};

/// One component array per grid axis. The tag separates covectors (momenta,
/// gradients) from vectors (velocities) at the type level.
template <typename Scalar, typename Kind>
class ComponentField {
 public:
  ComponentField() = default;
  explicit ComponentField(const PeriodicGrid& grid)
      : grid_(grid), components_(static_cast<std::size_t>(grid.dimension()), Values<Scalar>::Zero(grid.size())) {}
  ComponentField(const PeriodicGrid& grid, std::vector<Values<Scalar>> components)
      : grid_(grid), components_(std::move(components)) {
    if (static_cast<Index>(components_.size()) != grid_.dimension())
      throw InvalidInput("ComponentField: component count must equal grid dimension");
    for (const auto& c : components_)
      if (c.size() != grid_.size()) throw InvalidInput("ComponentField: component length mismatch");
  }

  static ComponentField from_fields(const std::vector<Field<Scalar>>& fields) {
    if (fields.empty()) throw InvalidInput("ComponentField: no components");
    std::vector<Values<Scalar>> comps;
    for (const auto& f : fields) {
      require_same_grid(fields.front().grid(), f.grid(), "ComponentField::from_fields");
      comps.push_back(f.values());
    }
    return ComponentField(fields.front().grid(), std::move(comps));
  }

  const PeriodicGrid& grid() const { return grid_; }
  Index dimension() const { return static_cast<Index>(components_.size()); }
  const Values<Scalar>& component(Index a) const { return components_[static_cast<std::size_t>(a)]; }
  Values<Scalar>& component(Index a) { return components_[static_cast<std::size_t>(a)]; }
  Field<Scalar> component_field(Index a) const { return Field<Scalar>(grid_, component(a)); }

  /// Components at one grid point.
  Values<Scalar> at(Index i) const {
    Values<Scalar> v(dimension());
    for (Index a = 0; a < dimension(); ++a) v[a] = component(a)[i];
    return v;
  }
  void set(Index i, const Values<Scalar>& v) {
    for (Index a = 0; a < dimension(); ++a) component(a)[i] = v[a];
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : components_) m = std::max(m, c.cwiseAbs().maxCoeff());
    return m;
  }

  ComponentField& operator+=(const ComponentField& o) {
    require_same_grid(grid_, o.grid_, "ComponentField::+=");
    for (std::size_t a = 0; a < components_.size(); ++a) components_[a] += o.components_[a];
    return *this;
  }
  ComponentField& operator-=(const ComponentField& o) {
    require_same_grid(grid_, o.grid_, "ComponentField::-=");
    for (std::size_t a = 0; a < components_.size(); ++a) components_[a] -= o.components_[a];
    return *this;
  }
  ComponentField& operator*=(Scalar s) {
    for (auto& c : components_) c *= s;
    return *this;
  }
  friend ComponentField operator+(ComponentField a, const ComponentField& b) { return a += b; }
  friend ComponentField operator-(ComponentField a, const ComponentField& b) { return a -= b; }
  friend ComponentField operator*(ComponentField a, Scalar s) { return a *= s; }
  friend ComponentField operator*(Scalar s, ComponentField a) { return a *= s; }

 private:
  PeriodicGrid grid_;
  std::vector<Values<Scalar>> components_;
};

using CovectorField = ComponentField<double, CovariantTag>;
using VectorField = ComponentField<double, ContravariantTag>;
using ComplexCovectorField = ComponentField<Complex, CovariantTag>;

}  // namespace protomech::numerics
