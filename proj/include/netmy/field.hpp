#ifndef NETMY_FIELD_HPP
#define NETMY_FIELD_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "netmy/errors.hpp"

namespace netmy {

/// Grid geometry shared by fields, kernels and operators. Lengths in nm.
struct GridGeometry {
  int height = 64;
  int width = 64;
  double spacing = 20.0;       // nm per pixel
  double standoff = 20.0;      // z0, nm
  double mu0_over_4pi = 1.0;   // dimensionless mode

  void validate() const {
    if (height < 2 || width < 2) throw InvalidInputError("GridGeometry: height/width must be >= 2");
    if (!(spacing > 0.0)) throw InvalidInputError("GridGeometry: spacing must be > 0");
    if (!(standoff > 0.0)) throw InvalidInputError("GridGeometry: standoff must be > 0");
  }

  long pixels() const { return static_cast<long>(height) * width; }

  bool operator==(const GridGeometry&) const = default;
};

/// Dense row-major 2D array of doubles.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, fill) {
    if (rows < 1 || cols < 1) throw InvalidInputError("ScalarField: nonpositive shape");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  long size() const { return static_cast<long>(rows_) * cols_; }

  double& at(int r, int c) { return v_[static_cast<size_t>(r) * cols_ + c]; }
  double at(int r, int c) const { return v_[static_cast<size_t>(r) * cols_ + c]; }
  double& operator[](long i) { return v_[i]; }
  double operator[](long i) const { return v_[i]; }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

  bool same_shape(const ScalarField& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  double sum() const {
    double s = 0.0;
    for (double x : v_) s += x;
    return s;
  }
  double max() const {
    double m = v_.empty() ? 0.0 : v_[0];
    for (double x : v_)
      if (x > m) m = x;
    return m;
  }
  double min() const {
    double m = v_.empty() ? 0.0 : v_[0];
    for (double x : v_)
      if (x < m) m = x;
    return m;
  }
  /// First maximal entry in row-major order.
  long argmax() const {
    long best = 0;
    for (long i = 1; i < size(); ++i)
      if (v_[i] > v_[best]) best = i;
    return best;
  }
  std::pair<int, int> argmax_rc() const {
    long i = argmax();
    return {static_cast<int>(i / cols_), static_cast<int>(i % cols_)};
  }

  ScalarField& operator+=(const ScalarField& o) {
    for (long i = 0; i < size(); ++i) v_[i] += o.v_[i];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    for (long i = 0; i < size(); ++i) v_[i] -= o.v_[i];
    return *this;
  }
  ScalarField& operator*=(double c) {
    for (double& x : v_) x *= c;
    return *this;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> v_;
};

/// Sorted frequency samples in GHz.
struct FrequencyGrid {
  std::vector<double> values;

  FrequencyGrid() = default;
  explicit FrequencyGrid(std::vector<double> v) : values(std::move(v)) { validate(); }

  static FrequencyGrid uniform(double lo, double hi, int n) {
    if (n < 1) throw InvalidInputError("FrequencyGrid: need at least one sample");
    std::vector<double> v(n);
    if (n == 1) {
      v[0] = lo;
    } else {
      for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    }
    return FrequencyGrid(std::move(v));
  }

  int count() const { return static_cast<int>(values.size()); }

  void validate() const {
    if (values.empty()) throw InvalidInputError("FrequencyGrid: empty");
    for (size_t i = 1; i < values.size(); ++i)
      if (!(values[i] > values[i - 1])) throw InvalidInputError("FrequencyGrid: not strictly increasing");
  }

  bool operator==(const FrequencyGrid&) const = default;
};

}  // namespace netmy

#endif
