#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "kmrates/checked.hpp"

namespace kmrates {

using Vector = Eigen::VectorXd;

enum class NormKind { Euclidean, Lp };

/// Finite-dimensional normed space: R^dim with the Euclidean or an l_p norm.
class Space {
 public:
  static Space euclidean(std::size_t dim) { return Space(dim, NormKind::Euclidean, 2.0); }
  static Space lp(std::size_t dim, double p) {
    if (!(p > 1.0) || !std::isfinite(p))
      throw DomainError("l_p space requires 1 < p < inf, got p=" + std::to_string(p));
    return Space(dim, p == 2.0 ? NormKind::Euclidean : NormKind::Lp, p);
  }

  std::size_t dim() const noexcept { return dim_; }
  NormKind kind() const noexcept { return kind_; }
  double p() const noexcept { return p_; }
  bool is_euclidean() const noexcept { return kind_ == NormKind::Euclidean; }

  double norm(const Vector &v) const {
    if (kind_ == NormKind::Euclidean) return v.norm();
    // scale by the largest magnitude to keep |v_i|^p in range
    const double m = v.cwiseAbs().maxCoeff();
    if (m == 0.0 || !std::isfinite(m)) return m;
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]) / m, p_);
    return m * std::pow(s, 1.0 / p_);
  }

  double distance(const Vector &a, const Vector &b) const { return norm(a - b); }

  Vector zero() const { return Vector::Zero(static_cast<Eigen::Index>(dim_)); }

  void require_dim(const Vector &v, const char *what) const {
    if (static_cast<std::size_t>(v.size()) != dim_)
      throw DomainError(std::string(what) + " has dimension " + std::to_string(v.size()) +
                        ", space has " + std::to_string(dim_));
  }

  std::string describe() const {
    return kind_ == NormKind::Euclidean
               ? "euclidean R^" + std::to_string(dim_)
               : "l_" + std::to_string(p_) + " R^" + std::to_string(dim_);
  }

 private:
  Space(std::size_t dim, NormKind kind, double p) : dim_(dim), kind_(kind), p_(p) {
    if (dim == 0) throw DomainError("space dimension must be positive");
  }

  std::size_t dim_;
  NormKind kind_;
  double p_;
};

}  // namespace kmrates
