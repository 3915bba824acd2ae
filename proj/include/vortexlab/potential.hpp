#pragma once

#include "vortexlab/geometry.hpp"

#include <Eigen/Core>

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace vortexlab {

/// Limiting background Q0 with analytic first and second derivatives.
class AnalyticPotential {
 public:
  enum class Kind { Zero, Constant, Gaussian, Step, DoubleGaussian, Lattice, Bump, Custom };

  using ValueFn = std::function<double(const Point&)>;
  using GradientFn = std::function<Eigen::Vector2d(const Point&)>;
  using HessianFn = std::function<Eigen::Matrix2d(const Point&)>;

  /// Q0 = 0.
  AnalyticPotential();

  static AnalyticPotential custom(ValueFn value, GradientFn gradient, HessianFn hessian,
                                  std::string label = "custom");

  double value(const Point& x) const;
  Eigen::Vector2d gradient(const Point& x) const;
  Eigen::Matrix2d hessian(const Point& x) const;

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::map<std::string, double>& params() const { return params_; }

 private:
  friend AnalyticPotential builtin_potential(const std::string&, const std::map<std::string, double>&);

  struct Gaussian {
    double amplitude;
    Point center;
    double width;
  };

  Kind kind_ = Kind::Zero;
  std::string name_ = "zero";
  std::map<std::string, double> params_;
  double constant_ = 0.0;
  std::vector<Gaussian> gaussians_;
  double step_amplitude_ = 0.0, step_scale_ = 1.0;
  double bump_amplitude_ = 0.0, bump_radius_ = 1.0;
  Point bump_center_ = Point::Zero();
  ValueFn value_fn_;
  GradientFn gradient_fn_;
  HessianFn hessian_fn_;
};

/// Builtin backgrounds by name:
///   zero; constant{value}; gaussian{amplitude=1,cx=0,cy=0,width=1} (V1);
///   step{amplitude=0.225,scale=1} (V2); double_gaussian{amplitude=1,offset=1} (V3);
///   lattice{amplitude=1,extent=15,spacing=1,width=1} (V4);
///   bump{amplitude=1,radius=1,cx=0,cy=0}, a C-infinity bump with compact support.
AnalyticPotential builtin_potential(const std::string& kind, const std::map<std::string, double>& params = {});

}  // namespace vortexlab
