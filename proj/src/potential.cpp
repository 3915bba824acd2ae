#include "vortexlab/potential.hpp"

#include "vortexlab/error.hpp"

#include <cmath>
#include <set>

namespace vortexlab {

AnalyticPotential::AnalyticPotential() = default;

AnalyticPotential AnalyticPotential::custom(ValueFn value, GradientFn gradient, HessianFn hessian,
                                            std::string label) {
  if (!value || !gradient || !hessian) {
    throw Error(ErrorCode::BadParams, "custom potential needs value, gradient and hessian");
  }
  AnalyticPotential p;
  p.kind_ = Kind::Custom;
  p.name_ = std::move(label);
  p.value_fn_ = std::move(value);
  p.gradient_fn_ = std::move(gradient);
  p.hessian_fn_ = std::move(hessian);
  return p;
}

namespace {

// exp(1 - 1/(1-s)) for s = r^2/R^2 < 1 and its first two s-derivatives.
struct BumpProfile {
  double g, dg, d2g;
};

BumpProfile bump_profile(double s) {
  if (s >= 1.0) return {0.0, 0.0, 0.0};
  const double t = 1.0 / (1.0 - s);
  const double g = std::exp(1.0 - t);
  return {g, -g * t * t, g * (t * t * t * t - 2.0 * t * t * t)};
}

}  // namespace

double AnalyticPotential::value(const Point& x) const {
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Constant: return constant_;
    case Kind::Custom: return value_fn_(x);
    case Kind::Step: return step_amplitude_ * std::tanh(x.x() / step_scale_);
    case Kind::Bump: {
      const double s = (x - bump_center_).squaredNorm() / (bump_radius_ * bump_radius_);
      return bump_amplitude_ * bump_profile(s).g;
    }
    default: break;
  }
  double v = 0.0;
  for (const Gaussian& g : gaussians_) {
    v += g.amplitude * std::exp(-(x - g.center).squaredNorm() / (g.width * g.width));
  }
  return v;
}

Eigen::Vector2d AnalyticPotential::gradient(const Point& x) const {
  switch (kind_) {
    case Kind::Zero:
    case Kind::Constant: return Eigen::Vector2d::Zero();
    case Kind::Custom: return gradient_fn_(x);
    case Kind::Step: {
      const double c = std::cosh(x.x() / step_scale_);
      return {step_amplitude_ / (step_scale_ * c * c), 0.0};
    }
    case Kind::Bump: {
      const double r2 = bump_radius_ * bump_radius_;
      const Eigen::Vector2d dx = x - bump_center_;
      const auto b = bump_profile(dx.squaredNorm() / r2);
      return bump_amplitude_ * b.dg * 2.0 * dx / r2;
    }
    default: break;
  }
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  for (const Gaussian& g : gaussians_) {
    const double w2 = g.width * g.width;
    const Eigen::Vector2d dx = x - g.center;
    grad += g.amplitude * std::exp(-dx.squaredNorm() / w2) * (-2.0 / w2) * dx;
  }
  return grad;
}

Eigen::Matrix2d AnalyticPotential::hessian(const Point& x) const {
  switch (kind_) {
    case Kind::Zero:
    case Kind::Constant: return Eigen::Matrix2d::Zero();
    case Kind::Custom: return hessian_fn_(x);
    case Kind::Step: {
      const double u = x.x() / step_scale_;
      const double c = std::cosh(u);
      Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
      h(0, 0) = -2.0 * step_amplitude_ * std::tanh(u) / (step_scale_ * step_scale_ * c * c);
      return h;
    }
    case Kind::Bump: {
      const double r2 = bump_radius_ * bump_radius_;
      const Eigen::Vector2d dx = x - bump_center_;
      const auto b = bump_profile(dx.squaredNorm() / r2);
      return bump_amplitude_ *
             (b.d2g * 4.0 * dx * dx.transpose() / (r2 * r2) + b.dg * 2.0 / r2 * Eigen::Matrix2d::Identity());
    }
    default: break;
  }
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  for (const Gaussian& g : gaussians_) {
    const double w2 = g.width * g.width;
    const Eigen::Vector2d dx = x - g.center;
    const double e = g.amplitude * std::exp(-dx.squaredNorm() / w2);
    h += e * (4.0 / (w2 * w2) * dx * dx.transpose() - 2.0 / w2 * Eigen::Matrix2d::Identity());
  }
  return h;
}

AnalyticPotential builtin_potential(const std::string& kind, const std::map<std::string, double>& params) {
  auto take = [&](const std::set<std::string>& allowed) {
    for (const auto& [key, value] : params) {
      if (!allowed.count(key)) throw Error(ErrorCode::BadParams, "unknown parameter '" + key + "' for " + kind);
      if (!std::isfinite(value)) throw Error(ErrorCode::BadParams, "parameter '" + key + "' is not finite");
    }
  };
  auto get = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  auto positive = [&](const std::string& key, double v) {
    if (!(v > 0.0)) throw Error(ErrorCode::BadParams, "parameter '" + key + "' must be positive");
    return v;
  };

  AnalyticPotential p;
  p.name_ = kind;
  p.params_ = params;
  if (kind == "zero") {
    take({});
    p.kind_ = AnalyticPotential::Kind::Zero;
  } else if (kind == "constant") {
    take({"value"});
    p.kind_ = AnalyticPotential::Kind::Constant;
    p.constant_ = get("value", 0.0);
  } else if (kind == "gaussian") {
    take({"amplitude", "cx", "cy", "width"});
    p.kind_ = AnalyticPotential::Kind::Gaussian;
    p.gaussians_.push_back({get("amplitude", 1.0), Point(get("cx", 0.0), get("cy", 0.0)),
                            positive("width", get("width", 1.0))});
  } else if (kind == "step") {
    take({"amplitude", "scale"});
    p.kind_ = AnalyticPotential::Kind::Step;
    p.step_amplitude_ = get("amplitude", 0.225);
    p.step_scale_ = positive("scale", get("scale", 1.0));
  } else if (kind == "double_gaussian") {
    take({"amplitude", "offset", "width"});
    p.kind_ = AnalyticPotential::Kind::DoubleGaussian;
    const double a = get("amplitude", 1.0), off = get("offset", 1.0);
    const double w = positive("width", get("width", 1.0));
    p.gaussians_.push_back({a, Point(off, 0.0), w});
    p.gaussians_.push_back({a, Point(-off, 0.0), w});
  } else if (kind == "lattice") {
    take({"amplitude", "extent", "spacing", "width"});
    p.kind_ = AnalyticPotential::Kind::Lattice;
    const double extent = get("extent", 15.0);
    if (!(extent >= 0.0) || extent > 200.0 || extent != std::floor(extent)) {
      throw Error(ErrorCode::BadParams, "lattice extent must be a non-negative integer <= 200");
    }
    const int m = static_cast<int>(extent);
    const double a = get("amplitude", 1.0);
    const double spacing = positive("spacing", get("spacing", 1.0));
    const double w = positive("width", get("width", 1.0));
    for (int j = -m; j <= m; ++j)
      for (int k = -m; k <= m; ++k) p.gaussians_.push_back({a, Point(j * spacing, k * spacing), w});
  } else if (kind == "bump") {
    take({"amplitude", "radius", "cx", "cy"});
    p.kind_ = AnalyticPotential::Kind::Bump;
    p.bump_amplitude_ = get("amplitude", 1.0);
    p.bump_radius_ = positive("radius", get("radius", 1.0));
    p.bump_center_ = Point(get("cx", 0.0), get("cy", 0.0));
  } else {
    throw Error(ErrorCode::BadParams, "unknown potential kind '" + kind + "'");
  }
  return p;
}

}  // namespace vortexlab
