#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "varops/grid.hpp"

namespace varops {

// Unit-mass Schwartz profile phi on R^n. value() already includes the mass
// normalization, so integrate(phi) == 1 up to quadrature error.
class Kernel {
 public:
  virtual ~Kernel() = default;

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }

  virtual double value(const Point& x) const = 0;
  virtual Point gradient(const Point& x) const = 0;

  // Radial Fourier transform g(|xi|) with g(0) = 1, when a closed form is
  // known. Kernels without one report has_closed_fourier() == false and the
  // caller falls back to fourier_radial_numeric().
  virtual bool has_closed_fourier() const { return false; }
  virtual double fourier_radial(double) const {
    throw std::logic_error("kernel has no closed-form Fourier transform");
  }

  // Tabulated kernels have no symbolic derivative; exactness tests for
  // dilate_dt do not apply to them.
  virtual bool is_tabulated() const { return false; }

  // Radius beyond which the profile is negligible (exact for compactly
  // supported kernels); bounds numeric Fourier quadrature.
  virtual double support_radius() const { return 64.0; }

 protected:
  Kernel(int dim, std::string name) : dim_(dim), name_(std::move(name)) {}

 private:
  int dim_;
  std::string name_;
};

class GaussianKernel final : public Kernel {
 public:
  explicit GaussianKernel(int dim);
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  bool has_closed_fourier() const override { return true; }
  double fourier_radial(double s) const override;

 private:
  double norm_;
};

// phi(x) = c_n / (1 + |x|^2)^((n+1)/2); its dilation is the Poisson kernel.
class PoissonKernel final : public Kernel {
 public:
  explicit PoissonKernel(int dim);
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  bool has_closed_fourier() const override { return true; }
  double fourier_radial(double s) const override;

 private:
  double cn_;
};

// Compactly supported C^inf bump exp(-1/(1-|x|^2)) on |x| < 1, normalized.
class BumpKernel final : public Kernel {
 public:
  explicit BumpKernel(int dim);
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  double support_radius() const override { return 1.0; }

 private:
  double norm_;
};

// Radial profile given by samples (r_i, v_i) on [0, r_max], interpolated by
// a clamped cubic spline with zero slope at both ends; zero beyond r_max.
class TabulatedKernel final : public Kernel {
 public:
  TabulatedKernel(int dim, std::vector<double> radii, std::vector<double> samples,
                  std::string name = "tabulated");
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  bool is_tabulated() const override { return true; }
  double support_radius() const override { return r_.back(); }

  double radial(double r) const;
  double radial_derivative(double r) const;

 private:
  double radial_raw(double r) const;

  std::vector<double> r_;
  std::vector<double> v_;
  std::vector<double> m_;  // spline second derivatives
  double norm_;
};

std::unique_ptr<Kernel> make_kernel(std::string_view name, int dim);
// Text file: '#' comments, then "r value" pairs, r increasing from 0.
std::unique_ptr<Kernel> load_tabulated_kernel(const std::string& path, int dim);

// phi_t(x) = t^-n phi(x/t). Throws for t <= 0.
double dilate(const Kernel& k, double t, const Point& x);
// Analytic d/dt of phi_t(x): -(n phi(u) + u . grad phi(u)) / t^(n+1), u = x/t.
double dilate_dt(const Kernel& k, double t, const Point& x);
// grad_x phi_t(x) = t^-(n+1) grad phi(x/t).
Point dilate_gradient(const Kernel& k, double t, const Point& x);

// Surface measure of the unit sphere S^(n-1).
double unit_sphere_area(int dim);
// g(s) = F(phi)(xi) at |xi| = s by dense radial quadrature (dims 1..3).
double fourier_radial_numeric(const Kernel& k, double s, double r_max);

// Empirical constants for the four d/dt estimates: each is the sampled
// supremum of |LHS| / RHS-without-C over a nested pair of sample grids
// around a reference ball. The refined grid contains the coarse one, so
// fine >= coarse and drift is one-sided.
struct BoundEstimate {
  double coarse = 0.0;
  double fine = 0.0;
  double drift() const { return coarse > 0.0 ? fine / coarse - 1.0 : 0.0; }
};

struct DerivativeBoundsReport {
  BoundEstimate pointwise;       // |d/dt phi_t(x)| <= C (t + |x|)^-(n+1)
  BoundEstimate outer;           // x in B, y outside 2B: C |y - x0|^-(n+1)
  BoundEstimate difference_in;   // x,y in B, z in 2B: C |x-y| t^-(n+2)
  BoundEstimate difference_out;  // z outside 2B: C |x-y| t^-3/2 |z-x0|^-(n+1/2)
  int base_samples = 0;
};

DerivativeBoundsReport check_derivative_bounds(const Kernel& k, const Ball& ball,
                                               int base_samples = 24);

}  // namespace varops
