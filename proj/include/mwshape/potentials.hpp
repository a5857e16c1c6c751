#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mwshape/grid.hpp"

namespace mwshape {

/// Temporal window exp(-((t - t0)/tau)^4).
double quartic_envelope(double t, double t0, double tau);

struct FixedCenter {
  double x_c = 0.0;  // um
};

/// Center moving as x0 + v*t.
struct MovingCenter {
  double x0 = 0.0;        // um
  double v_cm_s = 0.0;    // cm/s
};

/// -V0 env(t) cos^2(pi (x - x_c)/sigma_x + phi) for |x - x_c| <= sigma_x/2,
/// -V0 sin^2(phi) elsewhere (no envelope on the outside value).
struct CosineWell {
  double V0 = 0.0;       // uK
  double t0 = 0.0;       // us
  double tau = 1.0;      // us
  double sigma_x = 1.0;  // um
  double phi = 0.0;      // rad
  std::variant<FixedCenter, MovingCenter> center = FixedCenter{};

  double center_at(double t) const;
};

/// Barrier travelling with the packet: -2 V0 env(t) |x - v t|/sigma_x inside
/// |x - v t| <= sigma_x/2, -V0 outside.
struct TriangleSplitter {
  double V0 = 0.0;
  double t0 = 0.0;
  double tau = 1.0;
  double sigma_x = 1.0;
  double v_cm_s = 0.0;
};

/// max(0, ramp1 + ramp2) with ramp_i = V0 env_i(t) (1 - |x - c_i(t)|/sigma),
/// c1 = v t + x1 windowed at t0, c2 = v2 t + x2 windowed at t0 + 2 tau.
struct TwoRampSplitter {
  double V0 = 0.0;
  double t0 = 0.0;
  double tau = 1.0;
  double sigma = 1.0;
  double v_cm_s = 0.0;
  double x1 = 0.0;
  double v2_cm_s = 0.0;
  double x2 = 0.0;
};

/// 0 for x <= x_b, curvature/2 (x - x_b)^2 beyond.
struct ParabolicWall {
  double x_b = 120.0;                // um
  double curvature = 0.75;           // uK/um^2
};

/// Static harmonic trap m omega^2 (x - x_c)^2 / 2.
struct HarmonicTrap {
  double x_c = 0.0;          // um
  double omega = 1.0;        // rad/s
};

/// Spatially uniform offset.
struct ConstantPotential {
  double value = 0.0;  // uK
};

struct NoPotential {};

class PotentialSpec;

/// Pointwise sum of its parts.
struct Composite {
  std::vector<PotentialSpec> parts;
};

using PotentialVariant = std::variant<NoPotential, CosineWell, TriangleSplitter, TwoRampSplitter,
                                      ParabolicWall, HarmonicTrap, ConstantPotential, Composite>;

/// Tagged union over the potential families; Composite sums its parts.
class PotentialSpec {
 public:
  PotentialSpec();
  template <typename T>
    requires(!std::is_same_v<std::decay_t<T>, PotentialSpec>)
  PotentialSpec(T&& family) : v_(std::forward<T>(family)) {}

  const PotentialVariant& variant() const noexcept { return v_; }
  PotentialVariant& variant() noexcept { return v_; }

  template <typename T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&v_);
  }
  template <typename T>
  T* get_if() noexcept {
    return std::get_if<T>(&v_);
  }

  /// Family name ("cosine_well", "triangle_splitter", ...).
  std::string family() const;

 private:
  PotentialVariant v_;
};

/// Potential in uK at time t on every grid point.
std::vector<double> evaluate(const PotentialSpec& spec, const Grid1D& grid, double t);

/// Same, writing into `out` for lab positions x_i + offset (for moving frames).
void evaluate_into(const PotentialSpec& spec, const Grid1D& grid, double t, double offset,
                   std::span<double> out);

/// Pointwise evaluation at a single lab position.
double evaluate_at(const PotentialSpec& spec, double x, double t);

/// Largest temporal envelope among the switched (windowed) parts at time t;
/// static parts contribute 0.
double switched_envelope(const PotentialSpec& spec, double t);

/// Throws DomainError if a family invariant is violated.
void validate(const PotentialSpec& spec);

// Flat parameter view -------------------------------------------------------

/// Parameter names in family order. Moving centers contribute x0_um and v_cm_s
/// in place of x_c_um; composites concatenate parts with "part<i>." prefixes.
std::vector<std::string> parameter_names(const PotentialSpec& spec);

/// All parameters in parameter_names order.
std::vector<double> parameter_vector(const PotentialSpec& spec);

/// The parameters selected by mask. mask.size() must equal the family arity.
std::vector<double> parameter_vector(const PotentialSpec& spec, const std::vector<bool>& mask);

/// Returns spec with the masked parameters replaced by `values` (in order).
PotentialSpec with_parameters(const PotentialSpec& spec, std::span<const double> values,
                              const std::vector<bool>& mask);

/// Returns spec with all parameters replaced.
PotentialSpec with_parameters(const PotentialSpec& spec, std::span<const double> values);

/// Mask selecting the named parameters; throws ContractError for unknown names.
std::vector<bool> make_mask(const PotentialSpec& spec, const std::vector<std::string>& free_names);

}  // namespace mwshape
