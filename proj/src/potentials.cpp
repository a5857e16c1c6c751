#include "mwshape/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mwshape/constants.hpp"
#include "mwshape/errors.hpp"

namespace mwshape {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double sq(double v) { return v * v; }

// Parameter accessors per family, as (name, reference) pairs.
template <typename F>
void for_each_parameter(CosineWell& w, F&& f) {
  f("V0_uK", w.V0);
  f("t0_us", w.t0);
  f("tau_us", w.tau);
  f("sigma_x_um", w.sigma_x);
  if (auto* c = std::get_if<FixedCenter>(&w.center)) {
    f("x_c_um", c->x_c);
  } else {
    auto& m = std::get<MovingCenter>(w.center);
    f("x0_um", m.x0);
    f("v_cm_s", m.v_cm_s);
  }
  f("phi_rad", w.phi);
}

template <typename F>
void for_each_parameter(TriangleSplitter& s, F&& f) {
  f("V0_uK", s.V0);
  f("t0_us", s.t0);
  f("tau_us", s.tau);
  f("sigma_x_um", s.sigma_x);
  f("v_cm_s", s.v_cm_s);
}

template <typename F>
void for_each_parameter(TwoRampSplitter& s, F&& f) {
  f("V0_uK", s.V0);
  f("t0_us", s.t0);
  f("tau_us", s.tau);
  f("sigma_um", s.sigma);
  f("v_cm_s", s.v_cm_s);
  f("x1_um", s.x1);
  f("v2_cm_s", s.v2_cm_s);
  f("x2_um", s.x2);
}

template <typename F>
void for_each_parameter(ParabolicWall& w, F&& f) {
  f("x_b_um", w.x_b);
  f("curvature_uK_um2", w.curvature);
}

template <typename F>
void for_each_parameter(HarmonicTrap& h, F&& f) {
  f("x_c_um", h.x_c);
  f("omega_rad_s", h.omega);
}

template <typename F>
void for_each_parameter(ConstantPotential& c, F&& f) {
  f("value_uK", c.value);
}

template <typename F>
void for_each_parameter(NoPotential&, F&&) {}

template <typename F>
void for_each_parameter(PotentialSpec& spec, const std::string& prefix, F&& f);

template <typename F>
void for_each_parameter(Composite& c, const std::string& prefix, F&& f) {
  for (std::size_t i = 0; i < c.parts.size(); ++i)
    for_each_parameter(c.parts[i], prefix + "part" + std::to_string(i) + ".", f);
}

template <typename F>
void for_each_parameter(PotentialSpec& spec, const std::string& prefix, F&& f) {
  std::visit(
      [&](auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Composite>) {
          for_each_parameter(fam, prefix, f);
        } else {
          for_each_parameter(fam, [&](const char* name, double& ref) { f(prefix + name, ref); });
        }
      },
      spec.variant());
}

double harmonic_uK(double omega_rad_s, double dx) {
  const double w = units::per_s_to_per_us(omega_rad_s);
  return units::internal_to_uK(0.5 * w * w * dx * dx / units::hbar_over_m);
}

void add_into(const PotentialSpec& spec, const Grid1D& grid, double t, double offset,
              std::span<double> out) {
  const std::size_t n = grid.size();
  const double x0 = grid.x_min() + offset;
  const double dx = grid.dx();
  std::visit(
      overloaded{
          [](const NoPotential&) {},
          [&](const CosineWell& w) {
            const double env = quartic_envelope(t, w.t0, w.tau);
            const double xc = w.center_at(t);
            const double outside = -w.V0 * sq(std::sin(w.phi));
            const double half = 0.5 * w.sigma_x;
            const double scale = std::numbers::pi / w.sigma_x;
            for (std::size_t i = 0; i < n; ++i) {
              const double y = x0 + static_cast<double>(i) * dx - xc;
              out[i] += std::abs(y) <= half ? -w.V0 * env * sq(std::cos(scale * y + w.phi))
                                            : outside;
            }
          },
          [&](const TriangleSplitter& s) {
            const double env = quartic_envelope(t, s.t0, s.tau);
            const double xc = units::cm_s_to_um_us(s.v_cm_s) * t;
            const double half = 0.5 * s.sigma_x;
            const double slope = 2.0 * s.V0 * env / s.sigma_x;
            for (std::size_t i = 0; i < n; ++i) {
              const double y = std::abs(x0 + static_cast<double>(i) * dx - xc);
              out[i] += y <= half ? -slope * y : -s.V0;
            }
          },
          [&](const TwoRampSplitter& s) {
            const double a1 = s.V0 * quartic_envelope(t, s.t0, s.tau);
            const double a2 = s.V0 * quartic_envelope(t, s.t0 + 2.0 * s.tau, s.tau);
            const double c1 = units::cm_s_to_um_us(s.v_cm_s) * t + s.x1;
            const double c2 = units::cm_s_to_um_us(s.v2_cm_s) * t + s.x2;
            for (std::size_t i = 0; i < n; ++i) {
              const double x = x0 + static_cast<double>(i) * dx;
              const double v = a1 * (1.0 - std::abs(x - c1) / s.sigma) +
                               a2 * (1.0 - std::abs(x - c2) / s.sigma);
              out[i] += std::max(v, 0.0);
            }
          },
          [&](const ParabolicWall& w) {
            for (std::size_t i = 0; i < n; ++i) {
              const double y = x0 + static_cast<double>(i) * dx - w.x_b;
              if (y > 0.0) out[i] += 0.5 * w.curvature * y * y;
            }
          },
          [&](const HarmonicTrap& h) {
            for (std::size_t i = 0; i < n; ++i)
              out[i] += harmonic_uK(h.omega, x0 + static_cast<double>(i) * dx - h.x_c);
          },
          [&](const ConstantPotential& c) {
            for (std::size_t i = 0; i < n; ++i) out[i] += c.value;
          },
          [&](const Composite& c) {
            for (const auto& part : c.parts) add_into(part, grid, t, offset, out);
          },
      },
      spec.variant());
}

}  // namespace

double quartic_envelope(double t, double t0, double tau) {
  const double u = (t - t0) / tau;
  const double u2 = u * u;
  return std::exp(-u2 * u2);
}

double CosineWell::center_at(double t) const {
  if (const auto* c = std::get_if<FixedCenter>(&center)) return c->x_c;
  const auto& m = std::get<MovingCenter>(center);
  return m.x0 + units::cm_s_to_um_us(m.v_cm_s) * t;
}

PotentialSpec::PotentialSpec() : v_(NoPotential{}) {}

std::string PotentialSpec::family() const {
  return std::visit(overloaded{
                        [](const NoPotential&) { return std::string("none"); },
                        [](const CosineWell&) { return std::string("cosine_well"); },
                        [](const TriangleSplitter&) { return std::string("triangle_splitter"); },
                        [](const TwoRampSplitter&) { return std::string("two_ramp_splitter"); },
                        [](const ParabolicWall&) { return std::string("parabolic_wall"); },
                        [](const HarmonicTrap&) { return std::string("harmonic"); },
                        [](const ConstantPotential&) { return std::string("constant"); },
                        [](const Composite&) { return std::string("composite"); },
                    },
                    v_);
}

std::vector<double> evaluate(const PotentialSpec& spec, const Grid1D& grid, double t) {
  std::vector<double> out(grid.size(), 0.0);
  add_into(spec, grid, t, 0.0, out);
  return out;
}

void evaluate_into(const PotentialSpec& spec, const Grid1D& grid, double t, double offset,
                   std::span<double> out) {
  if (out.size() != grid.size()) throw ContractError("evaluate_into: output size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  add_into(spec, grid, t, offset, out);
}

double evaluate_at(const PotentialSpec& spec, double x, double t) {
  // A 4-point grid starting at x; only the first value is used.
  const Grid1D g(x, x + 4.0, 4);
  double out[4] = {0.0, 0.0, 0.0, 0.0};
  add_into(spec, g, t, 0.0, out);
  return out[0];
}

double switched_envelope(const PotentialSpec& spec, double t) {
  return std::visit(
      overloaded{
          [&](const CosineWell& w) { return quartic_envelope(t, w.t0, w.tau); },
          [&](const TriangleSplitter& s) { return quartic_envelope(t, s.t0, s.tau); },
          [&](const TwoRampSplitter& s) {
            return std::max(quartic_envelope(t, s.t0, s.tau),
                            quartic_envelope(t, s.t0 + 2.0 * s.tau, s.tau));
          },
          [&](const Composite& c) {
            double e = 0.0;
            for (const auto& p : c.parts) e = std::max(e, switched_envelope(p, t));
            return e;
          },
          [](const auto&) { return 0.0; },
      },
      spec.variant());
}

void validate(const PotentialSpec& spec) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw DomainError("potential: " + what);
  };
  std::visit(overloaded{
                 [&](const CosineWell& w) {
                   require(w.V0 >= 0.0, "cosine_well V0 must be >= 0");
                   require(w.tau > 0.0, "cosine_well tau must be > 0");
                   require(w.sigma_x > 0.0, "cosine_well sigma_x must be > 0");
                 },
                 [&](const TriangleSplitter& s) {
                   require(s.V0 >= 0.0, "triangle_splitter V0 must be >= 0");
                   require(s.tau > 0.0, "triangle_splitter tau must be > 0");
                   require(s.sigma_x > 0.0, "triangle_splitter sigma_x must be > 0");
                 },
                 [&](const TwoRampSplitter& s) {
                   require(s.V0 >= 0.0, "two_ramp_splitter V0 must be >= 0");
                   require(s.tau > 0.0, "two_ramp_splitter tau must be > 0");
                   require(s.sigma > 0.0, "two_ramp_splitter sigma must be > 0");
                 },
                 [&](const ParabolicWall& w) {
                   require(w.curvature > 0.0, "parabolic_wall curvature must be > 0");
                 },
                 [&](const HarmonicTrap& h) { require(h.omega > 0.0, "harmonic omega must be > 0"); },
                 [&](const Composite& c) {
                   for (const auto& p : c.parts) validate(p);
                 },
                 [](const auto&) {},
             },
             spec.variant());
}

std::vector<std::string> parameter_names(const PotentialSpec& spec) {
  std::vector<std::string> names;
  PotentialSpec copy = spec;
  for_each_parameter(copy, "", [&](const std::string& n, double&) { names.push_back(n); });
  return names;
}

std::vector<double> parameter_vector(const PotentialSpec& spec) {
  std::vector<double> values;
  PotentialSpec copy = spec;
  for_each_parameter(copy, "", [&](const std::string&, double& v) { values.push_back(v); });
  return values;
}

std::vector<double> parameter_vector(const PotentialSpec& spec, const std::vector<bool>& mask) {
  const auto all = parameter_vector(spec);
  if (mask.size() != all.size())
    throw ContractError("parameter_vector: mask has " + std::to_string(mask.size()) +
                        " entries, family has " + std::to_string(all.size()) + " parameters");
  std::vector<double> out;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (mask[i]) out.push_back(all[i]);
  return out;
}

PotentialSpec with_parameters(const PotentialSpec& spec, std::span<const double> values,
                              const std::vector<bool>& mask) {
  PotentialSpec out = spec;
  std::size_t arity = 0;
  std::size_t used = 0;
  const auto free_count = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  if (free_count != values.size())
    throw ContractError("with_parameters: " + std::to_string(values.size()) +
                        " values for " + std::to_string(free_count) + " free parameters");
  for_each_parameter(out, "", [&](const std::string&, double& ref) {
    if (arity < mask.size() && mask[arity]) ref = values[used++];
    ++arity;
  });
  if (arity != mask.size())
    throw ContractError("with_parameters: mask has " + std::to_string(mask.size()) +
                        " entries, family has " + std::to_string(arity) + " parameters");
  return out;
}

PotentialSpec with_parameters(const PotentialSpec& spec, std::span<const double> values) {
  return with_parameters(spec, values, std::vector<bool>(parameter_names(spec).size(), true));
}

std::vector<bool> make_mask(const PotentialSpec& spec, const std::vector<std::string>& free_names) {
  const auto names = parameter_names(spec);
  std::vector<bool> mask(names.size(), false);
  for (const auto& f : free_names) {
    auto it = std::find(names.begin(), names.end(), f);
    if (it == names.end()) throw ContractError("unknown parameter '" + f + "' for " + spec.family());
    mask[static_cast<std::size_t>(it - names.begin())] = true;
  }
  return mask;
}

}  // namespace mwshape
