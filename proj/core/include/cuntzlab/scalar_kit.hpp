#pragma once

#include <string>

namespace cuntzlab {

/// The six-piece scalar family used throughout the comparison arguments: a
/// ramp f that kills the spectrum below delta, its quotient g with
/// t*g(t) = f(t), a homotopy h_s from the identity to the capped ramp with
/// the companion quotient g_{delta,s} satisfying h_s * g_{delta,s} = f, and
/// the square-root homotopies r_s, w_s with f <= r_s * w_s <= 1.
///
/// f, h_s, r_s, w_s are self-maps of [0,1]; the quotients g, g_{delta,s}
/// peak at 1/delta (at t = delta), which is what their use under a square
/// root and a cut-down expects.
struct ScalarKit {
    double delta = 1.0; // in (0, 1]
    double s = 0.0;     // homotopy parameter in [0, 1]

    ScalarKit(double delta_value, double s_value);

    double f(double t) const;
    double g(double t) const;
    double h(double t) const;
    double g_s(double t) const;
    double r(double t) const;
    double w(double t) const;

    /// The cap min(2t/delta, 1); endpoint of the h homotopy.
    double h_one(double t) const;
};

enum class KitFunction { f, g, h, g_s, r, w };

KitFunction kit_function_from_name(const std::string& name);

double scalar_kit_eval(const ScalarKit& kit, KitFunction which, double t);

} // namespace cuntzlab
