#include "cuntzlab/scalar_kit.hpp"

#include "cuntzlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cuntzlab {

ScalarKit::ScalarKit(double delta_value, double s_value) : delta(delta_value), s(s_value) {
    if (!(delta > 0.0) || delta > 1.0) throw PreconditionError("scalar kit: delta must lie in (0,1]");
    if (s < 0.0 || s > 1.0) throw PreconditionError("scalar kit: s must lie in [0,1]");
}

double ScalarKit::f(double t) const {
    if (t <= delta / 2.0) return 0.0;
    if (t < delta) return (2.0 * t - delta) / delta;
    return 1.0;
}

double ScalarKit::g(double t) const {
    if (t <= delta / 2.0) return 0.0;
    return f(t) / t;
}

double ScalarKit::h_one(double t) const { return std::min(2.0 * t / delta, 1.0); }

double ScalarKit::h(double t) const { return (1.0 - s) * t + s * h_one(t); }

double ScalarKit::g_s(double t) const {
    if (t <= delta / 2.0) return 0.0;
    return f(t) / h(t);
}

double ScalarKit::r(double t) const { return std::max(s, std::sqrt(h_one(t))); }

double ScalarKit::w(double t) const {
    // g_{delta,1} equals f beyond delta/2 (the cap is 1 there) and 0 below.
    const double g_delta_one = (t <= delta / 2.0) ? 0.0 : f(t);
    return std::max(s, std::sqrt(g_delta_one));
}

KitFunction kit_function_from_name(const std::string& name) {
    if (name == "f") return KitFunction::f;
    if (name == "g") return KitFunction::g;
    if (name == "h") return KitFunction::h;
    if (name == "g_s") return KitFunction::g_s;
    if (name == "r") return KitFunction::r;
    if (name == "w") return KitFunction::w;
    throw ValidationError("unknown kit function \"" + name + "\"");
}

double scalar_kit_eval(const ScalarKit& kit, KitFunction which, double t) {
    if (t < 0.0 || t > 1.0) throw PreconditionError("scalar kit: t must lie in [0,1]");
    switch (which) {
        case KitFunction::f: return kit.f(t);
        case KitFunction::g: return kit.g(t);
        case KitFunction::h: return kit.h(t);
        case KitFunction::g_s: return kit.g_s(t);
        case KitFunction::r: return kit.r(t);
        case KitFunction::w: return kit.w(t);
    }
    throw Error("unreachable");
}

} // namespace cuntzlab
