#pragma once

#include <cuntzlab/field.hpp>
#include <cuntzlab/matrix.hpp>
#include <cuntzlab/space.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

// Seeded instance generators shared by the unit tests and the acceptance
// suite.  The RNG is self-contained so seeds mean the same thing everywhere.
namespace testsupport {

struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi_inclusive) {
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi_inclusive - lo + 1));
    }
    double gaussian() {
        const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
};

inline cuntzlab::Matrix random_gaussian(int n, Rng& rng) {
    cuntzlab::Matrix g(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = cuntzlab::Complex(rng.gaussian(), rng.gaussian());
    return g;
}

inline cuntzlab::Matrix random_unitary(int n, Rng& rng) {
    return cuntzlab::unitary_polar_factor(random_gaussian(n, rng));
}

/// U diag(eigenvalues) U* for a random unitary U.
inline cuntzlab::Matrix psd_with_eigenvalues(const std::vector<double>& eigenvalues, Rng& rng) {
    const int n = static_cast<int>(eigenvalues.size());
    const cuntzlab::Matrix u = random_unitary(n, rng);
    cuntzlab::Matrix d(n);
    for (int i = 0; i < n; ++i) d(i, i) = eigenvalues[static_cast<size_t>(i)];
    return (u * d * u.adjoint()).hermitized();
}

inline cuntzlab::Matrix random_psd(int n, Rng& rng, double norm_cap = 1.0) {
    std::vector<double> eigenvalues(static_cast<size_t>(n));
    for (auto& v : eigenvalues) v = rng.uniform(0.0, norm_cap);
    return psd_with_eigenvalues(eigenvalues, rng);
}

inline cuntzlab::MatrixField random_psd_field(cuntzlab::SpaceRef space, int n, Rng& rng,
                                              double norm_cap = 1.0) {
    std::vector<cuntzlab::Matrix> values;
    values.reserve(space->point_count());
    for (size_t i = 0; i < space->point_count(); ++i) values.push_back(random_psd(n, rng, norm_cap));
    return cuntzlab::MatrixField(std::move(space), n, std::move(values));
}

/// A field whose rank at point i is ranks[i], with the contributing
/// eigenvalues kept in [low, high] (clear of rank tolerances).
inline cuntzlab::MatrixField field_with_rank_profile(cuntzlab::SpaceRef space, int n,
                                                     const std::vector<int>& ranks, Rng& rng,
                                                     double low = 0.4, double high = 1.0) {
    std::vector<cuntzlab::Matrix> values;
    values.reserve(space->point_count());
    for (size_t i = 0; i < space->point_count(); ++i) {
        std::vector<double> eigenvalues(static_cast<size_t>(n), 0.0);
        for (int k = 0; k < ranks[i]; ++k) eigenvalues[static_cast<size_t>(k)] = rng.uniform(low, high);
        values.push_back(psd_with_eigenvalues(eigenvalues, rng));
    }
    return cuntzlab::MatrixField(std::move(space), n, std::move(values));
}

/// A path of `count` samples of [0,1] (grid of one axis).
inline cuntzlab::SpaceRef line_space(int count) {
    return cuntzlab::make_grid({1}, count - 1);
}

inline cuntzlab::OperatorField random_unitary_field(cuntzlab::SpaceRef space, int n, Rng& rng) {
    std::vector<cuntzlab::Matrix> values;
    values.reserve(space->point_count());
    for (size_t i = 0; i < space->point_count(); ++i) values.push_back(random_unitary(n, rng));
    return cuntzlab::OperatorField(std::move(space), n, std::move(values));
}

} // namespace testsupport
