#include "cuntzlab/cuntz.hpp"

#include "cuntzlab/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace cuntzlab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

namespace {

// Self-contained deterministic RNG (splitmix64 + Box-Muller) so witness
// searches reproduce bit-identically regardless of the standard library.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double gaussian() {
        const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }
};

Matrix random_unitary(int n, SplitMix64& rng) {
    Matrix g(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
    return unitary_polar_factor(g);
}

int worker_cap() {
    if (const char* env = std::getenv("CUNTZLAB_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed >= 1) return std::min(parsed, 16);
    }
    return 1;
}

} // namespace

TraceMeasure::TraceMeasure(SpaceRef space, std::vector<Rational> weights,
                           std::vector<int> matrix_size_at)
    : space_(std::move(space)), weights_(std::move(weights)),
      matrix_size_at_(std::move(matrix_size_at)) {
    if (!space_) throw ValidationError("trace measure requires a space");
    if (weights_.size() != space_->point_count() || matrix_size_at_.size() != space_->point_count()) {
        throw ValidationError("trace measure must cover every point");
    }
    Rational total(0);
    for (size_t i = 0; i < weights_.size(); ++i) {
        if (weights_[i] < 0) throw ValidationError("trace weights must be nonnegative");
        if (matrix_size_at_[i] < 1) throw ValidationError("matrix sizes must be positive");
        total += weights_[i];
    }
    if (total != 1) throw ValidationError("trace weights must sum to 1 exactly");
}

TraceMeasure TraceMeasure::uniform(SpaceRef space, int matrix_size) {
    const size_t count = space->point_count();
    std::vector<Rational> weights(count, make_rational(1, static_cast<long>(count)));
    std::vector<int> sizes(count, matrix_size);
    return TraceMeasure(std::move(space), std::move(weights), std::move(sizes));
}

TraceMeasure TraceMeasure::point_mass(SpaceRef space, const std::string& id, int matrix_size) {
    const size_t count = space->point_count();
    std::vector<Rational> weights(count, Rational(0));
    weights[space->index_of(id)] = 1;
    std::vector<int> sizes(count, matrix_size);
    return TraceMeasure(std::move(space), std::move(weights), std::move(sizes));
}

Rational dim_fn_value(const MatrixField& a, const TraceMeasure& mu, double tol) {
    if (a.space() != mu.space()) throw PreconditionError("field and measure live on different spaces");
    Rational total(0);
    for (size_t i = 0; i < a.point_count(); ++i) {
        if (mu.weight(i) == 0) continue;
        const int rank = rank_at(a, i, tol);
        total += mu.weight(i) * make_rational(rank, mu.matrix_size_at(i));
    }
    return total;
}

RankGapCertificate rank_gap_certificate(const MatrixField& a, const MatrixField& b,
                                        const std::vector<int>& dims_per_point, double tol) {
    if (a.space() != b.space()) throw PreconditionError("fields live on different spaces");
    if (dims_per_point.size() != a.point_count()) {
        throw PreconditionError("dimension data must cover every point");
    }
    for (size_t i : a.space()->sorted_order()) {
        const int gap_lhs = 2 * rank_at(a, i, tol) + dims_per_point[i] - 1;
        const int gap_rhs = 2 * rank_at(b, i, tol);
        if (gap_lhs > gap_rhs) {
            return {false, a.space()->point(i).id};
        }
    }
    return {true, std::nullopt};
}

RankGapCertificate rank_gap_certificate(const MatrixField& a, const MatrixField& b, double tol) {
    std::vector<int> dims(a.point_count(), a.space()->covering_dim());
    return rank_gap_certificate(a, b, dims, tol);
}

namespace {

struct RestartOutcome {
    double residual = std::numeric_limits<double>::infinity();
    std::vector<Matrix> witness;
};

// One candidate refinement at a single point.  Alternates the linearised
// trace-maximisation step with a polar projection back to the unitaries.
Matrix refine_alignment(const Matrix& left, Matrix u, const Matrix& right, int iters) {
    double previous = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < iters; ++it) {
        const Matrix m = left * u * right;
        u = unitary_polar_factor(m);
        double value = 0.0;
        const Matrix prod = u.adjoint() * m;
        for (int i = 0; i < prod.size(); ++i) value += prod(i, i).real();
        if (value - previous < 1e-14) break;
        previous = value;
    }
    return u;
}

} // namespace

WitnessSearchResult witness_search(const MatrixField& a_in, const MatrixField& b_in, int restarts,
                                   int iters, std::uint64_t seed) {
    if (a_in.space() != b_in.space()) throw PreconditionError("fields live on different spaces");
    if (restarts < 1) throw PreconditionError("witness_search: restarts must be >= 1");

    const int n = std::max(a_in.n(), b_in.n());
    const MatrixField a = (a_in.n() == n) ? a_in : embed_upper_left(a_in, n);
    const MatrixField b = (b_in.n() == n) ? b_in : embed_upper_left(b_in, n);
    const size_t points = a.point_count();

    std::vector<EigenSystem> a_eigs(points);
    std::vector<EigenSystem> b_eigs(points);
    std::vector<Matrix> sqrt_a(points);
    for (size_t i = 0; i < points; ++i) {
        a_eigs[i] = hermitian_eig(a.at(i));
        b_eigs[i] = hermitian_eig(b.at(i));
        sqrt_a[i] = sqrt_psd(a.at(i));
    }

    const auto descending_basis = [n](const EigenSystem& eig) {
        Matrix out(n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) out(i, j) = eig.vectors(i, n - 1 - j);
        return out;
    };

    const auto spectral_from = [n](const EigenSystem& eig, const std::function<double(double)>& fn) {
        Matrix out(n);
        for (int k = 0; k < n; ++k) {
            const double fv = fn(eig.values[static_cast<size_t>(k)]);
            if (fv == 0.0) continue;
            for (int i = 0; i < n; ++i) {
                const Complex vik = eig.vectors(i, k);
                if (vik == Complex(0.0, 0.0)) continue;
                for (int j = 0; j < n; ++j) out(i, j) += fv * vik * std::conj(eig.vectors(j, k));
            }
        }
        return out.hermitized();
    };

    const double deltas[] = {0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125};

    const auto run_restart = [&](int r) {
        SplitMix64 rng(seed * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(r) + 1);
        RestartOutcome outcome;
        outcome.witness.resize(points);
        double residual = 0.0;

        if (r % 2 == 1) {
            // Plain unitary candidate: v b v* keeps b's spectrum, the right
            // tool when a and b are unitarily close.
            for (size_t i = 0; i < points; ++i) {
                Matrix v = (r == 1) ? Matrix::identity(n) : random_unitary(n, rng);
                v = refine_alignment(a.at(i), v, b.at(i), iters);
                outcome.witness[i] = v;
            }
        } else {
            // Functional-calculus candidate sqrt(a) u sqrt(g_delta(b)).
            const double delta = deltas[(r / 2) % 6];
            const auto f_delta = [delta](double t) {
                if (t <= delta / 2.0) return 0.0;
                return std::min((2.0 * t - delta) / delta, 1.0);
            };
            const auto g_delta = [&](double t) { return (t <= delta / 2.0) ? 0.0 : f_delta(t) / t; };
            for (size_t i = 0; i < points; ++i) {
                const Matrix fb = spectral_from(b_eigs[i], f_delta);
                const Matrix sqrt_gb =
                    spectral_from(b_eigs[i], [&](double t) { return std::sqrt(std::max(0.0, g_delta(t))); });
                Matrix u = (r == 0) ? descending_basis(a_eigs[i]) * descending_basis(b_eigs[i]).adjoint()
                                    : random_unitary(n, rng);
                u = refine_alignment(a.at(i), u, fb, iters);
                outcome.witness[i] = sqrt_a[i] * u * sqrt_gb;
            }
        }

        for (size_t i : a.space()->sorted_order()) {
            const Matrix& v = outcome.witness[i];
            residual = std::max(residual,
                                operator_norm((v * b.at(i) * v.adjoint()).hermitized() - a.at(i)));
        }
        outcome.residual = residual;
        return outcome;
    };

    std::vector<RestartOutcome> outcomes(static_cast<size_t>(restarts));
    const int threads = std::min(worker_cap(), restarts);
    if (threads <= 1) {
        for (int r = 0; r < restarts; ++r) outcomes[static_cast<size_t>(r)] = run_restart(r);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&]() {
                for (int r = next.fetch_add(1); r < restarts; r = next.fetch_add(1)) {
                    outcomes[static_cast<size_t>(r)] = run_restart(r);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // Reduce by (residual, restart index), lexicographically.
    int best = 0;
    for (int r = 1; r < restarts; ++r) {
        if (outcomes[static_cast<size_t>(r)].residual < outcomes[static_cast<size_t>(best)].residual) {
            best = r;
        }
    }
    return WitnessSearchResult{outcomes[static_cast<size_t>(best)].residual,
                               OperatorField(a.space(), n, std::move(outcomes[static_cast<size_t>(best)].witness))};
}

bool LAffFunction::strictly_positive() const {
    for (const Rational& v : values) {
        if (v <= 0) return false;
    }
    return !values.empty();
}

CuntzClassRepr make_class(const MatrixField& a, CuntzClassRepr::Kind kind,
                          const std::vector<TraceMeasure>& traces, double tol, std::string label) {
    RankFunction ranks = rank_function(a, tol);
    if (kind == CuntzClassRepr::Kind::projection && !ranks.locally_constant_on_components()) {
        throw ValidationError("projection class requires locally constant rank on components");
    }
    LAffFunction iota;
    iota.values.reserve(traces.size());
    for (const TraceMeasure& mu : traces) iota.values.push_back(dim_fn_value(a, mu, tol));
    return CuntzClassRepr{kind, std::move(ranks), std::move(iota), std::move(label)};
}

WElement w_image(const MatrixField& a, const std::vector<TraceMeasure>& traces, double tol) {
    const bool projection_like =
        a.is_projection_field(1e-9) && rank_function(a, tol).locally_constant_on_components();
    if (projection_like) {
        return make_class(a, CuntzClassRepr::Kind::projection, traces, tol);
    }
    LAffFunction f;
    f.values.reserve(traces.size());
    for (const TraceMeasure& mu : traces) f.values.push_back(dim_fn_value(a, mu, tol));
    return f;
}

namespace {

const LAffFunction& iota_of(const WElement& e) {
    if (std::holds_alternative<CuntzClassRepr>(e)) return std::get<CuntzClassRepr>(e).iota;
    return std::get<LAffFunction>(e);
}

void check_trace_sets(const WElement& lhs, const WElement& rhs) {
    if (iota_of(lhs).values.size() != iota_of(rhs).values.size()) {
        throw PreconditionError("operands registered over different trace sets");
    }
}

LAffFunction sum_values(const LAffFunction& lhs, const LAffFunction& rhs) {
    LAffFunction out;
    out.values.reserve(lhs.values.size());
    for (size_t i = 0; i < lhs.values.size(); ++i) out.values.push_back(lhs.values[i] + rhs.values[i]);
    return out;
}

} // namespace

WElement w_add(const WElement& lhs, const WElement& rhs) {
    check_trace_sets(lhs, rhs);
    const auto* pl = std::get_if<CuntzClassRepr>(&lhs);
    const auto* pr = std::get_if<CuntzClassRepr>(&rhs);
    if (pl && pr && pl->kind == CuntzClassRepr::Kind::projection &&
        pr->kind == CuntzClassRepr::Kind::projection) {
        if (pl->rank_fn.space() != pr->rank_fn.space()) {
            throw PreconditionError("projection classes live on different spaces");
        }
        std::vector<int> ranks(pl->rank_fn.ranks());
        for (size_t i = 0; i < ranks.size(); ++i) ranks[i] += pr->rank_fn.at(i);
        std::string label = pl->label.empty() || pr->label.empty() ? std::string()
                                                                   : pl->label + "+" + pr->label;
        return CuntzClassRepr{CuntzClassRepr::Kind::projection,
                              RankFunction(pl->rank_fn.space(), pl->rank_fn.tol(), std::move(ranks)),
                              sum_values(pl->iota, pr->iota), std::move(label)};
    }
    return sum_values(iota_of(lhs), iota_of(rhs));
}

bool w_leq(const WElement& lhs, const WElement& rhs) {
    check_trace_sets(lhs, rhs);
    const auto* pl = std::get_if<CuntzClassRepr>(&lhs);
    const auto* pr = std::get_if<CuntzClassRepr>(&rhs);
    const bool lhs_proj = pl && pl->kind == CuntzClassRepr::Kind::projection;
    const bool rhs_proj = pr && pr->kind == CuntzClassRepr::Kind::projection;

    if (lhs_proj && rhs_proj) {
        if (pl->rank_fn.space() != pr->rank_fn.space()) {
            throw PreconditionError("projection classes live on different spaces");
        }
        for (size_t i = 0; i < pl->rank_fn.ranks().size(); ++i) {
            if (pl->rank_fn.at(i) > pr->rank_fn.at(i)) return false;
        }
        return true;
    }
    const LAffFunction& f = iota_of(lhs);
    const LAffFunction& g = iota_of(rhs);
    if (lhs_proj) {
        // projection <= soft demands strictness at every registered trace;
        // a tie refuses the comparison.
        for (size_t i = 0; i < f.values.size(); ++i) {
            if (!(f.values[i] < g.values[i])) return false;
        }
        return true;
    }
    for (size_t i = 0; i < f.values.size(); ++i) {
        if (f.values[i] > g.values[i]) return false;
    }
    return true;
}

OrderEmbeddingReport order_embedding_check(
    const std::vector<std::pair<MatrixField, MatrixField>>& instances,
    const std::vector<TraceMeasure>& mu_set, const std::vector<int>& dims_per_point, double tol) {
    OrderEmbeddingReport report;
    for (size_t idx = 0; idx < instances.size(); ++idx) {
        const auto& [a, b] = instances[idx];
        ++report.pairs_checked;
        const RankGapCertificate cert = rank_gap_certificate(a, b, dims_per_point, tol);
        if (!cert.holds) continue;
        ++report.certified;
        if (!w_leq(w_image(a, mu_set, tol), w_image(b, mu_set, tol))) {
            report.violations.push_back(idx);
        }
    }
    return report;
}

SpectralInvariant ell_invariant(const MatrixField& a, const std::vector<TraceMeasure>& mus,
                                int bins) {
    if (bins < 1) throw PreconditionError("ell_invariant: bins must be >= 1");
    // Half-open bins over [0,1] with a small upward snap so eigenvalues that
    // land on a boundary (up to solver noise) bin consistently.
    const auto bin_of = [bins](double lambda) {
        const double scaled = std::clamp(lambda, 0.0, 1.0) * bins + 1e-7;
        return std::min(bins - 1, static_cast<int>(std::floor(scaled)));
    };

    std::vector<std::vector<int>> histograms(a.point_count(),
                                             std::vector<int>(static_cast<size_t>(bins), 0));
    std::vector<bool> occupied(static_cast<size_t>(bins), false);
    for (size_t i = 0; i < a.point_count(); ++i) {
        const EigenSystem eig = hermitian_eig(a.at(i));
        for (double lambda : eig.values) {
            const int bin = bin_of(lambda);
            histograms[i][static_cast<size_t>(bin)] += 1;
            occupied[static_cast<size_t>(bin)] = true;
        }
    }

    SpectralInvariant out;
    out.bins = bins;
    for (int bin = 0; bin < bins; ++bin) {
        if (occupied[static_cast<size_t>(bin)]) out.spectrum.push_back(bin);
    }
    for (const TraceMeasure& mu : mus) {
        if (mu.space() != a.space()) throw PreconditionError("measure lives on a different space");
        std::vector<Rational> dist(static_cast<size_t>(bins), Rational(0));
        for (size_t i = 0; i < a.point_count(); ++i) {
            if (mu.weight(i) == 0) continue;
            for (int bin = 0; bin < bins; ++bin) {
                const int count = histograms[i][static_cast<size_t>(bin)];
                if (count == 0) continue;
                dist[static_cast<size_t>(bin)] += mu.weight(i) * make_rational(count, a.n());
            }
        }
        out.distributions.push_back(std::move(dist));
    }
    return out;
}

bool au_equivalent_candidates(const SpectralInvariant& lhs, const SpectralInvariant& rhs) {
    return lhs == rhs;
}

} // namespace cuntzlab
