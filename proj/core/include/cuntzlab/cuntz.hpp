#pragma once

#include "cuntzlab/field.hpp"
#include "cuntzlab/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cuntzlab {

/// Weighted point masses on a sampled space, together with the matrix size
/// of the algebra at each point; induces a dimension function on fields.
/// Weights are exact rationals summing to 1.
class TraceMeasure {
public:
    TraceMeasure(SpaceRef space, std::vector<Rational> weights, std::vector<int> matrix_size_at);

    static TraceMeasure uniform(SpaceRef space, int matrix_size);
    /// The extreme trace at one sample point: evaluation composed with the
    /// normalised matrix trace.
    static TraceMeasure point_mass(SpaceRef space, const std::string& id, int matrix_size);

    const SpaceRef& space() const { return space_; }
    const std::vector<Rational>& weights() const { return weights_; }
    const Rational& weight(size_t index) const { return weights_[index]; }
    int matrix_size_at(size_t index) const { return matrix_size_at_[index]; }
    const std::vector<int>& matrix_sizes() const { return matrix_size_at_; }

private:
    SpaceRef space_;
    std::vector<Rational> weights_;
    std::vector<int> matrix_size_at_;
};

/// d_mu(a) = sum_x weight(x) * rank(a(x), tol) / matrix_size_at(x), the
/// discretised lower semicontinuous dimension function.
Rational dim_fn_value(const MatrixField& a, const TraceMeasure& mu, double tol = kDefaultRankTol);

struct RankGapCertificate {
    bool holds = false;
    std::optional<std::string> witness; // first violating point in id order
};

/// Sufficient condition for a to be Cuntz subequivalent to b: at every
/// point, rank(a(x)) + (d(x)-1)/2 <= rank(b(x)).  A false certificate is
/// silence, not a disproof.
RankGapCertificate rank_gap_certificate(const MatrixField& a, const MatrixField& b,
                                        const std::vector<int>& dims_per_point,
                                        double tol = kDefaultRankTol);
/// Same, with the declared covering dimension of the space at every point.
RankGapCertificate rank_gap_certificate(const MatrixField& a, const MatrixField& b,
                                        double tol = kDefaultRankTol);

struct WitnessSearchResult {
    double residual = 0.0;
    OperatorField v;
};

/// Desk-scale numerical oracle for the defining relation v b v* ~ a.
/// Candidates are plain unitary fields and functional-calculus forms
/// sqrt(a) u sqrt(g_delta(b)); each restart refines its candidate per point
/// by alternating trace-maximisation steps with a polar-decomposition
/// projection back onto the unitary group.  Best (residual, restart index)
/// wins, so results are reproducible for a fixed seed.  Restart work is
/// independent; CUNTZLAB_THREADS caps how many run concurrently.
WitnessSearchResult witness_search(const MatrixField& a, const MatrixField& b, int restarts,
                                   int iters, std::uint64_t seed);

/// A lower semicontinuous affine function represented extensionally on the
/// finitely many registered traces.
struct LAffFunction {
    std::vector<Rational> values;

    bool strictly_positive() const;
};

/// A Cuntz class at the data level: either a genuine projection class
/// (rank data compares) or a soft class that only its dimension-function
/// image sees.
struct CuntzClassRepr {
    enum class Kind { projection, soft };

    Kind kind = Kind::soft;
    RankFunction rank_fn;
    LAffFunction iota;
    std::string label;
};

using WElement = std::variant<CuntzClassRepr, LAffFunction>;

/// Builds the class data of a field over a registered trace set; projection
/// kind requires locally constant rank on adjacency components.
CuntzClassRepr make_class(const MatrixField& a, CuntzClassRepr::Kind kind,
                          const std::vector<TraceMeasure>& traces, double tol = kDefaultRankTol,
                          std::string label = {});

/// The W-image of a field under id on projection classes and iota on soft
/// ones.
WElement w_image(const MatrixField& a, const std::vector<TraceMeasure>& traces,
                 double tol = kDefaultRankTol);

/// x +_W f = iota(x) + f; projection + projection stays a projection class.
WElement w_add(const WElement& lhs, const WElement& rhs);

/// The mixed order: projection x <=_W soft f iff iota(x) < f strictly at
/// every registered trace; soft f <=_W projection x iff f <= iota(x); both
/// pure cases compare pointwise.
bool w_leq(const WElement& lhs, const WElement& rhs);

struct OrderEmbeddingReport {
    size_t pairs_checked = 0;
    size_t certified = 0;
    std::vector<size_t> violations; // indices of certified pairs whose images fail w_leq
};

/// For every instance pair whose rank-gap certificate holds, asserts that
/// the W-images are ordered; violations are reported, not thrown.
OrderEmbeddingReport order_embedding_check(
    const std::vector<std::pair<MatrixField, MatrixField>>& instances,
    const std::vector<TraceMeasure>& mu_set, const std::vector<int>& dims_per_point,
    double tol = kDefaultRankTol);

/// Unitary-orbit invariant at the data level: the binned spectrum together
/// with, per registered trace, the weighted eigenvalue histogram.
struct SpectralInvariant {
    int bins = 1;
    std::vector<int> spectrum;                           // occupied bins, ascending
    std::vector<std::vector<Rational>> distributions;    // per trace, mass per bin (dense)

    friend bool operator==(const SpectralInvariant&, const SpectralInvariant&) = default;
};

SpectralInvariant ell_invariant(const MatrixField& a, const std::vector<TraceMeasure>& mus,
                                int bins);

/// Candidates for approximate unitary equivalence must match bin-exactly.
bool au_equivalent_candidates(const SpectralInvariant& lhs, const SpectralInvariant& rhs);

} // namespace cuntzlab
