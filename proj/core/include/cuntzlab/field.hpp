#pragma once

#include "cuntzlab/matrix.hpp"
#include "cuntzlab/space.hpp"

#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace cuntzlab {

/// Validation tolerances for positive matrix fields.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
/// Default threshold for counting an eigenvalue as contributing rank; well
/// separated from eigensolver error (~1e-12) and from modelling scales (>= 1e-3).
inline constexpr double kDefaultRankTol = 1e-8;

/// A positive n x n Hermitian matrix attached to every sample point: the
/// discretised picture of a positive element of M_n(C(X)).  Values are
/// validated on construction (Hermitian to 1e-12, smallest eigenvalue
/// >= -1e-10) and immutable afterwards.
class MatrixField {
public:
    MatrixField(SpaceRef space, int n, std::vector<Matrix> values);

    static MatrixField zero(SpaceRef space, int n);
    static MatrixField identity_field(SpaceRef space, int n);
    static MatrixField constant(SpaceRef space, const Matrix& value);
    static MatrixField from_function(SpaceRef space, int n,
                                     const std::function<Matrix(const SampledSpace::Point&)>& fn);

    const SpaceRef& space() const { return space_; }
    int n() const { return n_; }
    size_t point_count() const { return values_.size(); }
    const Matrix& at(size_t index) const { return values_[index]; }
    const Matrix& at_id(const std::string& id) const { return values_[space_->index_of(id)]; }
    const std::vector<Matrix>& values() const { return values_; }

    /// Sup norm of the field: max over sample points (in sorted-id order)
    /// of the per-point spectral norm.  The continuum sup over X is
    /// approximated by this sample max.
    double norm_bound() const;

    bool is_projection_field(double tol = 1e-9) const;

private:
    SpaceRef space_;
    int n_ = 0;
    std::vector<Matrix> values_;
};

/// A field of arbitrary (not necessarily positive) matrices: unitaries,
/// partial witnesses, products.  Shape-checked only.
class OperatorField {
public:
    OperatorField(SpaceRef space, int n, std::vector<Matrix> values);

    static OperatorField identity_field(SpaceRef space, int n);
    static OperatorField from_function(SpaceRef space, int n,
                                       const std::function<Matrix(const SampledSpace::Point&)>& fn);

    const SpaceRef& space() const { return space_; }
    int n() const { return n_; }
    size_t point_count() const { return values_.size(); }
    const Matrix& at(size_t index) const { return values_[index]; }
    const std::vector<Matrix>& values() const { return values_; }

    bool is_unitary(double tol = 1e-9) const;

private:
    SpaceRef space_;
    int n_ = 0;
    std::vector<Matrix> values_;
};

/// max over points of the operator norm of a(x) - b(x).
double max_opnorm_distance(const MatrixField& a, const MatrixField& b);
/// max over points and entries of |a(x)_ij - b(x)_ij|.
double max_entry_distance(const MatrixField& a, const MatrixField& b);

/// Pointwise block-diagonal join: realises the direct sum a (+) b.
MatrixField direct_sum(const MatrixField& a, const MatrixField& b);
/// a embedded pointwise in the upper-left corner of M_n.
MatrixField embed_upper_left(const MatrixField& a, int n);
/// Pointwise v(x) a(x) v(x)*; positivity survives conjugation.
MatrixField conjugate(const OperatorField& v, const MatrixField& a);

/// The cut-down (a - eps)_+: eigenvalues are replaced by max{0, lambda-eps}
/// in the same eigenbasis at every point.
MatrixField cut_down(const MatrixField& a, double eps);

/// Pointwise functional calculus with an arbitrary continuous scalar map.
MatrixField apply_scalar(const MatrixField& a, const std::function<double(double)>& fn);

/// Number of eigenvalues of a(x) strictly above tol.
int rank_at(const MatrixField& a, size_t point_index, double tol);
int rank_at_id(const MatrixField& a, const std::string& id, double tol);

/// The pointwise rank function together with its plateau partition.
class RankFunction {
public:
    RankFunction(SpaceRef space, double tol, std::vector<int> ranks);

    const SpaceRef& space() const { return space_; }
    double tol() const { return tol_; }
    const std::vector<int>& ranks() const { return ranks_; }
    int at(size_t index) const { return ranks_[index]; }

    /// Plateaus F_i = { x : rank(x) = n_i }, ordered by increasing rank.
    std::vector<std::pair<int, std::vector<size_t>>> plateaus() const;

    bool locally_constant_on_components() const;

private:
    SpaceRef space_;
    double tol_ = kDefaultRankTol;
    std::vector<int> ranks_;
};

RankFunction rank_function(const MatrixField& a, double tol);

/// Whether two rank functions agree pointwise (shared space assumed).
bool operator==(const RankFunction& lhs, const RankFunction& rhs);

/// Support data of a well-supported field: for each rank plateau, a
/// projection field over the plateau's sampled closure, nested upward in
/// the PSD order across shared closure points.
struct SupportData {
    struct Plateau {
        int rank = 0;
        std::vector<size_t> members;
        std::vector<size_t> closure;          // members plus adjacent points
        std::vector<Matrix> projections;      // parallel to closure
        std::optional<Matrix> projection_at(size_t point_index) const;
    };
    std::vector<Plateau> plateaus; // ranks strictly increasing
};

/// Checks the projection and nesting invariants; returns the largest
/// violation observed (<= tol means the data passes).
double support_data_violation(const SupportData& support);

struct WellSupportedApproximant {
    MatrixField h;
    MatrixField hah;
    MatrixField thresholded; // a with the spectrum below eta cut away
    SupportData support;
    double eta = 0.0;
};

/// For ||a|| <= 1 and 0 < eps < 1, produces h of norm <= 1 with
/// ||hah - a|| < eps, ||ha - a|| < eps/2, ||ah - a|| < eps/2 and hah
/// well-supported.  eta is the midpoint of the widest eigenvalue-free band
/// inside [eps/8, eps/4] over all sampled spectra (ties: larger gap first,
/// then smaller eta); when no band of usable width exists the sampled
/// spectra are dense across the threshold and a NumericalFailure asks the
/// caller to refine eps.
WellSupportedApproximant well_supported_approximant(const MatrixField& a, double eps,
                                                    double rank_tol = kDefaultRankTol);

/// ||a - sqrt(a) v f_delta(b) v* sqrt(a)|| for each delta in a strictly
/// decreasing schedule; the values are monotone nonincreasing.
std::vector<double> dini_curve(const MatrixField& a, const MatrixField& b, const OperatorField& v,
                               const std::vector<double>& deltas);

/// Largest delta of the form eps*2^(-j) with
/// rank((a-eps)_+(x)) + k <= rank((b-delta)_+(x)) at every point, given the
/// precondition rank(a(x)) + k <= rank(b(x)) everywhere.
double find_rank_delta(const MatrixField& a, const MatrixField& b, int k, double eps, double tol);

} // namespace cuntzlab
