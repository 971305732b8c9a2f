#include "cuntzlab/field.hpp"

#include "cuntzlab/errors.hpp"
#include "cuntzlab/scalar_kit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace cuntzlab {

namespace {

std::vector<EigenSystem> eigensystems(const MatrixField& a) {
    std::vector<EigenSystem> out;
    out.reserve(a.point_count());
    for (size_t i = 0; i < a.point_count(); ++i) out.push_back(hermitian_eig(a.at(i)));
    return out;
}

Matrix projection_onto_columns(const EigenSystem& eig, int first_column, int last_column) {
    const int n = eig.vectors.size();
    Matrix p(n);
    for (int k = first_column; k < last_column; ++k) {
        for (int i = 0; i < n; ++i) {
            const Complex vik = eig.vectors(i, k);
            if (vik == Complex(0.0, 0.0)) continue;
            for (int j = 0; j < n; ++j) p(i, j) += vik * std::conj(eig.vectors(j, k));
        }
    }
    return p.hermitized();
}

int count_above(const std::vector<double>& ascending_values, double threshold) {
    int count = 0;
    for (double v : ascending_values)
        if (v > threshold) ++count;
    return count;
}

} // namespace

MatrixField::MatrixField(SpaceRef space, int n, std::vector<Matrix> values)
    : space_(std::move(space)), n_(n), values_(std::move(values)) {
    if (!space_) throw ValidationError("field requires a space");
    if (n_ <= 0) throw ValidationError("field requires a positive matrix size");
    if (values_.size() != space_->point_count()) {
        throw ValidationError("field must carry one value per sample point");
    }
    for (size_t i = 0; i < values_.size(); ++i) {
        const Matrix& m = values_[i];
        if (m.size() != n_) {
            throw ValidationError("field value at \"" + space_->point(i).id + "\" has wrong size");
        }
        if (!m.is_hermitian(kHermitianTol)) {
            throw ValidationError("field value at \"" + space_->point(i).id + "\" is not Hermitian");
        }
        if (min_eigenvalue(m) < -kPsdTol) {
            throw ValidationError("field value at \"" + space_->point(i).id +
                                  "\" is not positive semidefinite");
        }
    }
}

MatrixField MatrixField::zero(SpaceRef space, int n) {
    std::vector<Matrix> values(space->point_count(), Matrix::zero(n));
    return MatrixField(std::move(space), n, std::move(values));
}

MatrixField MatrixField::identity_field(SpaceRef space, int n) {
    std::vector<Matrix> values(space->point_count(), Matrix::identity(n));
    return MatrixField(std::move(space), n, std::move(values));
}

MatrixField MatrixField::constant(SpaceRef space, const Matrix& value) {
    std::vector<Matrix> values(space->point_count(), value);
    return MatrixField(std::move(space), value.size(), std::move(values));
}

MatrixField MatrixField::from_function(
    SpaceRef space, int n, const std::function<Matrix(const SampledSpace::Point&)>& fn) {
    std::vector<Matrix> values;
    values.reserve(space->point_count());
    for (size_t i = 0; i < space->point_count(); ++i) values.push_back(fn(space->point(i)));
    return MatrixField(std::move(space), n, std::move(values));
}

double MatrixField::norm_bound() const {
    double bound = 0.0;
    for (size_t i : space_->sorted_order()) bound = std::max(bound, operator_norm(values_[i]));
    return bound;
}

bool MatrixField::is_projection_field(double tol) const {
    for (size_t i = 0; i < values_.size(); ++i) {
        const Matrix& m = values_[i];
        if ((m * m - m).max_abs() > tol) return false;
    }
    return true;
}

OperatorField::OperatorField(SpaceRef space, int n, std::vector<Matrix> values)
    : space_(std::move(space)), n_(n), values_(std::move(values)) {
    if (!space_) throw ValidationError("field requires a space");
    if (n_ <= 0) throw ValidationError("field requires a positive matrix size");
    if (values_.size() != space_->point_count()) {
        throw ValidationError("field must carry one value per sample point");
    }
    for (size_t i = 0; i < values_.size(); ++i) {
        if (values_[i].size() != n_) {
            throw ValidationError("field value at \"" + space_->point(i).id + "\" has wrong size");
        }
    }
}

OperatorField OperatorField::identity_field(SpaceRef space, int n) {
    std::vector<Matrix> values(space->point_count(), Matrix::identity(n));
    return OperatorField(std::move(space), n, std::move(values));
}

OperatorField OperatorField::from_function(
    SpaceRef space, int n, const std::function<Matrix(const SampledSpace::Point&)>& fn) {
    std::vector<Matrix> values;
    values.reserve(space->point_count());
    for (size_t i = 0; i < space->point_count(); ++i) values.push_back(fn(space->point(i)));
    return OperatorField(std::move(space), n, std::move(values));
}

bool OperatorField::is_unitary(double tol) const {
    for (const Matrix& u : values_) {
        if ((u * u.adjoint() - Matrix::identity(n_)).max_abs() > tol) return false;
    }
    return true;
}

double max_opnorm_distance(const MatrixField& a, const MatrixField& b) {
    if (a.space() != b.space()) throw PreconditionError("fields live on different spaces");
    if (a.n() != b.n()) throw PreconditionError("fields have different matrix sizes");
    double m = 0.0;
    for (size_t i : a.space()->sorted_order()) m = std::max(m, operator_norm(a.at(i) - b.at(i)));
    return m;
}

double max_entry_distance(const MatrixField& a, const MatrixField& b) {
    if (a.space() != b.space()) throw PreconditionError("fields live on different spaces");
    if (a.n() != b.n()) throw PreconditionError("fields have different matrix sizes");
    double m = 0.0;
    for (size_t i : a.space()->sorted_order()) m = std::max(m, (a.at(i) - b.at(i)).max_abs());
    return m;
}

MatrixField direct_sum(const MatrixField& a, const MatrixField& b) {
    if (a.space() != b.space()) throw PreconditionError("fields live on different spaces");
    std::vector<Matrix> values;
    values.reserve(a.point_count());
    for (size_t i = 0; i < a.point_count(); ++i) values.push_back(direct_sum(a.at(i), b.at(i)));
    return MatrixField(a.space(), a.n() + b.n(), std::move(values));
}

MatrixField embed_upper_left(const MatrixField& a, int n) {
    std::vector<Matrix> values;
    values.reserve(a.point_count());
    for (size_t i = 0; i < a.point_count(); ++i) values.push_back(embed_upper_left(a.at(i), n));
    return MatrixField(a.space(), n, std::move(values));
}

MatrixField conjugate(const OperatorField& v, const MatrixField& a) {
    if (v.space() != a.space()) throw PreconditionError("fields live on different spaces");
    std::vector<Matrix> values;
    values.reserve(a.point_count());
    for (size_t i = 0; i < a.point_count(); ++i) {
        values.push_back((v.at(i) * a.at(i) * v.at(i).adjoint()).hermitized());
    }
    return MatrixField(a.space(), a.n(), std::move(values));
}

MatrixField cut_down(const MatrixField& a, double eps) {
    if (eps < 0.0) throw PreconditionError("cut_down: eps must be nonnegative");
    return apply_scalar(a, [eps](double t) { return std::max(0.0, t - eps); });
}

MatrixField apply_scalar(const MatrixField& a, const std::function<double(double)>& fn) {
    std::vector<Matrix> values;
    values.reserve(a.point_count());
    for (size_t i = 0; i < a.point_count(); ++i) values.push_back(apply_spectral(a.at(i), fn));
    return MatrixField(a.space(), a.n(), std::move(values));
}

int rank_at(const MatrixField& a, size_t point_index, double tol) {
    if (tol <= 0.0) throw PreconditionError("rank_at: tol must be positive");
    const EigenSystem eig = hermitian_eig(a.at(point_index));
    return count_above(eig.values, tol);
}

int rank_at_id(const MatrixField& a, const std::string& id, double tol) {
    return rank_at(a, a.space()->index_of(id), tol);
}

RankFunction::RankFunction(SpaceRef space, double tol, std::vector<int> ranks)
    : space_(std::move(space)), tol_(tol), ranks_(std::move(ranks)) {
    if (ranks_.size() != space_->point_count()) {
        throw ValidationError("rank function must cover every point");
    }
}

std::vector<std::pair<int, std::vector<size_t>>> RankFunction::plateaus() const {
    std::map<int, std::vector<size_t>> by_rank;
    for (size_t i = 0; i < ranks_.size(); ++i) by_rank[ranks_[i]].push_back(i);
    return {by_rank.begin(), by_rank.end()};
}

bool RankFunction::locally_constant_on_components() const {
    for (size_t i = 0; i < ranks_.size(); ++i) {
        for (size_t j : space_->neighbors(i)) {
            if (ranks_[i] != ranks_[j]) return false;
        }
    }
    return true;
}

RankFunction rank_function(const MatrixField& a, double tol) {
    std::vector<int> ranks(a.point_count());
    for (size_t i = 0; i < a.point_count(); ++i) ranks[i] = rank_at(a, i, tol);
    return RankFunction(a.space(), tol, std::move(ranks));
}

bool operator==(const RankFunction& lhs, const RankFunction& rhs) {
    return lhs.space() == rhs.space() && lhs.ranks() == rhs.ranks();
}

std::optional<Matrix> SupportData::Plateau::projection_at(size_t point_index) const {
    for (size_t k = 0; k < closure.size(); ++k) {
        if (closure[k] == point_index) return projections[k];
    }
    return std::nullopt;
}

double support_data_violation(const SupportData& support) {
    double worst = 0.0;
    for (size_t i = 0; i < support.plateaus.size(); ++i) {
        const auto& plateau = support.plateaus[i];
        if (i + 1 < support.plateaus.size() &&
            plateau.rank >= support.plateaus[i + 1].rank) {
            return 1.0; // rank values must be strictly increasing
        }
        for (const Matrix& p : plateau.projections) {
            worst = std::max(worst, (p * p - p).max_abs());
            worst = std::max(worst, (p - p.adjoint()).max_abs());
        }
        for (size_t j = i; j < support.plateaus.size(); ++j) {
            const auto& upper = support.plateaus[j];
            for (size_t k = 0; k < plateau.closure.size(); ++k) {
                const auto q = upper.projection_at(plateau.closure[k]);
                if (!q) continue;
                worst = std::max(worst, -min_eigenvalue(*q - plateau.projections[k]));
            }
        }
    }
    return worst;
}

WellSupportedApproximant well_supported_approximant(const MatrixField& a, double eps,
                                                    double rank_tol) {
    if (!(eps > 0.0) || eps >= 1.0) {
        throw PreconditionError("well_supported_approximant: eps must lie in (0,1)");
    }
    if (a.norm_bound() > 1.0 + 1e-9) {
        throw PreconditionError("well_supported_approximant: field norm must be at most 1");
    }

    const std::vector<EigenSystem> eigs = eigensystems(a);

    // Widest eigenvalue-free band inside [eps/8, eps/4].
    const double lo = eps / 8.0;
    const double hi = eps / 4.0;
    std::vector<double> inside;
    for (const auto& eig : eigs) {
        for (double v : eig.values) {
            if (v >= lo && v <= hi) inside.push_back(v);
        }
    }
    std::sort(inside.begin(), inside.end());
    double best_width = -1.0;
    double best_eta = 0.0;
    double left = lo;
    for (size_t k = 0; k <= inside.size(); ++k) {
        const double right = (k < inside.size()) ? inside[k] : hi;
        const double width = right - left;
        if (width > best_width + 1e-18) {
            best_width = width;
            best_eta = 0.5 * (left + right);
        }
        if (k < inside.size()) left = inside[k];
    }
    constexpr double kMinBandWidth = 1e-9;
    if (best_width < kMinBandWidth) {
        std::ostringstream msg;
        msg << "no admissible eta: sampled spectra are dense across the threshold window ["
            << lo << ", " << hi << "] (widest gap " << best_width
            << "); refine eps and retry";
        throw NumericalFailure(msg.str());
    }
    const double eta = best_eta;

    // Thresholded element: spectrum below eta cut away in place.  The ramp
    // min(t/eta, 1) then maps what is left onto the support projection.
    std::vector<Matrix> thresholded_values;
    std::vector<Matrix> h_values;
    thresholded_values.reserve(a.point_count());
    h_values.reserve(a.point_count());
    for (size_t i = 0; i < a.point_count(); ++i) {
        const EigenSystem& eig = eigs[i];
        const int n = a.n();
        Matrix t(n);
        Matrix h(n);
        for (int k = 0; k < n; ++k) {
            const double lambda = eig.values[static_cast<size_t>(k)];
            if (lambda <= eta) continue;
            const double ramp = std::min(lambda / eta, 1.0);
            for (int r = 0; r < n; ++r) {
                const Complex vrk = eig.vectors(r, k);
                if (vrk == Complex(0.0, 0.0)) continue;
                for (int c = 0; c < n; ++c) {
                    const Complex outer = vrk * std::conj(eig.vectors(c, k));
                    t(r, c) += lambda * outer;
                    h(r, c) += ramp * outer;
                }
            }
        }
        thresholded_values.push_back(t.hermitized());
        h_values.push_back(h.hermitized());
    }
    MatrixField thresholded(a.space(), a.n(), std::move(thresholded_values));
    MatrixField h(a.space(), a.n(), std::move(h_values));

    std::vector<Matrix> hah_values;
    hah_values.reserve(a.point_count());
    for (size_t i = 0; i < a.point_count(); ++i) {
        hah_values.push_back((h.at(i) * a.at(i) * h.at(i)).hermitized());
    }
    MatrixField hah(a.space(), a.n(), std::move(hah_values));

    // Support data: plateau projections come from one eigendecomposition of
    // hah per point, so nested plateaus share eigenvectors and the PSD
    // nesting holds by construction.
    const std::vector<EigenSystem> hah_eigs = eigensystems(hah);
    const RankFunction ranks = rank_function(hah, rank_tol);
    SupportData support;
    for (const auto& [rank_value, members] : ranks.plateaus()) {
        SupportData::Plateau plateau;
        plateau.rank = rank_value;
        plateau.members = members;
        ClosedRegion closure = closed_neighborhood(ClosedRegion(a.space(), members));
        plateau.closure = closure.members();
        for (size_t idx : plateau.closure) {
            const int n = a.n();
            plateau.projections.push_back(
                projection_onto_columns(hah_eigs[idx], n - rank_value, n));
        }
        support.plateaus.push_back(std::move(plateau));
    }

    return WellSupportedApproximant{std::move(h), std::move(hah), std::move(thresholded),
                                    std::move(support), eta};
}

std::vector<double> dini_curve(const MatrixField& a, const MatrixField& b, const OperatorField& v,
                               const std::vector<double>& deltas) {
    if (a.space() != b.space() || a.space() != v.space()) {
        throw PreconditionError("dini_curve: fields live on different spaces");
    }
    if (a.norm_bound() > 1.0 + 1e-9 || b.norm_bound() > 1.0 + 1e-9) {
        throw PreconditionError("dini_curve: field norms must be at most 1");
    }
    if (!v.is_unitary(1e-9)) {
        throw PreconditionError("dini_curve: v is not pointwise unitary");
    }
    for (size_t k = 0; k + 1 < deltas.size(); ++k) {
        if (!(deltas[k] > deltas[k + 1])) {
            throw PreconditionError("dini_curve: deltas must be strictly decreasing");
        }
    }
    if (!deltas.empty() && !(deltas.back() > 0.0)) {
        throw PreconditionError("dini_curve: deltas must be positive");
    }

    std::vector<Matrix> sqrt_a;
    std::vector<EigenSystem> b_eigs;
    sqrt_a.reserve(a.point_count());
    b_eigs.reserve(a.point_count());
    for (size_t i = 0; i < a.point_count(); ++i) {
        sqrt_a.push_back(sqrt_psd(a.at(i)));
        b_eigs.push_back(hermitian_eig(b.at(i)));
    }

    std::vector<double> curve;
    curve.reserve(deltas.size());
    for (double delta : deltas) {
        const ScalarKit kit(std::min(delta, 1.0), 0.0);
        double worst = 0.0;
        for (size_t i : a.space()->sorted_order()) {
            const int n = a.n();
            Matrix fb(n);
            for (int k = 0; k < n; ++k) {
                const double fv = kit.f(std::clamp(b_eigs[i].values[static_cast<size_t>(k)], 0.0, 1.0));
                if (fv == 0.0) continue;
                for (int r = 0; r < n; ++r) {
                    const Complex vrk = b_eigs[i].vectors(r, k);
                    if (vrk == Complex(0.0, 0.0)) continue;
                    for (int c = 0; c < n; ++c) fb(r, c) += fv * vrk * std::conj(b_eigs[i].vectors(c, k));
                }
            }
            const Matrix inner = v.at(i) * fb * v.at(i).adjoint();
            const Matrix diff = a.at(i) - (sqrt_a[i] * inner * sqrt_a[i]).hermitized();
            worst = std::max(worst, operator_norm(diff));
        }
        curve.push_back(worst);
    }
    return curve;
}

double find_rank_delta(const MatrixField& a, const MatrixField& b, int k, double eps, double tol) {
    if (a.space() != b.space()) throw PreconditionError("fields live on different spaces");
    if (k < 0) throw PreconditionError("find_rank_delta: k must be nonnegative");
    if (!(eps > 0.0)) throw PreconditionError("find_rank_delta: eps must be positive");
    if (!(tol > 0.0)) throw PreconditionError("find_rank_delta: tol must be positive");

    std::vector<std::vector<double>> a_values(a.point_count());
    std::vector<std::vector<double>> b_values(b.point_count());
    for (size_t i = 0; i < a.point_count(); ++i) {
        a_values[i] = hermitian_eig(a.at(i)).values;
        b_values[i] = hermitian_eig(b.at(i)).values;
        if (count_above(a_values[i], tol) + k > count_above(b_values[i], tol)) {
            throw PreconditionError("find_rank_delta: rank gap precondition fails at \"" +
                                    a.space()->point(i).id + "\"");
        }
    }

    // Eigenvalues of (a-eps)_+ are max{0, lambda-eps}, so the cut-down rank
    // at tol counts lambda > eps + tol.
    for (int j = 0; j <= 200; ++j) {
        const double delta = eps * std::pow(2.0, -j);
        bool ok = true;
        for (size_t i = 0; i < a.point_count() && ok; ++i) {
            ok = count_above(a_values[i], eps + tol) + k <= count_above(b_values[i], delta + tol);
        }
        if (ok) return delta;
    }
    throw NumericalFailure("find_rank_delta: no delta on the geometric grid satisfied the gap");
}

} // namespace cuntzlab
