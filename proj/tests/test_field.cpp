#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cuntzlab/errors.hpp>
#include <cuntzlab/field.hpp>

#include "support/generators.hpp"

#include <Eigen/Dense>

using namespace cuntzlab;
using testsupport::Rng;

namespace {

Matrix eigen_cut_down_oracle(const Matrix& m, double eps) {
    Eigen::MatrixXcd a(m.size(), m.size());
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j) a(i, j) = m(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
    Eigen::VectorXd cut = solver.eigenvalues();
    for (int k = 0; k < cut.size(); ++k) cut(k) = std::max(0.0, cut(k) - eps);
    const Eigen::MatrixXcd rebuilt =
        solver.eigenvectors() * cut.asDiagonal() * solver.eigenvectors().adjoint();
    Matrix out(m.size());
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j) out(i, j) = rebuilt(i, j);
    return out;
}

} // namespace

TEST_CASE("cut_down with eps=0 is the identity up to solver noise") {
    Rng rng(101);
    const SpaceRef space = testsupport::line_space(4);
    const MatrixField a = testsupport::random_psd_field(space, 3, rng);
    CHECK(max_entry_distance(cut_down(a, 0.0), a) <= 1e-12);
}

TEST_CASE("cut_down on a constant diagonal field") {
    const SpaceRef space = testsupport::line_space(3);
    const MatrixField a = MatrixField::constant(space, Matrix::diagonal({0.5, 1.0}));
    const MatrixField cut = cut_down(a, 0.75);
    for (size_t i = 0; i < cut.point_count(); ++i) {
        CHECK(std::abs(cut.at(i)(0, 0)) < 1e-15);
        CHECK(std::abs(cut.at(i)(1, 1) - Complex(0.25, 0.0)) < 1e-15);
    }
}

TEST_CASE("cut_down matches an independent eigendecomposition oracle") {
    Rng rng(102);
    const SpaceRef space = testsupport::line_space(4);
    const MatrixField a = testsupport::random_psd_field(space, 2, rng);
    const MatrixField cut = cut_down(a, 0.1);
    for (size_t i = 0; i < a.point_count(); ++i) {
        CHECK((cut.at(i) - eigen_cut_down_oracle(a.at(i), 0.1)).max_abs() < 1e-9);
    }
}

TEST_CASE("cut_down rejects negative eps") {
    const SpaceRef space = testsupport::line_space(2);
    const MatrixField a = MatrixField::identity_field(space, 2);
    CHECK_THROWS_AS(cut_down(a, -0.1), PreconditionError);
}

TEST_CASE("cut_down satisfies the semigroup law of the functional calculus") {
    Rng rng(103);
    const SpaceRef space = testsupport::line_space(5);
    for (int trial = 0; trial < 10; ++trial) {
        const MatrixField a = testsupport::random_psd_field(space, 3, rng);
        const double s = rng.uniform(0.0, 0.4);
        const double t = rng.uniform(0.0, 0.4);
        CHECK(max_entry_distance(cut_down(cut_down(a, s), t), cut_down(a, s + t)) <= 1e-9);
    }
}

TEST_CASE("cut_down never raises the rank") {
    Rng rng(104);
    const SpaceRef space = testsupport::line_space(5);
    for (int trial = 0; trial < 10; ++trial) {
        const MatrixField a = testsupport::random_psd_field(space, 3, rng);
        const double eps = rng.uniform(0.0, 0.8);
        const MatrixField cut = cut_down(a, eps);
        for (size_t i = 0; i < a.point_count(); ++i) {
            CHECK(rank_at(cut, i, kDefaultRankTol) <= rank_at(a, i, kDefaultRankTol));
        }
    }
}

TEST_CASE("apply_scalar basics") {
    Rng rng(105);
    const SpaceRef space = testsupport::line_space(3);
    const MatrixField a = testsupport::random_psd_field(space, 2, rng);

    SUBCASE("identity map returns the field") {
        CHECK(max_entry_distance(apply_scalar(a, [](double t) { return t; }), a) <= 1e-12);
    }
    SUBCASE("squaring a diagonal") {
        const MatrixField d = MatrixField::constant(space, Matrix::diagonal({0.3, 0.6}));
        const MatrixField sq = apply_scalar(d, [](double t) { return t * t; });
        CHECK(std::abs(sq.at(0)(0, 0) - Complex(0.09, 0.0)) < 1e-15);
        CHECK(std::abs(sq.at(0)(1, 1) - Complex(0.36, 0.0)) < 1e-15);
    }
    SUBCASE("a flat function fixes projections") {
        Rng prng(106);
        const Matrix p = testsupport::psd_with_eigenvalues({0.0, 1.0}, prng);
        const MatrixField proj = MatrixField::constant(space, p);
        const MatrixField mapped =
            apply_scalar(proj, [](double t) { return t > 0.5 ? 1.0 : 0.0; });
        CHECK(max_entry_distance(mapped, proj) <= 1e-12);
    }
}

TEST_CASE("rank_at examples") {
    const SpaceRef space = testsupport::line_space(2);
    CHECK(rank_at(MatrixField::zero(space, 3), 0, 1e-9) == 0);
    CHECK(rank_at(MatrixField::identity_field(space, 3), 0, 1e-9) == 3);
    const MatrixField tiny = MatrixField::constant(space, Matrix::diagonal({1.0, 1e-12}));
    CHECK(rank_at(tiny, 0, 1e-9) == 1);
    CHECK_THROWS_AS(rank_at(tiny, 0, 0.0), PreconditionError);
}

TEST_CASE("rank_function on diag(x, 1) over the 3-point interval") {
    const SpaceRef space = testsupport::line_space(3);
    const MatrixField a = MatrixField::from_function(space, 2, [](const SampledSpace::Point& p) {
        Matrix m(2);
        m(0, 0) = to_double(p.coords[0]);
        m(1, 1) = 1.0;
        return m;
    });
    const RankFunction ranks = rank_function(a, kDefaultRankTol);
    CHECK(ranks.at(space->index_of("0")) == 1);
    CHECK(ranks.at(space->index_of("1")) == 2);
    CHECK(ranks.at(space->index_of("2")) == 2);
    const auto plateaus = ranks.plateaus();
    REQUIRE(plateaus.size() == 2);
    CHECK(plateaus[0].first == 1);
    CHECK(plateaus[0].second.size() == 1);
    CHECK(plateaus[1].first == 2);
}

TEST_CASE("rank of a block sum is the sum of ranks") {
    Rng rng(107);
    const SpaceRef space = testsupport::line_space(4);
    const MatrixField a = testsupport::random_psd_field(space, 2, rng);
    const MatrixField b = testsupport::random_psd_field(space, 3, rng);
    const MatrixField sum = direct_sum(a, b);
    for (size_t i = 0; i < space->point_count(); ++i) {
        CHECK(rank_at(sum, i, kDefaultRankTol) ==
              rank_at(a, i, kDefaultRankTol) + rank_at(b, i, kDefaultRankTol));
    }
}

TEST_CASE("projection fields of constant rank have constant rank function") {
    Rng rng(108);
    const SpaceRef space = testsupport::line_space(3);
    const Matrix p = testsupport::psd_with_eigenvalues({0.0, 1.0, 1.0}, rng);
    const RankFunction ranks = rank_function(MatrixField::constant(space, p), kDefaultRankTol);
    for (int r : ranks.ranks()) CHECK(r == 2);
    CHECK(ranks.locally_constant_on_components());
}

TEST_CASE("field validation rejects broken inputs") {
    const SpaceRef space = testsupport::line_space(2);
    Matrix skew(2);
    skew(0, 1) = Complex(0.0, 1.0); // not Hermitian
    CHECK_THROWS_AS(MatrixField::constant(space, skew), ValidationError);
    CHECK_THROWS_AS(MatrixField::constant(space, Matrix::diagonal({-0.5, 1.0})), ValidationError);
    CHECK_THROWS_AS(MatrixField(space, 2, {}), ValidationError);
}

TEST_CASE("well-supported approximant of a projection field reproduces it") {
    Rng rng(109);
    const SpaceRef space = testsupport::line_space(3);
    const Matrix p = testsupport::psd_with_eigenvalues({0.0, 1.0}, rng);
    const MatrixField a = MatrixField::constant(space, p);
    const auto ws = well_supported_approximant(a, 0.5);
    CHECK(max_opnorm_distance(ws.hah, a) <= 1e-12);
    CHECK(support_data_violation(ws.support) <= 1e-9);
}

TEST_CASE("well-supported approximant of the scalar coordinate field") {
    const SpaceRef space = testsupport::line_space(5);
    const MatrixField a = MatrixField::from_function(space, 1, [](const SampledSpace::Point& p) {
        Matrix m(1);
        m(0, 0) = to_double(p.coords[0]);
        return m;
    });
    const double eps = 0.5;
    const auto ws = well_supported_approximant(a, eps);
    // eta is the midpoint of the empty window [eps/8, eps/4].
    CHECK(ws.eta == doctest::Approx(3.0 * eps / 16.0));
    for (size_t i = 0; i < space->point_count(); ++i) {
        const double x = to_double(space->point(i).coords[0]);
        const double oracle = (x > ws.eta) ? x : 0.0; // 1-d functional calculus
        CHECK(std::abs(ws.hah.at(i)(0, 0).real() - oracle) < 1e-9);
        if (oracle == 0.0) {
            CHECK(rank_at(ws.hah, i, kDefaultRankTol) == 0);
            CHECK(ws.hah.at(i).max_abs() == 0.0);
        }
    }
}

TEST_CASE("well-supported approximant scales the small eigenvalue of diag(eps/8, 1)") {
    const SpaceRef space = testsupport::line_space(2);
    const double eps = 0.4;
    const MatrixField a = MatrixField::constant(space, Matrix::diagonal({eps / 8.0, 1.0}));
    const auto ws = well_supported_approximant(a, eps);
    CHECK(max_opnorm_distance(ws.hah, a) <= eps / 8.0 + eps / 8.0);
    CHECK(max_opnorm_distance(ws.hah, a) < eps);
    CHECK(rank_at(ws.hah, 0, kDefaultRankTol) == 1);
}

TEST_CASE("well-supported approximant satisfies its norm contract on random fields") {
    Rng rng(110);
    int failures = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const SpaceRef space = testsupport::line_space(rng.uniform_int(2, 6));
        const MatrixField a = testsupport::random_psd_field(space, rng.uniform_int(1, 3), rng);
        const double eps = rng.uniform(0.15, 0.8);
        try {
            const auto ws = well_supported_approximant(a, eps);
            CHECK(ws.h.norm_bound() <= 1.0 + 1e-9);
            CHECK(max_opnorm_distance(ws.hah, a) < eps);
            const double ha = [&] {
                double worst = 0.0;
                for (size_t i = 0; i < a.point_count(); ++i) {
                    worst = std::max(worst, operator_norm(ws.h.at(i) * a.at(i) - a.at(i)));
                }
                return worst;
            }();
            CHECK(ha < eps / 2.0);
            CHECK(support_data_violation(ws.support) <= 1e-9);
            // The thresholded element and hah share support projections
            // pointwise (as matrices, not just ranks).
            const auto support_projection = [](const Matrix& m) {
                return apply_spectral(m, [](double t) { return t > kDefaultRankTol ? 1.0 : 0.0; });
            };
            for (size_t i = 0; i < a.point_count(); ++i) {
                CHECK((support_projection(ws.thresholded.at(i)) -
                       support_projection(ws.hah.at(i)))
                          .max_abs() <= 1e-9);
            }
        } catch (const NumericalFailure&) {
            ++failures; // dense spectra across the window; rate reported below
        }
    }
    CHECK(failures <= 2);
}

TEST_CASE("eta selection fails loudly when spectra are dense across the window") {
    const SpaceRef space = testsupport::line_space(3);
    // eps = 1e-8 puts the window at [1.25e-9, 2.5e-9]; these eigenvalues
    // leave no gap of width 1e-9 anywhere inside it.
    const double eps = 1e-8;
    const MatrixField a = MatrixField::from_function(space, 2, [](const SampledSpace::Point& p) {
        const double x = to_double(p.coords[0]);
        return Matrix::diagonal({1.6e-9 + 0.2e-9 * x, 2.1e-9 - 0.2e-9 * x});
    });
    CHECK_THROWS_WITH_AS(well_supported_approximant(a, eps), doctest::Contains("dense"),
                         NumericalFailure);
}

TEST_CASE("well_supported_approximant validates its inputs") {
    const SpaceRef space = testsupport::line_space(2);
    const MatrixField a = MatrixField::identity_field(space, 2);
    CHECK_THROWS_AS(well_supported_approximant(a, 0.0), PreconditionError);
    CHECK_THROWS_AS(well_supported_approximant(a, 1.0), PreconditionError);
    const MatrixField big = MatrixField::constant(space, Matrix::diagonal({2.0}));
    CHECK_THROWS_AS(well_supported_approximant(big, 0.5), PreconditionError);
}

TEST_CASE("dini curve is zero for the identity instance and for a = 0") {
    const SpaceRef space = testsupport::line_space(3);
    const MatrixField one = MatrixField::identity_field(space, 2);
    const OperatorField v = OperatorField::identity_field(space, 2);
    const std::vector<double> deltas{0.5, 0.25, 0.1};
    for (double value : dini_curve(one, one, v, deltas)) CHECK(value <= 1e-12);
    const MatrixField zero = MatrixField::zero(space, 2);
    for (double value : dini_curve(zero, one, v, deltas)) CHECK(value <= 1e-12);
}

TEST_CASE("dini curve matches the scalar oracle on commuting diagonal fields") {
    Rng rng(111);
    const SpaceRef space = testsupport::line_space(4);
    std::vector<std::vector<double>> a_diag(space->point_count());
    std::vector<std::vector<double>> b_diag(space->point_count());
    for (size_t i = 0; i < space->point_count(); ++i) {
        for (int k = 0; k < 2; ++k) {
            const double bv = rng.uniform(0.2, 1.0);
            b_diag[i].push_back(bv);
            a_diag[i].push_back(bv * rng.uniform(0.0, 1.0)); // a <= b entrywise
        }
    }
    const MatrixField a = MatrixField::from_function(space, 2, [&](const SampledSpace::Point& p) {
        return Matrix::diagonal(a_diag[space->index_of(p.id)]);
    });
    const MatrixField b = MatrixField::from_function(space, 2, [&](const SampledSpace::Point& p) {
        return Matrix::diagonal(b_diag[space->index_of(p.id)]);
    });
    const OperatorField v = OperatorField::identity_field(space, 2);
    const std::vector<double> deltas{0.4, 0.2, 0.1, 0.05};
    const auto curve = dini_curve(a, b, v, deltas);

    for (size_t d = 0; d < deltas.size(); ++d) {
        double oracle = 0.0;
        for (size_t i = 0; i < space->point_count(); ++i) {
            for (int k = 0; k < 2; ++k) {
                const double t = b_diag[i][static_cast<size_t>(k)];
                const double delta = deltas[d];
                double fd = 0.0;
                if (t > delta) fd = 1.0;
                else if (t > delta / 2.0) fd = (2.0 * t - delta) / delta;
                oracle = std::max(oracle, std::abs(a_diag[i][static_cast<size_t>(k)] * (1.0 - fd)));
            }
        }
        CHECK(curve[d] == doctest::Approx(oracle).epsilon(1e-9));
    }
    for (size_t d = 0; d + 1 < curve.size(); ++d) CHECK(curve[d + 1] <= curve[d] + 1e-10);
}

TEST_CASE("dini curve is monotone on random instances and rejects non-unitary v") {
    Rng rng(112);
    const std::vector<double> deltas{0.5, 0.3, 0.2, 0.1, 0.05, 0.01};
    for (int trial = 0; trial < 20; ++trial) {
        const SpaceRef space = testsupport::line_space(rng.uniform_int(2, 6));
        const int n = rng.uniform_int(1, 3);
        const MatrixField a = testsupport::random_psd_field(space, n, rng);
        const MatrixField b = testsupport::random_psd_field(space, n, rng);
        const OperatorField v = testsupport::random_unitary_field(space, n, rng);
        const auto curve = dini_curve(a, b, v, deltas);
        for (size_t d = 0; d + 1 < curve.size(); ++d) CHECK(curve[d + 1] <= curve[d] + 1e-10);
    }
    const SpaceRef space = testsupport::line_space(2);
    const MatrixField one = MatrixField::identity_field(space, 2);
    const OperatorField bad = OperatorField::from_function(space, 2, [](const auto&) {
        Matrix m(2);
        m(0, 0) = 0.5; // not unitary
        return m;
    });
    CHECK_THROWS_AS(dini_curve(one, one, bad, {0.5, 0.1}), PreconditionError);
}

TEST_CASE("find_rank_delta basics") {
    const SpaceRef space = testsupport::line_space(3);

    SUBCASE("a = 0 succeeds at the first grid value") {
        const MatrixField zero = MatrixField::zero(space, 2);
        const MatrixField b = MatrixField::identity_field(space, 2);
        CHECK(find_rank_delta(zero, b, 0, 0.25, kDefaultRankTol) == 0.25);
    }
    SUBCASE("diag(1) against diag(1,1) with k = 1") {
        const MatrixField a = MatrixField::constant(space, Matrix::diagonal({1.0}));
        const MatrixField b = MatrixField::identity_field(space, 2);
        CHECK(find_rank_delta(a, b, 1, 0.5, kDefaultRankTol) == 0.5);
    }
    SUBCASE("an eigenvalue exactly at the candidate pushes to the next grid value") {
        const double tol = 1e-6;
        const MatrixField a = MatrixField::constant(space, Matrix::diagonal({0.7}));
        const MatrixField b = MatrixField::constant(space, Matrix::diagonal({0.5 + tol}));
        CHECK(find_rank_delta(a, b, 0, 0.5, tol) == 0.25);
    }
    SUBCASE("precondition violations name a witnessing point") {
        const MatrixField a = MatrixField::identity_field(space, 2);
        const MatrixField b = MatrixField::zero(space, 2);
        CHECK_THROWS_WITH_AS(find_rank_delta(a, b, 0, 0.5, kDefaultRankTol),
                             doctest::Contains("\"0\""), PreconditionError);
    }
}

TEST_CASE("conjugation by a unitary field preserves spectra") {
    Rng rng(113);
    const SpaceRef space = testsupport::line_space(3);
    const MatrixField a = testsupport::random_psd_field(space, 3, rng);
    const OperatorField u = testsupport::random_unitary_field(space, 3, rng);
    const MatrixField conj = conjugate(u, a);
    for (size_t i = 0; i < a.point_count(); ++i) {
        const auto lhs = hermitian_eig(a.at(i)).values;
        const auto rhs = hermitian_eig(conj.at(i)).values;
        for (size_t k = 0; k < lhs.size(); ++k) CHECK(lhs[k] == doctest::Approx(rhs[k]).epsilon(1e-10));
    }
}
