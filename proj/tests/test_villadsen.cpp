#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cuntzlab/errors.hpp>
#include <cuntzlab/rsh.hpp>
#include <cuntzlab/villadsen.hpp>

#include "support/generators.hpp"

using namespace cuntzlab;
using testsupport::Rng;

namespace {

VilladsenParams factorial_params(size_t stages) {
    // n_j + l_j = j + 1 makes m_i = (i+1)!.
    VilladsenParams p;
    p.m0 = 1;
    p.n0 = 2;
    for (size_t j = 1; j <= stages; ++j) {
        p.n_seq.emplace_back(static_cast<long>(j));
        p.l_seq.emplace_back(1);
    }
    p.target_r = make_rational(1, 100);
    return p;
}

DiscreteMeasure1D coin(const Rational& first_mass) {
    DiscreteMeasure1D m;
    m.atoms = {{Rational(0), first_mass}, {make_rational(1, 2), Rational(1) - first_mass}};
    return m;
}

MarginalMeasure random_product(size_t dim, Rng& rng) {
    std::vector<DiscreteMeasure1D> marginals;
    for (size_t c = 0; c < dim; ++c) {
        marginals.push_back(coin(make_rational(rng.uniform_int(0, 8), 8)));
    }
    return MarginalMeasure::product(std::move(marginals));
}

} // namespace

TEST_CASE("stage invariants: base case and recurrences") {
    VilladsenParams p;
    p.m0 = 3;
    p.n0 = 5;
    p.n_seq = {BigInt(2), BigInt(4), BigInt(6)};
    p.l_seq = {BigInt(1), BigInt(0), BigInt(2)};
    p.target_r = make_rational(1, 2);

    const StageInvariants s0 = stage_invariants(p, 0);
    CHECK(s0.m_i == 3);
    CHECK(s0.N_i == 5);
    CHECK(s0.rc_i == make_rational(4, 6));

    const auto table = stage_table(p, 3);
    for (size_t i = 1; i < table.size(); ++i) {
        CHECK(table[i].m_i == table[i - 1].m_i * (p.n_seq[i - 1] + p.l_seq[i - 1]));
        CHECK(table[i].N_i == table[i - 1].N_i * p.n_seq[i - 1]);
        CHECK(table[i].rc_i == make_rational(table[i].N_i - 1, 2 * table[i].m_i));
        CHECK(table[i].ratio_i == make_rational(table[i].N_i, 2 * table[i].m_i));
    }
    CHECK_THROWS_AS(stage_invariants(p, 4), PreconditionError);
}

TEST_CASE("rc_i agrees exactly with the homogeneous rc bound") {
    VilladsenParams p;
    p.m0 = 1;
    p.n0 = 2;
    p.n_seq = {BigInt(2), BigInt(3)};
    p.l_seq = {BigInt(1), BigInt(0)};
    p.target_r = make_rational(1, 2);
    for (size_t i = 0; i <= 2; ++i) {
        const StageInvariants s = stage_invariants(p, i);
        const RshDecomposition homogeneous = RshDecomposition::homogeneous(
            "stage", SampledSpace::single_point("cube", static_cast<int>(s.N_i.get_si())),
            static_cast<int>(s.m_i.get_si()));
        CHECK(rc_upper_bound(homogeneous) == s.rc_i);
    }
}

TEST_CASE("validate_params: all-zero l keeps the ratio constant and fails (iii)") {
    VilladsenParams p;
    p.m0 = 2;
    p.n0 = 3;
    p.n_seq = {BigInt(2), BigInt(4), BigInt(8)};
    p.l_seq = {BigInt(0), BigInt(0), BigInt(0)};
    p.target_r = make_rational(3, 4);
    const ParamsReport report = validate_params(p, 3);
    for (const auto& ratio : report.running_ratios) CHECK(ratio == make_rational(3, 4));
    CHECK_FALSE(report.nonzero_l_ok);
    CHECK(report.convergence_ok); // the constant ratio sits on the target
    CHECK(report.growth_ok);
}

TEST_CASE("validate_params: one huge correction telescopes toward the target") {
    VilladsenParams p;
    p.m0 = 1;
    p.n0 = 2;
    const long big = 10000000;
    p.n_seq = {BigInt(big), BigInt(2 * big), BigInt(4 * big)};
    p.l_seq = {BigInt(1), BigInt(0), BigInt(0)};
    p.target_r = Rational(1);
    const ParamsReport report = validate_params(p, 3);
    CHECK(report.growth_ok);
    CHECK(report.nonzero_l_ok);
    // Exact telescoping: ratio_i = big/(big+1) from stage 1 on.
    CHECK(report.running_ratios[0] == Rational(1));
    for (size_t i = 1; i < report.running_ratios.size(); ++i) {
        CHECK(report.running_ratios[i] == make_rational(big, big + 1));
    }
    CHECK(report.convergence_ok);
    CHECK(report.final_gap == make_rational(1, big + 1));
}

TEST_CASE("validate_params: factorial-style m_i witnesses every q up to 10") {
    const VilladsenParams p = factorial_params(10);
    const ParamsReport report = validate_params(p, 10, 10);
    CHECK(report.divisibility_ok);
    const auto table = stage_table(p, 10);
    BigInt factorial(1);
    for (size_t i = 0; i <= 10; ++i) {
        CHECK(table[i].m_i == factorial);
        factorial *= static_cast<long>(i + 2);
    }
}

TEST_CASE("k0 divisibility witnesses") {
    SUBCASE("factorial pattern: least stage for q is driven by the largest prime factor") {
        const K0Report report = k0_divisibility(factorial_params(10), 8);
        CHECK(report.all_witnessed);
        CHECK(report.witnesses[0] == std::pair<long, std::optional<size_t>>{1, 0});
        CHECK(*report.witnesses[1].second == 1); // 2 | 2!
        CHECK(*report.witnesses[6].second == 6); // 7 | 7!
    }
    SUBCASE("powers of two never witness q = 3") {
        VilladsenParams p;
        p.m0 = 1;
        p.n0 = 2;
        p.n_seq = {BigInt(1), BigInt(1), BigInt(1)};
        p.l_seq = {BigInt(1), BigInt(1), BigInt(1)};
        p.target_r = make_rational(1, 2);
        const K0Report report = k0_divisibility(p, 3);
        CHECK_FALSE(report.all_witnessed);
        CHECK_FALSE(report.witnesses[2].second.has_value());
    }
}

TEST_CASE("chern obstruction inequality") {
    VilladsenParams p;
    p.m0 = 1;
    p.n0 = 4;
    p.n_seq = {BigInt(4), BigInt(16), BigInt(64), BigInt(256)};
    p.l_seq = {BigInt(1), BigInt(1), BigInt(1), BigInt(1)};
    p.target_r = make_rational(1, 2);

    SUBCASE("maximal rank forces the right side to zero") {
        const StageInvariants s1 = stage_invariants(p, 1);
        const auto report = chern_obstruction_holds(p, 1, 3, s1.N_i, make_rational(1, 2));
        CHECK(report.holds);
        CHECK(report.rhs == Rational(0));
    }
    SUBCASE("with l identically zero the check reduces to rank positivity") {
        VilladsenParams q = p;
        q.l_seq = {BigInt(0), BigInt(0), BigInt(0), BigInt(0)};
        CHECK_FALSE(chern_obstruction_holds(q, 0, 2, BigInt(0), make_rational(1, 4)).holds);
        CHECK(chern_obstruction_holds(q, 0, 2, BigInt(1), make_rational(1, 4)).holds);
    }
    SUBCASE("a growing-l instance keeps the refined product below one across the prefix") {
        const StageInvariants s1 = stage_invariants(p, 1);
        const BigInt rank_a = (s1.m_i / 4) + 1; // past (eta/2) m_i for eta = 1/2
        for (size_t j = 2; j <= 4; ++j) {
            const auto report = chern_obstruction_holds(p, 1, j, rank_a, make_rational(1, 2));
            CHECK(report.refined_evaluated);
            CHECK(report.refined_below_one);
            CHECK(report.holds);
        }
    }
    SUBCASE("below the rank floor the refined form is not evaluated") {
        const auto report = chern_obstruction_holds(p, 1, 2, BigInt(1), make_rational(1, 2));
        CHECK_FALSE(report.refined_evaluated);
    }
    SUBCASE("holds is monotone in rank_a") {
        Rng rng(401);
        for (int trial = 0; trial < 10; ++trial) {
            const size_t j = static_cast<size_t>(rng.uniform_int(2, 4));
            bool seen_true = false;
            const StageInvariants s0 = stage_invariants(p, 0);
            for (BigInt rank_a(0); rank_a <= s0.N_i; ++rank_a) {
                const bool holds =
                    chern_obstruction_holds(p, 0, j, rank_a, make_rational(1, 3)).holds;
                if (seen_true) CHECK(holds);
                seen_true = seen_true || holds;
            }
        }
    }
    SUBCASE("bad indices and eta are rejected") {
        CHECK_THROWS_AS(chern_obstruction_holds(p, 2, 2, BigInt(1), make_rational(1, 2)),
                        PreconditionError);
        CHECK_THROWS_AS(chern_obstruction_holds(p, 0, 2, BigInt(1), Rational(1)),
                        PreconditionError);
    }
}

TEST_CASE("rank bound check sits exactly at the eta/2 threshold") {
    VilladsenParams p;
    p.m0 = 4;
    p.n0 = 3;
    p.n_seq = {BigInt(5)};
    p.l_seq = {BigInt(3)};
    p.target_r = make_rational(2, 7);
    // m_1 = 32; eta = 1/2 puts the floor at 8.
    CHECK_FALSE(rank_bound_check(p, 1, BigInt(8), make_rational(1, 2)));
    CHECK(rank_bound_check(p, 1, BigInt(9), make_rational(1, 2)));
}

TEST_CASE("pushforward of a point mass averages its coordinate blocks") {
    std::vector<Rational> point{Rational(0), make_rational(1, 2), Rational(1), Rational(0)};
    const MarginalMeasure mu = MarginalMeasure::point_mass(point);
    const MarginalMeasure out = pushforward(mu, 2, 0, {}, true);
    CHECK(out.dim() == 2);
    const auto table = expand(out);
    CHECK(table.at({Rational(0), make_rational(1, 2)}) == make_rational(1, 2));
    CHECK(table.at({Rational(1), Rational(0)}) == make_rational(1, 2));
}

TEST_CASE("products with identical marginals are pushforward fixed points") {
    const DiscreteMeasure1D nu = coin(make_rational(1, 4));
    const MarginalMeasure mu = MarginalMeasure::product({nu, nu, nu, nu});
    const MarginalMeasure out = pushforward(mu, 2, 0, {}, true);
    CHECK(total_variation(out, MarginalMeasure::product({nu, nu})) == Rational(0));
}

TEST_CASE("pushforward preserves total mass exactly, atoms included") {
    Rng rng(402);
    const MarginalMeasure mu = random_product(6, rng);
    const std::vector<WeightedAtom> atoms{
        {make_rational(1, 3), {Rational(0), Rational(0)}},
        {make_rational(2, 3), {Rational(1), make_rational(1, 2)}}};
    const MarginalMeasure exact = pushforward(mu, 3, 2, atoms, true);
    CHECK(exact.total_mass() == Rational(1));
    CHECK(exact.atom_mass() == make_rational(2, 5)); // l/(n+l)
    const MarginalMeasure simplified = pushforward(mu, 3, 2, atoms, false);
    CHECK(simplified.total_mass() == Rational(1));
    CHECK(simplified.atom_mass() == Rational(0));
    CHECK_THROWS_AS(pushforward(mu, 3, 2, {}, true), PreconditionError);
    CHECK_THROWS_AS(pushforward(mu, 4, 0, {}, true), PreconditionError);
}

TEST_CASE("the exact and simplified pushforwards differ by the atom weight") {
    Rng rng(403);
    const MarginalMeasure mu = random_product(4, rng);
    const std::vector<WeightedAtom> atoms{{Rational(1), {Rational(0), Rational(0)}}};
    const MarginalMeasure exact = pushforward(mu, 2, 1, atoms, true);
    const MarginalMeasure simplified = pushforward(mu, 2, 1, atoms, false);
    // Total-variation gap is at most twice the dropped mass l/(n+l) = 1/3.
    CHECK(total_variation(exact, simplified) <= make_rational(2, 3));
}

TEST_CASE("pushforward with l = 0 is a total-variation contraction") {
    Rng rng(404);
    for (int trial = 0; trial < 15; ++trial) {
        const MarginalMeasure mu = random_product(4, rng);
        const MarginalMeasure nu = random_product(4, rng);
        const Rational before = total_variation(mu, nu);
        const Rational after = total_variation(pushforward(mu, 2, 0, {}, true),
                                               pushforward(nu, 2, 0, {}, true));
        CHECK(after <= before);
    }
}

TEST_CASE("intertwine defect: perfect nesting gives bound zero") {
    const auto defect = intertwine_defect(2, 4, 16);
    CHECK(defect.l_count == 8);
    CHECK(defect.bound == Rational(0));
}

TEST_CASE("intertwine defect for (2, 5, 20): L = 8, bound 2/5") {
    const auto defect = intertwine_defect(2, 5, 20);
    CHECK(defect.l_count == 8);
    CHECK(defect.bound == make_rational(2, 5));
}

TEST_CASE("intertwine defect bound lies in [0,2] and shrinks along a doubling family") {
    // Odd M1 keeps the blocks misaligned, so the bound is nontrivial but
    // still dies off as M1/N1 and N2/M1 blow up.
    Rational last(2);
    for (long k = 1; k <= 6; ++k) {
        const long m1 = (1L << k) + 1;
        const long n2 = m1 * (1L << k);
        const auto defect = intertwine_defect(2, m1, n2);
        CHECK(defect.bound >= Rational(0));
        CHECK(defect.bound <= Rational(2));
        last = defect.bound;
    }
    CHECK(last < make_rational(1, 10));
    CHECK_THROWS_AS(intertwine_defect(5, 2, 20), PreconditionError);
}

TEST_CASE("gamma fixes identical-marginal products") {
    const DiscreteMeasure1D nu = coin(make_rational(3, 8));
    const MarginalMeasure mu = MarginalMeasure::product({nu, nu, nu, nu, nu});
    const MarginalMeasure out = intertwine_apply(mu, IntertwineDirection::gamma, 2, 5, 20);
    CHECK(out.dim() == 2);
    CHECK(total_variation(out, MarginalMeasure::product({nu, nu})) == Rational(0));
}

TEST_CASE("delta of a point mass matches the hand formula") {
    // N1=2, M1=5, N2=10: B_1 = {1..5} with D_1, D_2 inside (shift 0),
    // B_2 = {6..10} containing D_4 = {7,8}, D_5 = {9,10}, so sigma_2 shifts
    // local coordinates down by one.
    std::vector<Rational> point;
    for (long c = 1; c <= 10; ++c) point.push_back(make_rational(c, 10));
    const MarginalMeasure mu = MarginalMeasure::point_mass(point);
    const MarginalMeasure out = intertwine_apply(mu, IntertwineDirection::delta, 2, 5, 10);
    CHECK(out.dim() == 5);
    const auto table = expand(out);
    REQUIRE(table.size() == 2);
    // First block unshifted: coordinates 1..5.
    std::vector<Rational> first;
    for (long c = 1; c <= 5; ++c) first.push_back(make_rational(c, 10));
    CHECK(table.at(first) == make_rational(1, 2));
    // Second block rotated left by one: 7,8,9,10,6.
    std::vector<Rational> second;
    for (long c : {7, 8, 9, 10, 6}) second.push_back(make_rational(c, 10));
    CHECK(table.at(second) == make_rational(1, 2));
}

TEST_CASE("composed intertwining defect stays within the counted bound") {
    Rng rng(405);
    const auto defect = intertwine_defect(2, 5, 20);
    for (int trial = 0; trial < 10; ++trial) {
        const MarginalMeasure mu = random_product(20, rng);
        const MarginalMeasure via =
            intertwine_apply(intertwine_apply(mu, IntertwineDirection::delta, 2, 5, 20),
                             IntertwineDirection::gamma, 2, 5, 20);
        const MarginalMeasure direct = pushforward(mu, 10, 0, {}, false);
        CHECK(total_variation(via, direct) <= defect.bound);
    }
}

TEST_CASE("morita rationality witnesses") {
    SUBCASE("equal rates give (1,1)") {
        const auto result = morita_rationality_check(make_rational(1, 2), make_rational(1, 2));
        CHECK(result.compatible);
        CHECK(result.n == 1);
        CHECK(result.m == 1);
    }
    SUBCASE("1/2 against 3/4 gives (2,3)") {
        const auto result = morita_rationality_check(make_rational(1, 2), make_rational(3, 4));
        CHECK(result.n == 2);
        CHECK(result.m == 3);
        // Shared value r/n = s/m = 1/4.
        CHECK(make_rational(1, 2) / Rational(result.n) == make_rational(3, 4) / Rational(result.m));
    }
    SUBCASE("r = s = 1 gives (1,1) even with the smallest search bound") {
        const auto result = morita_rationality_check(Rational(1), Rational(1));
        CHECK(result.n == 1);
        CHECK(result.m == 1);
    }
    CHECK_THROWS_AS(morita_rationality_check(Rational(0), Rational(1)), PreconditionError);
}

TEST_CASE("measure machinery edge cases") {
    SUBCASE("block marginals out of range are rejected") {
        const MarginalMeasure mu = MarginalMeasure::point_mass({Rational(0), Rational(1)});
        CHECK_THROWS_AS(mu.block_marginal(1, 2), PreconditionError);
        CHECK_THROWS_AS(mu.block_marginal(0, 0), PreconditionError);
    }
    SUBCASE("measures must carry unit mass and unit marginals") {
        DiscreteMeasure1D short_mass;
        short_mass.atoms = {{Rational(0), make_rational(1, 2)}};
        CHECK_THROWS_AS(MarginalMeasure::product({short_mass}), ValidationError);
        CHECK_THROWS_AS(MarginalMeasure(1, {}, {{make_rational(1, 2), {Rational(0)}}}),
                        ValidationError);
    }
    SUBCASE("the expansion guard trips on huge product supports") {
        DiscreteMeasure1D wide;
        for (int k = 0; k < 8; ++k) wide.atoms.emplace_back(make_rational(k, 8), make_rational(1, 8));
        std::vector<DiscreteMeasure1D> marginals(10, wide); // 8^10 points
        const MarginalMeasure mu = MarginalMeasure::product(std::move(marginals));
        CHECK_THROWS_AS(expand(mu, 1 << 16), NumericalFailure);
    }
    SUBCASE("convex combinations reject mismatched dimensions") {
        const MarginalMeasure a = MarginalMeasure::point_mass({Rational(0)});
        const MarginalMeasure b = MarginalMeasure::point_mass({Rational(0), Rational(1)});
        CHECK_THROWS_AS(convex_combine({{make_rational(1, 2), a}, {make_rational(1, 2), b}}),
                        PreconditionError);
    }
}

TEST_CASE("params validation rejects malformed data") {
    VilladsenParams p;
    p.m0 = 0;
    p.n0 = 1;
    p.target_r = Rational(1);
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.m0 = 1;
    p.n_seq = {BigInt(2)};
    CHECK_THROWS_AS(p.validate(), ValidationError); // l_seq length mismatch
    p.l_seq = {BigInt(-1)};
    CHECK_THROWS_AS(p.validate(), ValidationError);
}
