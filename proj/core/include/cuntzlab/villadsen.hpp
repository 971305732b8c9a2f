#pragma once

#include "cuntzlab/measure.hpp"
#include "cuntzlab/rational.hpp"

#include <optional>
#include <vector>

namespace cuntzlab {

/// Parameter data for an AH construction over growing cubes: stage i is
/// M_{m_i}(C([0,1]^{N_i})) with m_i = m0*(n_1+l_1)...(n_i+l_i) and
/// N_i = n0*n_1...n_i.  The asymptotic conditions are only ever checked on
/// the supplied finite prefix and labelled as such.
struct VilladsenParams {
    BigInt m0;
    BigInt n0;
    std::vector<BigInt> n_seq; // n_1, n_2, ...
    std::vector<BigInt> l_seq; // l_1, l_2, ...
    Rational target_r;

    void validate() const;
    size_t max_stage() const { return n_seq.size(); }
};

struct StageInvariants {
    size_t i = 0;
    BigInt m_i;
    BigInt N_i;
    Rational rc_i;    // (N_i - 1) / (2 m_i)
    Rational ratio_i; // N_i / (2 m_i), the running value of condition (ii)
};

StageInvariants stage_invariants(const VilladsenParams& p, size_t i);
/// Stages 0..i_max computed in one pass.
std::vector<StageInvariants> stage_table(const VilladsenParams& p, size_t i_max);

/// Prefix-verified report on the four parameter conditions: (i) growth of
/// the n_i, (ii) convergence of the ratio toward target_r, (iii) presence
/// of a nonzero l_i, (iv) divisibility of some m_i by every q <= q_max.
struct ParamsReport {
    size_t i_max = 0;
    bool growth_ok = false;
    bool convergence_ok = false;
    Rational final_gap;
    std::vector<Rational> running_ratios;
    bool nonzero_l_ok = false;
    long q_max = 0;
    bool divisibility_ok = false;
    std::vector<long> divisibility_failures;

    bool all_ok() const { return growth_ok && convergence_ok && nonzero_l_ok && divisibility_ok; }
};

ParamsReport validate_params(const VilladsenParams& p, size_t i_max, long q_max = 10,
                             const Rational& convergence_tol = make_rational(1, 1000000));

/// The rank inequality the Chern-class obstruction reduces to:
/// N_j > (N_i - rank_a) * m_j / m_i, evaluated exactly, together with the
/// eta-refined product form
/// prod_{t=i+1..j} (n_t+l_t)/n_t * (1 - m_i*eta/(2 N_i)).  The refined form
/// is only meaningful under rank_a > (eta/2) m_i and is left unevaluated
/// (and flagged) otherwise.
struct ChernReport {
    bool holds = false;
    Rational lhs;
    Rational rhs;
    bool refined_evaluated = false;
    Rational refined_value;
    bool refined_below_one = false;
};

ChernReport chern_obstruction_holds(const VilladsenParams& p, size_t i, size_t j,
                                    const BigInt& rank_a, const Rational& eta);

/// rank_a / m_i > eta/2, with the exact chain identity
/// eta/2 = 2 r (eta / 4r) checked against target_r.
bool rank_bound_check(const VilladsenParams& p, size_t i, const BigInt& rank_a,
                      const Rational& eta);

/// Trace pushforward along one connecting map: the average of the n block
/// marginals, weighted n/(n+l), plus the atom part weighted l/(n+l).  With
/// exact=false the atom part is dropped and the blocks reweighted to 1/n.
MarginalMeasure pushforward(const MarginalMeasure& mu, long n, long l,
                            const std::vector<WeightedAtom>& atoms, bool exact);

/// Block containment count for the intertwining bound: L = #{ t : D_t is
/// contained in some B_k }, bound = 2 (N2 - N1 L) / N2.
struct IntertwineDefect {
    long l_count = 0;
    Rational bound;
};

IntertwineDefect intertwine_defect(long n1, long m1, long n2);

enum class IntertwineDirection { gamma, delta };

/// gamma: P([0,1]^M1) -> P([0,1]^N1), the average of floor(M1/N1) leading
/// N1-blocks.  delta: P([0,1]^N2) -> P([0,1]^M1), the average of the
/// floor(N2/M1) blocks B_k, each cyclically shifted so the D-blocks it
/// contains move to the front.
MarginalMeasure intertwine_apply(const MarginalMeasure& mu, IntertwineDirection direction,
                                 long n1, long m1, long n2);

/// For each q <= q_max, the least stage i with q | m_i, if any in the
/// prefix: the computational witness behind K_0 = Q.
struct K0Report {
    long q_max = 0;
    std::vector<std::pair<long, std::optional<size_t>>> witnesses;
    bool all_witnessed = false;
};

K0Report k0_divisibility(const VilladsenParams& p, long q_max);

/// Least (n, m) with r/n = s/m; always exists for rational inputs.  The
/// contrapositive engine: Morita-equivalent members of the family force
/// their rc values to have rational ratio.
struct MoritaResult {
    bool compatible = false;
    BigInt n;
    BigInt m;
};

MoritaResult morita_rationality_check(const Rational& r, const Rational& s);

} // namespace cuntzlab
