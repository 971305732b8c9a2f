#include "cuntzlab/villadsen.hpp"

#include "cuntzlab/errors.hpp"

#include <algorithm>

namespace cuntzlab {

void VilladsenParams::validate() const {
    if (m0 < 1) throw ValidationError("villadsen params: m0 must be positive");
    if (n0 < 1) throw ValidationError("villadsen params: n0 must be positive");
    if (n_seq.size() != l_seq.size()) {
        throw ValidationError("villadsen params: n_seq and l_seq must have equal length");
    }
    for (const BigInt& n : n_seq) {
        if (n < 1) throw ValidationError("villadsen params: n_i must be positive");
    }
    for (const BigInt& l : l_seq) {
        if (l < 0) throw ValidationError("villadsen params: l_i must be nonnegative");
    }
    if (target_r <= 0) throw ValidationError("villadsen params: target_r must be positive");
}

std::vector<StageInvariants> stage_table(const VilladsenParams& p, size_t i_max) {
    p.validate();
    if (i_max > p.max_stage()) {
        throw PreconditionError("stage index exceeds the supplied parameter prefix");
    }
    std::vector<StageInvariants> table;
    table.reserve(i_max + 1);
    BigInt m = p.m0;
    BigInt n = p.n0;
    for (size_t i = 0; i <= i_max; ++i) {
        if (i > 0) {
            m *= p.n_seq[i - 1] + p.l_seq[i - 1];
            n *= p.n_seq[i - 1];
        }
        StageInvariants s;
        s.i = i;
        s.m_i = m;
        s.N_i = n;
        s.rc_i = make_rational(n - 1, 2 * m);
        s.ratio_i = make_rational(n, 2 * m);
        table.push_back(std::move(s));
    }
    return table;
}

StageInvariants stage_invariants(const VilladsenParams& p, size_t i) {
    return stage_table(p, i).back();
}

ParamsReport validate_params(const VilladsenParams& p, size_t i_max, long q_max,
                             const Rational& convergence_tol) {
    p.validate();
    if (i_max > p.max_stage()) {
        throw PreconditionError("i_max exceeds the supplied parameter prefix");
    }
    ParamsReport report;
    report.i_max = i_max;
    report.q_max = q_max;

    // (i) growth over the prefix: nondecreasing and strictly grown overall.
    report.growth_ok = true;
    for (size_t t = 0; t + 1 < i_max; ++t) {
        if (p.n_seq[t + 1] < p.n_seq[t]) report.growth_ok = false;
    }
    if (i_max >= 1 && p.n_seq[i_max - 1] <= p.n_seq[0] && i_max > 1) {
        report.growth_ok = false;
    }

    const auto table = stage_table(p, i_max);
    for (const auto& stage : table) report.running_ratios.push_back(stage.ratio_i);

    // (ii) convergence of the running ratio toward the target.
    report.final_gap = abs(table.back().ratio_i - p.target_r);
    report.convergence_ok = report.final_gap <= convergence_tol;

    // (iii) a nonzero l in the prefix (asymptotically: infinitely many).
    report.nonzero_l_ok = false;
    for (size_t t = 0; t < i_max; ++t) {
        if (p.l_seq[t] != 0) report.nonzero_l_ok = true;
    }

    // (iv) divisibility witnesses.
    report.divisibility_ok = true;
    for (long q = 1; q <= q_max; ++q) {
        bool witnessed = false;
        for (const auto& stage : table) {
            if (stage.m_i % q == 0) {
                witnessed = true;
                break;
            }
        }
        if (!witnessed) {
            report.divisibility_ok = false;
            report.divisibility_failures.push_back(q);
        }
    }
    return report;
}

ChernReport chern_obstruction_holds(const VilladsenParams& p, size_t i, size_t j,
                                    const BigInt& rank_a, const Rational& eta) {
    p.validate();
    if (!(i < j) || j > p.max_stage()) {
        throw PreconditionError("chern check requires i < j within the parameter prefix");
    }
    if (eta <= 0 || eta >= 1) throw PreconditionError("chern check requires eta in (0,1)");
    const auto table = stage_table(p, j);
    const StageInvariants& si = table[i];
    const StageInvariants& sj = table[j];
    if (rank_a < 0 || rank_a > si.N_i * si.m_i) {
        throw PreconditionError("chern check: rank_a out of the stage's scale");
    }

    ChernReport report;
    report.lhs = Rational(sj.N_i);
    report.rhs = Rational((si.N_i - rank_a) * (sj.m_i / si.m_i));
    report.holds = report.lhs > report.rhs;

    // Refined product form, meaningful only past the rank floor from the
    // trace bound.
    if (Rational(rank_a) > (eta / 2) * Rational(si.m_i)) {
        report.refined_evaluated = true;
        Rational product(1);
        for (size_t t = i; t < j; ++t) {
            product *= make_rational(p.n_seq[t] + p.l_seq[t], p.n_seq[t]);
        }
        report.refined_value =
            product * (Rational(1) - Rational(si.m_i) * eta / (2 * Rational(si.N_i)));
        report.refined_below_one = report.refined_value < 1;
    }
    return report;
}

bool rank_bound_check(const VilladsenParams& p, size_t i, const BigInt& rank_a,
                      const Rational& eta) {
    p.validate();
    if (i > p.max_stage()) throw PreconditionError("rank bound check: index out of range");
    if (eta <= 0 || eta >= 1) throw PreconditionError("rank bound check: eta must lie in (0,1)");
    // The displayed chain evaluates 2r * (eta/4r); with exact rationals this
    // collapses to eta/2 identically, which we assert with the target rate.
    const Rational chain = 2 * p.target_r * (eta / (4 * p.target_r));
    if (chain != eta / 2) throw Error("rank bound chain identity failed (broken arithmetic)");
    const StageInvariants stage = stage_invariants(p, i);
    return make_rational(rank_a, stage.m_i) > eta / 2;
}

MarginalMeasure pushforward(const MarginalMeasure& mu, long n, long l,
                            const std::vector<WeightedAtom>& atoms, bool exact) {
    if (n < 1) throw PreconditionError("pushforward: n must be positive");
    if (l < 0) throw PreconditionError("pushforward: l must be nonnegative");
    if (mu.dim() % static_cast<size_t>(n) != 0) {
        throw PreconditionError("pushforward: measure dimension must split into n blocks");
    }
    const size_t block = mu.dim() / static_cast<size_t>(n);

    std::vector<std::pair<Rational, MarginalMeasure>> parts;
    const Rational block_coefficient =
        exact ? make_rational(1, n + l) : make_rational(1, n);
    for (long j = 0; j < n; ++j) {
        parts.emplace_back(block_coefficient,
                           mu.block_marginal(static_cast<size_t>(j) * block, block));
    }
    if (exact && l > 0) {
        if (atoms.empty()) {
            throw PreconditionError("pushforward: atom part required when l > 0 and exact");
        }
        Rational atom_total(0);
        std::vector<WeightedAtom> scaled;
        for (const auto& atom : atoms) {
            if (atom.point.size() != block) {
                throw PreconditionError("pushforward: atom lives on the wrong cube");
            }
            atom_total += atom.weight;
            scaled.push_back(WeightedAtom{atom.weight * make_rational(l, n + l), atom.point});
        }
        if (atom_total != 1) {
            throw PreconditionError("pushforward: atom part must be a convex combination");
        }
        // Assemble directly: blocks carry mass n/(n+l), atoms l/(n+l).
        std::vector<WeightedProductTerm> terms;
        std::vector<WeightedAtom> out_atoms = std::move(scaled);
        for (const auto& [coefficient, part] : parts) {
            for (const auto& term : part.product_terms()) {
                terms.push_back(WeightedProductTerm{coefficient * term.weight, term.marginals});
            }
            for (const auto& atom : part.atom_part()) {
                out_atoms.push_back(WeightedAtom{coefficient * atom.weight, atom.point});
            }
        }
        return MarginalMeasure(block, std::move(terms), std::move(out_atoms));
    }
    return convex_combine(parts);
}

IntertwineDefect intertwine_defect(long n1, long m1, long n2) {
    if (!(n1 >= 1 && n1 <= m1 && m1 <= n2)) {
        throw PreconditionError("intertwine_defect requires 1 <= N1 <= M1 <= N2");
    }
    const long t_count = n2 / n1;
    const long k_count = n2 / m1;
    long contained = 0;
    for (long t = 1; t <= t_count; ++t) {
        const long start = (t - 1) * n1 + 1;
        const long end = t * n1;
        const long k = (start - 1) / m1 + 1; // the only candidate block
        if (k <= k_count && start >= (k - 1) * m1 + 1 && end <= k * m1) ++contained;
    }
    IntertwineDefect out;
    out.l_count = contained;
    out.bound = make_rational(2 * (n2 - n1 * contained), n2);
    return out;
}

namespace {

MarginalMeasure permute_coordinates(const MarginalMeasure& mu, const std::vector<size_t>& dest) {
    std::vector<WeightedProductTerm> terms;
    terms.reserve(mu.product_terms().size());
    for (const auto& term : mu.product_terms()) {
        WeightedProductTerm t;
        t.weight = term.weight;
        t.marginals.resize(mu.dim());
        for (size_t c = 0; c < mu.dim(); ++c) t.marginals[dest[c]] = term.marginals[c];
        terms.push_back(std::move(t));
    }
    std::vector<WeightedAtom> atoms;
    atoms.reserve(mu.atom_part().size());
    for (const auto& atom : mu.atom_part()) {
        WeightedAtom a;
        a.weight = atom.weight;
        a.point.resize(mu.dim());
        for (size_t c = 0; c < mu.dim(); ++c) a.point[dest[c]] = atom.point[c];
        atoms.push_back(std::move(a));
    }
    return MarginalMeasure(mu.dim(), std::move(terms), std::move(atoms));
}

} // namespace

MarginalMeasure intertwine_apply(const MarginalMeasure& mu, IntertwineDirection direction,
                                 long n1, long m1, long n2) {
    if (!(n1 >= 1 && n1 <= m1 && m1 <= n2)) {
        throw PreconditionError("intertwine_apply requires 1 <= N1 <= M1 <= N2");
    }
    if (direction == IntertwineDirection::gamma) {
        if (mu.dim() != static_cast<size_t>(m1)) {
            throw PreconditionError("gamma expects a measure on the M1-cube");
        }
        const long blocks = m1 / n1;
        std::vector<std::pair<Rational, MarginalMeasure>> parts;
        for (long b = 0; b < blocks; ++b) {
            parts.emplace_back(make_rational(1, blocks),
                               mu.block_marginal(static_cast<size_t>(b * n1),
                                                 static_cast<size_t>(n1)));
        }
        return convex_combine(parts);
    }

    if (mu.dim() != static_cast<size_t>(n2)) {
        throw PreconditionError("delta expects a measure on the N2-cube");
    }
    const long k_count = n2 / m1;
    const long t_count = n2 / n1;
    std::vector<std::pair<Rational, MarginalMeasure>> parts;
    for (long k = 1; k <= k_count; ++k) {
        const long block_start = (k - 1) * m1 + 1; // 1-based global coordinate
        MarginalMeasure restricted =
            mu.block_marginal(static_cast<size_t>(block_start - 1), static_cast<size_t>(m1));
        // Cyclic shift moving the D-blocks inside B_k to the front: find the
        // first global coordinate of B_k lying in a fully contained D_t.
        long shift = 0;
        for (long t = 1; t <= t_count; ++t) {
            const long start = (t - 1) * n1 + 1;
            const long end = t * n1;
            if (start >= block_start && end <= k * m1) {
                shift = start - block_start;
                break;
            }
        }
        if (shift != 0) {
            std::vector<size_t> dest(static_cast<size_t>(m1));
            for (long c = 0; c < m1; ++c) {
                dest[static_cast<size_t>(c)] =
                    static_cast<size_t>(((c - shift) % m1 + m1) % m1);
            }
            restricted = permute_coordinates(restricted, dest);
        }
        parts.emplace_back(make_rational(1, k_count), std::move(restricted));
    }
    return convex_combine(parts);
}

K0Report k0_divisibility(const VilladsenParams& p, long q_max) {
    p.validate();
    const auto table = stage_table(p, p.max_stage());
    K0Report report;
    report.q_max = q_max;
    report.all_witnessed = true;
    for (long q = 1; q <= q_max; ++q) {
        std::optional<size_t> witness;
        for (const auto& stage : table) {
            if (stage.m_i % q == 0) {
                witness = stage.i;
                break;
            }
        }
        if (!witness) report.all_witnessed = false;
        report.witnesses.emplace_back(q, witness);
    }
    return report;
}

MoritaResult morita_rationality_check(const Rational& r, const Rational& s) {
    if (r <= 0 || s <= 0) throw PreconditionError("morita check requires positive rationals");
    // r/n = s/m demands m/n = s/r; the least solution is the reduced
    // fraction itself.
    Rational quotient = s / r;
    quotient.canonicalize();
    MoritaResult out;
    out.compatible = true;
    out.n = quotient.get_den();
    out.m = quotient.get_num();
    return out;
}

} // namespace cuntzlab
