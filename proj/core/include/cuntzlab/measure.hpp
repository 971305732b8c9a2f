#pragma once

#include "cuntzlab/rational.hpp"

#include <map>
#include <vector>

namespace cuntzlab {

/// A discrete probability measure on a 1-D grid of rational positions.
struct DiscreteMeasure1D {
    std::vector<std::pair<Rational, Rational>> atoms; // (position, mass), positions ascending

    static DiscreteMeasure1D dirac(const Rational& position);

    Rational total_mass() const;
    /// Sorts by position, merges duplicates, drops zero masses.
    void normalize();
};

/// weight * (marginal_1 x marginal_2 x ... x marginal_dim).
struct WeightedProductTerm {
    Rational weight;
    std::vector<DiscreteMeasure1D> marginals; // each of mass 1
};

struct WeightedAtom {
    Rational weight;
    std::vector<Rational> point;
};

/// A probability measure on a cube, held as a convex combination of
/// product measures (given by their coordinate marginals) plus a list of
/// weighted point masses.  This covers every measure the pushforward and
/// intertwining maps produce: block marginals of products are products, and
/// the maps only ever average such blocks and adjoin point masses.
class MarginalMeasure {
public:
    MarginalMeasure(size_t dim, std::vector<WeightedProductTerm> product_terms,
                    std::vector<WeightedAtom> atom_part);

    /// A single product term of weight 1.
    static MarginalMeasure product(std::vector<DiscreteMeasure1D> marginals);
    static MarginalMeasure point_mass(std::vector<Rational> point);

    size_t dim() const { return dim_; }
    const std::vector<WeightedProductTerm>& product_terms() const { return product_terms_; }
    const std::vector<WeightedAtom>& atom_part() const { return atom_part_; }

    Rational product_mass() const;
    Rational atom_mass() const;
    Rational total_mass() const;

    /// The marginal onto coordinates [offset, offset+length).
    MarginalMeasure block_marginal(size_t offset, size_t length) const;

private:
    size_t dim_ = 0;
    std::vector<WeightedProductTerm> product_terms_;
    std::vector<WeightedAtom> atom_part_;
};

/// Convex combination; weights must sum to 1 and all parts share a dimension.
MarginalMeasure convex_combine(const std::vector<std::pair<Rational, MarginalMeasure>>& parts);

/// Expands to an explicit point-mass map; guarded against blow-up.
std::map<std::vector<Rational>, Rational> expand(const MarginalMeasure& mu,
                                                 size_t max_points = size_t{1} << 22);

/// Total mass of the difference measure, sum_x |p(x) - q(x)| (the unhalved
/// convention, so two disjoint probability measures are at distance 2).
Rational total_variation(const MarginalMeasure& lhs, const MarginalMeasure& rhs);

} // namespace cuntzlab
