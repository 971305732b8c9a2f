#include "cuntzlab/measure.hpp"

#include "cuntzlab/errors.hpp"

#include <algorithm>

namespace cuntzlab {

DiscreteMeasure1D DiscreteMeasure1D::dirac(const Rational& position) {
    return DiscreteMeasure1D{{{position, Rational(1)}}};
}

Rational DiscreteMeasure1D::total_mass() const {
    Rational total(0);
    for (const auto& [pos, mass] : atoms) total += mass;
    return total;
}

void DiscreteMeasure1D::normalize() {
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<Rational, Rational>> merged;
    for (const auto& [pos, mass] : atoms) {
        if (!merged.empty() && merged.back().first == pos) {
            merged.back().second += mass;
        } else {
            merged.emplace_back(pos, mass);
        }
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const auto& a) { return a.second == 0; }),
                 merged.end());
    atoms = std::move(merged);
}

MarginalMeasure::MarginalMeasure(size_t dim, std::vector<WeightedProductTerm> product_terms,
                                 std::vector<WeightedAtom> atom_part)
    : dim_(dim), product_terms_(std::move(product_terms)), atom_part_(std::move(atom_part)) {
    if (dim_ == 0) throw ValidationError("measure dimension must be positive");
    for (auto& term : product_terms_) {
        if (term.weight < 0) throw ValidationError("product term weight must be nonnegative");
        if (term.marginals.size() != dim_) {
            throw ValidationError("product term must carry one marginal per coordinate");
        }
        for (auto& marginal : term.marginals) {
            marginal.normalize();
            if (marginal.total_mass() != 1) {
                throw ValidationError("coordinate marginals must have mass 1");
            }
        }
    }
    for (const auto& atom : atom_part_) {
        if (atom.weight < 0) throw ValidationError("atom weight must be nonnegative");
        if (atom.point.size() != dim_) throw ValidationError("atom has wrong dimension");
    }
    if (total_mass() != 1) throw ValidationError("measure must have total mass 1 exactly");
    product_terms_.erase(std::remove_if(product_terms_.begin(), product_terms_.end(),
                                        [](const auto& t) { return t.weight == 0; }),
                         product_terms_.end());
    atom_part_.erase(std::remove_if(atom_part_.begin(), atom_part_.end(),
                                    [](const auto& a) { return a.weight == 0; }),
                     atom_part_.end());
}

MarginalMeasure MarginalMeasure::product(std::vector<DiscreteMeasure1D> marginals) {
    const size_t dim = marginals.size();
    std::vector<WeightedProductTerm> terms;
    terms.push_back(WeightedProductTerm{Rational(1), std::move(marginals)});
    return MarginalMeasure(dim, std::move(terms), {});
}

MarginalMeasure MarginalMeasure::point_mass(std::vector<Rational> point) {
    const size_t dim = point.size();
    std::vector<WeightedAtom> atoms;
    atoms.push_back(WeightedAtom{Rational(1), std::move(point)});
    return MarginalMeasure(dim, {}, std::move(atoms));
}

Rational MarginalMeasure::product_mass() const {
    Rational total(0);
    for (const auto& term : product_terms_) total += term.weight;
    return total;
}

Rational MarginalMeasure::atom_mass() const {
    Rational total(0);
    for (const auto& atom : atom_part_) total += atom.weight;
    return total;
}

Rational MarginalMeasure::total_mass() const { return product_mass() + atom_mass(); }

MarginalMeasure MarginalMeasure::block_marginal(size_t offset, size_t length) const {
    if (length == 0 || offset + length > dim_) {
        throw PreconditionError("block marginal out of range");
    }
    std::vector<WeightedProductTerm> terms;
    terms.reserve(product_terms_.size());
    for (const auto& term : product_terms_) {
        WeightedProductTerm t;
        t.weight = term.weight;
        t.marginals.assign(term.marginals.begin() + static_cast<long>(offset),
                           term.marginals.begin() + static_cast<long>(offset + length));
        terms.push_back(std::move(t));
    }
    std::vector<WeightedAtom> atoms;
    atoms.reserve(atom_part_.size());
    for (const auto& atom : atom_part_) {
        WeightedAtom a;
        a.weight = atom.weight;
        a.point.assign(atom.point.begin() + static_cast<long>(offset),
                       atom.point.begin() + static_cast<long>(offset + length));
        atoms.push_back(std::move(a));
    }
    return MarginalMeasure(length, std::move(terms), std::move(atoms));
}

MarginalMeasure convex_combine(const std::vector<std::pair<Rational, MarginalMeasure>>& parts) {
    if (parts.empty()) throw PreconditionError("convex_combine: no parts");
    const size_t dim = parts.front().second.dim();
    std::vector<WeightedProductTerm> terms;
    std::vector<WeightedAtom> atoms;
    for (const auto& [coefficient, part] : parts) {
        if (part.dim() != dim) throw PreconditionError("convex_combine: dimension mismatch");
        if (coefficient < 0) throw PreconditionError("convex_combine: negative coefficient");
        for (const auto& term : part.product_terms()) {
            terms.push_back(WeightedProductTerm{coefficient * term.weight, term.marginals});
        }
        for (const auto& atom : part.atom_part()) {
            atoms.push_back(WeightedAtom{coefficient * atom.weight, atom.point});
        }
    }
    return MarginalMeasure(dim, std::move(terms), std::move(atoms));
}

std::map<std::vector<Rational>, Rational> expand(const MarginalMeasure& mu, size_t max_points) {
    std::map<std::vector<Rational>, Rational> out;
    for (const auto& term : mu.product_terms()) {
        size_t count = 1;
        for (const auto& marginal : term.marginals) {
            count *= marginal.atoms.size();
            if (count > max_points) {
                throw NumericalFailure("expand: product support exceeds the expansion guard");
            }
        }
        std::vector<size_t> cursor(mu.dim(), 0);
        while (true) {
            std::vector<Rational> point;
            point.reserve(mu.dim());
            Rational mass = term.weight;
            for (size_t c = 0; c < mu.dim(); ++c) {
                const auto& [pos, m] = term.marginals[c].atoms[cursor[c]];
                point.push_back(pos);
                mass *= m;
            }
            if (mass != 0) out[std::move(point)] += mass;
            size_t c = 0;
            for (; c < mu.dim(); ++c) {
                if (++cursor[c] < term.marginals[c].atoms.size()) break;
                cursor[c] = 0;
            }
            if (c == mu.dim()) break;
        }
    }
    for (const auto& atom : mu.atom_part()) out[atom.point] += atom.weight;
    return out;
}

Rational total_variation(const MarginalMeasure& lhs, const MarginalMeasure& rhs) {
    if (lhs.dim() != rhs.dim()) throw PreconditionError("total_variation: dimension mismatch");
    auto p = expand(lhs);
    const auto q = expand(rhs);
    Rational distance(0);
    for (const auto& [point, mass] : q) {
        auto it = p.find(point);
        if (it == p.end()) {
            distance += mass;
        } else {
            distance += abs(it->second - mass);
            p.erase(it);
        }
    }
    for (const auto& [point, mass] : p) distance += abs(mass);
    return distance;
}

} // namespace cuntzlab
