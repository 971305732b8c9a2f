#include "cuntzlab/rsh.hpp"

#include "cuntzlab/errors.hpp"

#include <cmath>
#include <sstream>

namespace cuntzlab {

RshDecomposition::RshDecomposition(std::string label, std::vector<RshStage> stages)
    : label_(std::move(label)), stages_(std::move(stages)) {
    if (stages_.empty()) throw ValidationError("decomposition needs at least one stage");
    if (!stages_[0].boundary.empty()) throw ValidationError("stage 0 must have empty boundary");
    for (size_t k = 0; k < stages_.size(); ++k) {
        const RshStage& stage = stages_[k];
        if (!stage.base_space) throw ValidationError("stage without a base space");
        if (stage.matrix_size < 1) throw ValidationError("stage matrix size must be positive");
        if (stage.boundary.space() != stage.base_space) {
            throw ValidationError("stage boundary must live on its base space");
        }
        for (const auto& entry : stage.clutch) {
            const size_t idx = stage.base_space->index_of(entry.boundary_point_id);
            if (!stage.boundary.contains(idx)) {
                throw ValidationError("clutch point \"" + entry.boundary_point_id +
                                      "\" is not a boundary point");
            }
            long total = 0;
            for (const auto& target : entry.targets) {
                if (target.stage >= k) {
                    throw ValidationError("clutch target must reference an earlier stage");
                }
                stages_[target.stage].base_space->index_of(target.point_id);
                total += stages_[target.stage].matrix_size;
            }
            if (total != stage.matrix_size) {
                std::ostringstream msg;
                msg << "clutch at \"" << entry.boundary_point_id << "\" is not unital: targets sum to "
                    << total << ", stage size is " << stage.matrix_size;
                throw ValidationError(msg.str());
            }
        }
    }
}

RshDecomposition RshDecomposition::homogeneous(std::string label, SpaceRef space, int matrix_size) {
    RshStage stage;
    stage.base_space = space;
    stage.boundary = ClosedRegion(space, {});
    stage.matrix_size = matrix_size;
    std::vector<RshStage> stages;
    stages.push_back(std::move(stage));
    return RshDecomposition(std::move(label), std::move(stages));
}

Rational rc_upper_bound(const RshDecomposition& d) {
    Rational best(0);
    bool first = true;
    for (const RshStage& stage : d.stages()) {
        const Rational value =
            make_rational(stage.base_space->covering_dim() - 1, 2L * stage.matrix_size);
        if (first || value > best) {
            best = value;
            first = false;
        }
    }
    // rc is an infimum over nonnegative r; dimension 0 stages clamp to 0.
    if (best < 0) return Rational(0);
    return best;
}

StageCertificate stage_rank_gap_certificate(const RshDecomposition& d,
                                            const std::vector<MatrixField>& a,
                                            const std::vector<MatrixField>& b, double tol) {
    if (a.size() != d.stage_count() || b.size() != d.stage_count()) {
        throw PreconditionError("stage fields must cover every stage");
    }
    int amp_a = 0;
    int amp_b = 0;
    for (size_t k = 0; k < d.stage_count(); ++k) {
        const RshStage& stage = d.stages()[k];
        if (a[k].space() != stage.base_space || b[k].space() != stage.base_space) {
            throw PreconditionError("stage field does not live on the stage's base space");
        }
        if (a[k].n() % stage.matrix_size != 0 || b[k].n() % stage.matrix_size != 0) {
            throw PreconditionError("stage field size is not an amplification of the stage size");
        }
        const int ka = a[k].n() / stage.matrix_size;
        const int kb = b[k].n() / stage.matrix_size;
        if (amp_a == 0) {
            amp_a = ka;
            amp_b = kb;
        } else if (ka != amp_a || kb != amp_b) {
            throw PreconditionError("stage fields must share a common amplification");
        }
    }

    for (size_t k = 0; k < d.stage_count(); ++k) {
        const RshStage& stage = d.stages()[k];
        const int dim = stage.base_space->covering_dim();
        for (size_t i : stage.base_space->sorted_order()) {
            if (stage.boundary.contains(i)) continue;
            const int lhs = 2 * rank_at(a[k], i, tol) + dim - 1;
            const int rhs = 2 * rank_at(b[k], i, tol);
            if (lhs > rhs) {
                return {false, k, stage.base_space->point(i).id};
            }
        }
    }
    return {true, std::nullopt, std::nullopt};
}

double delta_schedule_closed_form(double delta0, int k, int big_n) {
    // log-domain: log d_k = log(d_0)/2^k + log(N) * sum_{j<k} 2^-j
    double log_value = std::log(delta0) / std::pow(2.0, k);
    double weight = 1.0;
    for (int j = 0; j < k; ++j) {
        log_value += std::log(static_cast<double>(big_n)) * weight;
        weight *= 0.5;
    }
    return std::exp(log_value);
}

std::vector<double> delta_schedule(double delta0, int l, int big_n) {
    if (!(delta0 > 0.0)) throw PreconditionError("delta_schedule: delta0 must be positive");
    if (l < 0) throw PreconditionError("delta_schedule: l must be nonnegative");
    if (big_n < 1) throw PreconditionError("delta_schedule: N must be positive");
    std::vector<double> out;
    out.reserve(static_cast<size_t>(l) + 1);
    out.push_back(delta0);
    for (int k = 1; k <= l; ++k) {
        out.push_back(static_cast<double>(big_n) * std::sqrt(out.back()));
    }
    for (int k = 0; k <= l; ++k) {
        const double closed = delta_schedule_closed_form(delta0, k, big_n);
        const double rel = std::abs(out[static_cast<size_t>(k)] - closed) /
                           std::max(out[static_cast<size_t>(k)], closed);
        if (rel > 1e-9) {
            throw NumericalFailure("delta_schedule: recursion and closed form disagree at k=" +
                                   std::to_string(k));
        }
    }
    return out;
}

double required_delta0(double eps, int l, int big_n) {
    if (!(eps > 0.0)) throw PreconditionError("required_delta0: eps must be positive");
    if (l < 0) throw PreconditionError("required_delta0: l must be nonnegative");
    // delta_l is increasing in delta0, so scan 10^0, 10^-1, ... downward in
    // the log domain and return the first hit.
    const double log10_eps = std::log10(eps);
    double log10_tail = 0.0; // log10 of prod_{j<l} N^(1/2^j)
    double weight = 1.0;
    for (int j = 0; j < l; ++j) {
        log10_tail += std::log10(static_cast<double>(big_n)) * weight;
        weight *= 0.5;
    }
    const double pow2l = std::pow(2.0, l);
    for (int j = 0; j <= 1200; ++j) {
        const double log10_delta_l = -static_cast<double>(j) / pow2l + log10_tail;
        if (log10_delta_l < log10_eps) {
            if (j > 323) {
                throw NumericalFailure(
                    "required_delta0: the admissible delta0 underflows double precision "
                    "(needs 10^-" +
                    std::to_string(j) + ")");
            }
            return std::pow(10.0, -j);
        }
    }
    throw NumericalFailure("required_delta0: no delta0 of the form 10^-j found");
}

InductiveSequence::InductiveSequence(std::vector<RshDecomposition> terms,
                                     std::vector<ConnectingPattern> maps)
    : terms_(std::move(terms)), maps_(std::move(maps)) {
    if (terms_.empty()) throw ValidationError("inductive sequence needs at least one term");
    if (maps_.size() + 1 != terms_.size()) {
        throw ValidationError("inductive sequence needs one connecting pattern per consecutive pair");
    }
    for (size_t t = 0; t < maps_.size(); ++t) {
        const RshDecomposition& from = terms_[t];
        const RshDecomposition& to = terms_[t + 1];
        const ConnectingPattern& pattern = maps_[t];
        if (pattern.stage_wirings.size() != to.stage_count()) {
            throw ValidationError("connecting pattern must wire every stage of the next term");
        }
        for (size_t k = 0; k < to.stage_count(); ++k) {
            long total = 0;
            for (const auto& summand : pattern.stage_wirings[k]) {
                if (summand.source_stage >= from.stage_count()) {
                    throw ValidationError("connecting pattern references a missing source stage");
                }
                if (summand.multiplicity < 1) {
                    throw ValidationError("connecting pattern multiplicities must be positive");
                }
                total += static_cast<long>(summand.multiplicity) *
                         from.stages()[summand.source_stage].matrix_size;
            }
            if (total != to.stages()[k].matrix_size) {
                std::ostringstream msg;
                msg << "connecting pattern into term " << (t + 1) << " stage " << k
                    << " is not unital: summands give " << total << ", stage size is "
                    << to.stages()[k].matrix_size;
                throw ValidationError(msg.str());
            }
        }
    }
}

SlowDimensionGrowthResult slow_dimension_growth_check(const InductiveSequence& seq, int big_n,
                                                      size_t i) {
    if (big_n < 1) throw PreconditionError("slow_dimension_growth_check: N must be positive");
    const auto& terms = seq.terms();
    if (i >= terms.size()) throw PreconditionError("slow_dimension_growth_check: index out of range");

    const auto term_ok = [&](size_t j) {
        for (const RshStage& stage : terms[j].stages()) {
            if (static_cast<long>(stage.matrix_size) <
                static_cast<long>(big_n) * stage.base_space->covering_dim()) {
                return false;
            }
        }
        return true;
    };

    size_t first_good_suffix = terms.size();
    for (size_t j = terms.size(); j-- > 0;) {
        if (!term_ok(j)) break;
        first_good_suffix = j;
    }
    const size_t j0 = std::max(i + 1, first_good_suffix);
    if (j0 >= terms.size()) return {false, 0};
    return {true, j0};
}

RshDecomposition matrix_amplify(const RshDecomposition& d, int m) {
    if (m < 1) throw PreconditionError("matrix_amplify: m must be >= 1");
    // Every stage size scales by m; each clutch slot's effective size scales
    // with the stage it references, so the target lists stay as they are and
    // unitality is preserved automatically.
    std::vector<RshStage> stages = d.stages();
    for (RshStage& stage : stages) stage.matrix_size *= m;
    return RshDecomposition(d.label(), std::move(stages));
}

} // namespace cuntzlab
