#pragma once

#include "cuntzlab/cuntz.hpp"
#include "cuntzlab/field.hpp"
#include "cuntzlab/rational.hpp"
#include "cuntzlab/space.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cuntzlab {

/// One stage of a recursive subhomogeneous decomposition: a base space, the
/// closed boundary subset glued into earlier stages, the matrix size, and
/// the diagonal clutching pattern.  Clutching maps are restricted to direct
/// sums of point evaluations into earlier stages; at every boundary point
/// the target sizes must add up to this stage's size (unitality).
struct RshStage {
    struct ClutchTarget {
        size_t stage = 0;      // earlier stage index
        std::string point_id;  // point of that stage's base space
    };
    struct ClutchEntry {
        std::string boundary_point_id;
        std::vector<ClutchTarget> targets;
    };

    SpaceRef base_space;
    ClosedRegion boundary;
    int matrix_size = 1;
    std::vector<ClutchEntry> clutch;
};

class RshDecomposition {
public:
    RshDecomposition(std::string label, std::vector<RshStage> stages);

    const std::string& label() const { return label_; }
    const std::vector<RshStage>& stages() const { return stages_; }
    size_t stage_count() const { return stages_.size(); }
    /// Decomposition length l = stage count - 1.
    size_t length() const { return stages_.size() - 1; }

    /// Convenience: a single homogeneous stage M_m(C(X)).
    static RshDecomposition homogeneous(std::string label, SpaceRef space, int matrix_size);

private:
    std::string label_;
    std::vector<RshStage> stages_;
};

/// rc(A) <= max(0, max_k (dim(X_k) - 1) / (2 n(k))), exact.
Rational rc_upper_bound(const RshDecomposition& d);

struct StageCertificate {
    bool holds = false;
    std::optional<size_t> witness_stage;
    std::optional<std::string> witness_point;
};

/// The stagewise rank-gap certificate: rank(a(x)) + (d(x)-1)/2 <= rank(b(x))
/// over every X_k minus its boundary.  Fields may be given at a common
/// amplification of the stage sizes.
StageCertificate stage_rank_gap_certificate(const RshDecomposition& d,
                                            const std::vector<MatrixField>& a,
                                            const std::vector<MatrixField>& b,
                                            double tol = kDefaultRankTol);

/// The tolerance cascade delta_k = N * sqrt(delta_{k-1}) used when a
/// comparison witness is pushed through l stages; the recursion is checked
/// against its closed form delta_0^(1/2^k) * prod_{j<k} N^(1/2^j) to 1e-9
/// relative before returning.
std::vector<double> delta_schedule(double delta0, int l, int big_n = 49);

/// Closed form alone, evaluated in the log domain.
double delta_schedule_closed_form(double delta0, int k, int big_n = 49);

/// Largest delta0 of the form 10^(-j) with delta_l < eps.
double required_delta0(double eps, int l, int big_n = 49);

/// Inter-term connecting data of an inductive sequence, at the pattern
/// level: each stage of the next term receives a direct sum of coordinate
/// pullbacks and point evaluations from stages of the previous term.
struct ConnectingPattern {
    struct Summand {
        enum class Kind { pullback, point_eval };
        Kind kind = Kind::point_eval;
        size_t source_stage = 0;
        int multiplicity = 1;
    };
    // One wiring list per stage of the target term.
    std::vector<std::vector<Summand>> stage_wirings;
};

class InductiveSequence {
public:
    InductiveSequence(std::vector<RshDecomposition> terms, std::vector<ConnectingPattern> maps);

    const std::vector<RshDecomposition>& terms() const { return terms_; }
    const std::vector<ConnectingPattern>& maps() const { return maps_; }

private:
    std::vector<RshDecomposition> terms_;
    std::vector<ConnectingPattern> maps_;
};

struct SlowDimensionGrowthResult {
    bool found = false;
    size_t j0 = 0;
};

/// Least j0 > i such that every represented term j >= j0 has
/// n_j(k) >= N * dim(X_{j,k}) at every stage; since the patterns are
/// unital, the unit's rank at any evaluation point is exactly n_j(k).
SlowDimensionGrowthResult slow_dimension_growth_check(const InductiveSequence& seq, int big_n,
                                                      size_t i);

/// The canonical decomposition of M_m(R): sizes and clutch multiplicities
/// scale by m; the rc bound divides by m.
RshDecomposition matrix_amplify(const RshDecomposition& d, int m);

} // namespace cuntzlab
