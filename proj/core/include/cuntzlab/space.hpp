#pragma once

#include "cuntzlab/rational.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace cuntzlab {

/// A finite discretisation of a compact space.  The covering dimension is
/// declared metadata supplied with the space, never inferred from the
/// sample: the dimension of the underlying continuum is not recoverable
/// from finitely many points.  Topology enters only through the adjacency
/// relation, which drives the semicontinuity-style checks downstream.
///
/// Immutable after construction; shared by every field living on it.
class SampledSpace {
public:
    struct Point {
        std::string id;
        std::vector<Rational> coords;
    };

    SampledSpace(std::string label, int covering_dim, std::vector<Point> points,
                 std::vector<std::pair<std::string, std::string>> adjacency);

    /// A space with a single point "pt" and the declared dimension.
    /// Enough substrate for computations that only read dimension metadata.
    static std::shared_ptr<const SampledSpace> single_point(std::string label, int covering_dim);

    const std::string& label() const { return label_; }
    int covering_dim() const { return covering_dim_; }
    size_t point_count() const { return points_.size(); }
    const Point& point(size_t index) const { return points_[index]; }
    const std::vector<Point>& points() const { return points_; }

    size_t index_of(const std::string& id) const;
    bool has_point(const std::string& id) const;

    const std::vector<size_t>& neighbors(size_t index) const { return neighbors_[index]; }
    bool adjacent(size_t a, size_t b) const;

    /// Point indices ordered by id; all norm-style reductions iterate in
    /// this order so results do not depend on construction order.
    const std::vector<size_t>& sorted_order() const { return sorted_order_; }

    std::vector<std::pair<std::string, std::string>> adjacency_pairs() const;

private:
    std::string label_;
    int covering_dim_ = 0;
    std::vector<Point> points_;
    std::map<std::string, size_t> index_;
    std::vector<std::vector<size_t>> neighbors_;
    std::vector<size_t> sorted_order_;
};

using SpaceRef = std::shared_ptr<const SampledSpace>;

/// Uniform grid on the cube [0,1]^N where N = sum(dims), sampled
/// (resolution+1) times per axis, exact rational coordinates, covering_dim
/// = N, adjacency between samples differing by one step on one axis.
SpaceRef make_grid(const std::vector<int>& dims, int resolution, std::string label = {});

/// A subset of a space's points, standing in for a closed set.
class ClosedRegion {
public:
    ClosedRegion() = default; // detached; usable only after reassignment
    ClosedRegion(SpaceRef space, std::vector<size_t> member_indices);
    static ClosedRegion from_ids(SpaceRef space, const std::vector<std::string>& ids);

    const SpaceRef& space() const { return space_; }
    const std::vector<size_t>& members() const { return members_; }
    bool contains(size_t index) const;
    bool empty() const { return members_.empty(); }
    std::vector<std::string> member_ids() const;

private:
    SpaceRef space_;
    std::vector<size_t> members_; // sorted, unique
};

/// The region together with every point adjacent to it: the sampled stand-in
/// for the closure of a point set.
ClosedRegion closed_neighborhood(const ClosedRegion& region);

} // namespace cuntzlab
