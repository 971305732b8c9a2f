#include "cuntzlab/space.hpp"

#include "cuntzlab/errors.hpp"

#include <algorithm>
#include <numeric>

namespace cuntzlab {

SampledSpace::SampledSpace(std::string label, int covering_dim, std::vector<Point> points,
                           std::vector<std::pair<std::string, std::string>> adjacency)
    : label_(std::move(label)), covering_dim_(covering_dim), points_(std::move(points)) {
    if (covering_dim_ < 0) throw ValidationError("covering_dim must be nonnegative");
    for (size_t i = 0; i < points_.size(); ++i) {
        if (!index_.emplace(points_[i].id, i).second) {
            throw ValidationError("duplicate point id \"" + points_[i].id + "\"");
        }
    }
    neighbors_.assign(points_.size(), {});
    for (const auto& [lhs, rhs] : adjacency) {
        const size_t a = index_of(lhs);
        const size_t b = index_of(rhs);
        if (a == b) throw ValidationError("adjacency must be irreflexive: " + lhs);
        neighbors_[a].push_back(b);
        neighbors_[b].push_back(a);
    }
    for (auto& list : neighbors_) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    sorted_order_.resize(points_.size());
    std::iota(sorted_order_.begin(), sorted_order_.end(), size_t{0});
    std::sort(sorted_order_.begin(), sorted_order_.end(),
              [&](size_t a, size_t b) { return points_[a].id < points_[b].id; });
}

SpaceRef SampledSpace::single_point(std::string label, int covering_dim) {
    std::vector<Point> pts;
    pts.push_back(Point{"pt", {}});
    return std::make_shared<const SampledSpace>(std::move(label), covering_dim, std::move(pts),
                                                std::vector<std::pair<std::string, std::string>>{});
}

size_t SampledSpace::index_of(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) throw ValidationError("unknown point id \"" + id + "\"");
    return it->second;
}

bool SampledSpace::has_point(const std::string& id) const { return index_.count(id) > 0; }

bool SampledSpace::adjacent(size_t a, size_t b) const {
    const auto& list = neighbors_[a];
    return std::binary_search(list.begin(), list.end(), b);
}

std::vector<std::pair<std::string, std::string>> SampledSpace::adjacency_pairs() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (size_t i = 0; i < points_.size(); ++i) {
        for (size_t j : neighbors_[i]) {
            if (i < j) out.emplace_back(points_[i].id, points_[j].id);
        }
    }
    return out;
}

SpaceRef make_grid(const std::vector<int>& dims, int resolution, std::string label) {
    if (dims.empty()) throw PreconditionError("make_grid: dims must be nonempty");
    for (int d : dims) {
        if (d <= 0) throw PreconditionError("make_grid: dims entries must be positive");
    }
    if (resolution < 1) throw PreconditionError("make_grid: resolution must be >= 1");

    const int axes = std::accumulate(dims.begin(), dims.end(), 0);
    const int samples = resolution + 1;

    size_t total = 1;
    for (int a = 0; a < axes; ++a) {
        total *= static_cast<size_t>(samples);
        if (total > size_t{1} << 24) throw PreconditionError("make_grid: grid too large");
    }

    std::vector<SampledSpace::Point> points;
    points.reserve(total);
    std::vector<int> lattice(static_cast<size_t>(axes), 0);
    const auto id_of = [&](const std::vector<int>& lat) {
        std::string id;
        for (size_t a = 0; a < lat.size(); ++a) {
            if (a) id += '_';
            id += std::to_string(lat[a]);
        }
        return id;
    };
    for (size_t linear = 0; linear < total; ++linear) {
        size_t rem = linear;
        for (int a = axes - 1; a >= 0; --a) {
            lattice[static_cast<size_t>(a)] = static_cast<int>(rem % static_cast<size_t>(samples));
            rem /= static_cast<size_t>(samples);
        }
        SampledSpace::Point p;
        p.id = id_of(lattice);
        p.coords.reserve(static_cast<size_t>(axes));
        for (int a = 0; a < axes; ++a) {
            p.coords.push_back(make_rational(lattice[static_cast<size_t>(a)], resolution));
        }
        points.push_back(std::move(p));
    }

    std::vector<std::pair<std::string, std::string>> adjacency;
    for (size_t linear = 0; linear < total; ++linear) {
        size_t rem = linear;
        for (int a = axes - 1; a >= 0; --a) {
            lattice[static_cast<size_t>(a)] = static_cast<int>(rem % static_cast<size_t>(samples));
            rem /= static_cast<size_t>(samples);
        }
        const std::string here = id_of(lattice);
        for (int a = 0; a < axes; ++a) {
            if (lattice[static_cast<size_t>(a)] + 1 < samples) {
                lattice[static_cast<size_t>(a)] += 1;
                adjacency.emplace_back(here, id_of(lattice));
                lattice[static_cast<size_t>(a)] -= 1;
            }
        }
    }

    if (label.empty()) {
        label = "grid" + std::to_string(axes) + "d_r" + std::to_string(resolution);
    }
    return std::make_shared<const SampledSpace>(std::move(label), axes, std::move(points),
                                                std::move(adjacency));
}

ClosedRegion::ClosedRegion(SpaceRef space, std::vector<size_t> member_indices)
    : space_(std::move(space)), members_(std::move(member_indices)) {
    if (!space_) throw ValidationError("region requires a space");
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (!members_.empty() && members_.back() >= space_->point_count()) {
        throw ValidationError("region member outside its space");
    }
}

ClosedRegion ClosedRegion::from_ids(SpaceRef space, const std::vector<std::string>& ids) {
    std::vector<size_t> indices;
    indices.reserve(ids.size());
    for (const auto& id : ids) indices.push_back(space->index_of(id));
    return ClosedRegion(std::move(space), std::move(indices));
}

bool ClosedRegion::contains(size_t index) const {
    return std::binary_search(members_.begin(), members_.end(), index);
}

std::vector<std::string> ClosedRegion::member_ids() const {
    std::vector<std::string> ids;
    ids.reserve(members_.size());
    for (size_t i : members_) ids.push_back(space_->point(i).id);
    return ids;
}

ClosedRegion closed_neighborhood(const ClosedRegion& region) {
    std::vector<size_t> out = region.members();
    for (size_t member : region.members()) {
        const auto& nbrs = region.space()->neighbors(member);
        out.insert(out.end(), nbrs.begin(), nbrs.end());
    }
    return ClosedRegion(region.space(), std::move(out));
}

} // namespace cuntzlab
