#include "cuntzlab/json_io.hpp"

#include "cuntzlab/errors.hpp"

#include <cstdio>
#include <fstream>

namespace cuntzlab::io {

namespace {

const json& require(const json& j, const char* key, const char* context) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw ValidationError(std::string(context) + ": missing field \"" + key + "\"");
    }
    return *it;
}

BigInt bigint_from_json(const json& j, const char* context) {
    if (j.is_string()) return bigint_from_string(j.get<std::string>());
    if (j.is_number_integer()) return BigInt(static_cast<long>(j.get<long long>()));
    throw ValidationError(std::string(context) + ": expected an integer or integer string");
}

} // namespace

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open \"" + path + "\"");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("\"" + path + "\": " + e.what());
    }
}

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

json rational_json(const Rational& value) { return rational_to_string(value); }

Rational rational_from_json(const json& value) {
    if (value.is_string()) return rational_from_string(value.get<std::string>());
    if (value.is_number_integer()) return Rational(static_cast<long>(value.get<long long>()));
    if (value.is_number_float()) return Rational(value.get<double>()); // exact binary rational
    throw ValidationError("expected a rational (\"p/q\", integer, or number)");
}

json space_to_json(const SampledSpace& space) {
    json points = json::array();
    for (const auto& p : space.points()) {
        json coords = json::array();
        for (const auto& c : p.coords) coords.push_back(rational_json(c));
        points.push_back({{"id", p.id}, {"coords", coords}});
    }
    json adjacency = json::array();
    for (const auto& [a, b] : space.adjacency_pairs()) adjacency.push_back({a, b});
    return {{"label", space.label()},
            {"covering_dim", space.covering_dim()},
            {"points", points},
            {"adjacency", adjacency}};
}

SpaceRef space_from_json(const json& j) {
    const std::string label = require(j, "label", "space").get<std::string>();
    const int covering_dim = require(j, "covering_dim", "space").get<int>();
    std::vector<SampledSpace::Point> points;
    for (const auto& pj : require(j, "points", "space")) {
        SampledSpace::Point p;
        p.id = require(pj, "id", "space point").get<std::string>();
        if (pj.contains("coords")) {
            for (const auto& c : pj["coords"]) p.coords.push_back(rational_from_json(c));
        }
        points.push_back(std::move(p));
    }
    std::vector<std::pair<std::string, std::string>> adjacency;
    if (j.contains("adjacency")) {
        for (const auto& pair : j["adjacency"]) {
            if (!pair.is_array() || pair.size() != 2) {
                throw ValidationError("space: adjacency entries must be [id, id] pairs");
            }
            adjacency.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
        }
    }
    return std::make_shared<const SampledSpace>(label, covering_dim, std::move(points),
                                                std::move(adjacency));
}

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (int jcol = 0; jcol < m.size(); ++jcol) {
            row.push_back({m(i, jcol).real(), m(i, jcol).imag()});
        }
        rows.push_back(row);
    }
    return rows;
}

Matrix matrix_from_json(const json& j, int n, const std::string& where) {
    if (!j.is_array() || j.size() != static_cast<size_t>(n)) {
        throw ValidationError("field value at " + where + " must be an " + std::to_string(n) +
                              "-row matrix");
    }
    Matrix m(n);
    for (int i = 0; i < n; ++i) {
        const json& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || row.size() != static_cast<size_t>(n)) {
            throw ValidationError("field value at " + where + " has a malformed row");
        }
        for (int c = 0; c < n; ++c) {
            const json& entry = row[static_cast<size_t>(c)];
            if (!entry.is_array() || entry.size() != 2) {
                throw ValidationError("field entries at " + where + " must be [re, im] pairs");
            }
            m(i, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
        }
    }
    return m;
}

json field_values_to_json(const SpaceRef& space, int n, const std::vector<Matrix>& values) {
    json out;
    out["space_label"] = space->label();
    out["n"] = n;
    json value_map = json::object();
    for (size_t i : space->sorted_order()) {
        value_map[space->point(i).id] = matrix_to_json(values[i]);
    }
    out["values"] = std::move(value_map);
    return out;
}

} // namespace

json field_to_json(const MatrixField& field) {
    return field_values_to_json(field.space(), field.n(), field.values());
}

json operator_field_to_json(const OperatorField& field) {
    return field_values_to_json(field.space(), field.n(), field.values());
}

MatrixField field_from_json(const json& j, SpaceRef space) {
    const std::string label = require(j, "space_label", "field").get<std::string>();
    if (label != space->label()) {
        throw ValidationError("field references space \"" + label + "\" but \"" + space->label() +
                              "\" was supplied");
    }
    const int n = require(j, "n", "field").get<int>();
    const json& values = require(j, "values", "field");
    std::vector<Matrix> matrices(space->point_count());
    std::vector<bool> seen(space->point_count(), false);
    for (auto it = values.begin(); it != values.end(); ++it) {
        const size_t idx = space->index_of(it.key());
        matrices[idx] = matrix_from_json(it.value(), n, "\"" + it.key() + "\"");
        seen[idx] = true;
    }
    for (size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw ValidationError("field is missing a value at \"" + space->point(i).id + "\"");
        }
    }
    return MatrixField(std::move(space), n, std::move(matrices));
}

std::vector<int> dims_from_json(const json& j, const SampledSpace& space) {
    int fallback = space.covering_dim();
    if (j.contains("default")) fallback = j["default"].get<int>();
    std::vector<int> dims(space.point_count(), fallback);
    if (j.contains("points")) {
        for (auto it = j["points"].begin(); it != j["points"].end(); ++it) {
            dims[space.index_of(it.key())] = it.value().get<int>();
        }
    }
    return dims;
}

json trace_to_json(const TraceMeasure& mu) {
    json weights = json::object();
    json sizes = json::object();
    for (size_t i : mu.space()->sorted_order()) {
        weights[mu.space()->point(i).id] = rational_json(mu.weight(i));
        sizes[mu.space()->point(i).id] = mu.matrix_size_at(i);
    }
    return {{"space_label", mu.space()->label()},
            {"weights", weights},
            {"matrix_size_at", sizes}};
}

TraceMeasure trace_from_json(const json& j, SpaceRef space) {
    const std::string label = require(j, "space_label", "trace").get<std::string>();
    if (label != space->label()) {
        throw ValidationError("trace references space \"" + label + "\"");
    }
    std::vector<Rational> weights(space->point_count(), Rational(0));
    for (auto it = require(j, "weights", "trace").begin(); it != j["weights"].end(); ++it) {
        weights[space->index_of(it.key())] = rational_from_json(it.value());
    }
    const json& sizes = require(j, "matrix_size_at", "trace");
    std::vector<int> matrix_sizes(space->point_count(), 1);
    if (sizes.is_number_integer()) {
        matrix_sizes.assign(space->point_count(), sizes.get<int>());
    } else {
        for (auto it = sizes.begin(); it != sizes.end(); ++it) {
            matrix_sizes[space->index_of(it.key())] = it.value().get<int>();
        }
    }
    return TraceMeasure(std::move(space), std::move(weights), std::move(matrix_sizes));
}

json decomposition_to_json(const RshDecomposition& d) {
    json stages = json::array();
    for (const auto& stage : d.stages()) {
        json clutch = json::array();
        for (const auto& entry : stage.clutch) {
            json targets = json::array();
            for (const auto& target : entry.targets) {
                targets.push_back({{"stage", target.stage}, {"point", target.point_id}});
            }
            clutch.push_back({{"point", entry.boundary_point_id}, {"targets", targets}});
        }
        stages.push_back({{"space", space_to_json(*stage.base_space)},
                          {"boundary", stage.boundary.member_ids()},
                          {"matrix_size", stage.matrix_size},
                          {"clutch", clutch}});
    }
    return {{"label", d.label()}, {"stages", stages}};
}

RshDecomposition decomposition_from_json(const json& j) {
    const std::string label = require(j, "label", "decomposition").get<std::string>();
    std::vector<RshStage> stages;
    for (const auto& sj : require(j, "stages", "decomposition")) {
        RshStage stage;
        stage.base_space = space_from_json(require(sj, "space", "stage"));
        std::vector<std::string> boundary_ids;
        if (sj.contains("boundary")) {
            for (const auto& id : sj["boundary"]) boundary_ids.push_back(id.get<std::string>());
        }
        stage.boundary = ClosedRegion::from_ids(stage.base_space, boundary_ids);
        stage.matrix_size = require(sj, "matrix_size", "stage").get<int>();
        if (sj.contains("clutch")) {
            for (const auto& cj : sj["clutch"]) {
                RshStage::ClutchEntry entry;
                entry.boundary_point_id = require(cj, "point", "clutch").get<std::string>();
                for (const auto& tj : require(cj, "targets", "clutch")) {
                    entry.targets.push_back(
                        {require(tj, "stage", "clutch target").get<size_t>(),
                         require(tj, "point", "clutch target").get<std::string>()});
                }
                stage.clutch.push_back(std::move(entry));
            }
        }
        stages.push_back(std::move(stage));
    }
    return RshDecomposition(label, std::move(stages));
}

json sequence_to_json(const InductiveSequence& seq) {
    json terms = json::array();
    for (const auto& term : seq.terms()) terms.push_back(decomposition_to_json(term));
    json maps = json::array();
    for (const auto& pattern : seq.maps()) {
        json wirings = json::array();
        for (const auto& wiring : pattern.stage_wirings) {
            json summands = json::array();
            for (const auto& summand : wiring) {
                summands.push_back(
                    {{"kind", summand.kind == ConnectingPattern::Summand::Kind::pullback
                                  ? "pullback"
                                  : "point_eval"},
                     {"source_stage", summand.source_stage},
                     {"multiplicity", summand.multiplicity}});
            }
            wirings.push_back(summands);
        }
        maps.push_back(wirings);
    }
    return {{"terms", terms}, {"maps", maps}};
}

InductiveSequence sequence_from_json(const json& j) {
    std::vector<RshDecomposition> terms;
    for (const auto& tj : require(j, "terms", "sequence")) {
        terms.push_back(decomposition_from_json(tj));
    }
    std::vector<ConnectingPattern> maps;
    for (const auto& mj : require(j, "maps", "sequence")) {
        ConnectingPattern pattern;
        for (const auto& wj : mj) {
            std::vector<ConnectingPattern::Summand> wiring;
            for (const auto& sj : wj) {
                ConnectingPattern::Summand summand;
                const std::string kind = require(sj, "kind", "pattern summand").get<std::string>();
                if (kind == "pullback") {
                    summand.kind = ConnectingPattern::Summand::Kind::pullback;
                } else if (kind == "point_eval") {
                    summand.kind = ConnectingPattern::Summand::Kind::point_eval;
                } else {
                    throw ValidationError("pattern summand kind must be pullback or point_eval");
                }
                summand.source_stage = require(sj, "source_stage", "pattern summand").get<size_t>();
                summand.multiplicity = require(sj, "multiplicity", "pattern summand").get<int>();
                wiring.push_back(summand);
            }
            pattern.stage_wirings.push_back(std::move(wiring));
        }
        maps.push_back(std::move(pattern));
    }
    return InductiveSequence(std::move(terms), std::move(maps));
}

json params_to_json(const VilladsenParams& p) {
    json n_seq = json::array();
    for (const auto& n : p.n_seq) n_seq.push_back(bigint_to_string(n));
    json l_seq = json::array();
    for (const auto& l : p.l_seq) l_seq.push_back(bigint_to_string(l));
    return {{"m0", bigint_to_string(p.m0)},
            {"n0", bigint_to_string(p.n0)},
            {"n_seq", n_seq},
            {"l_seq", l_seq},
            {"target_r", rational_json(p.target_r)}};
}

VilladsenParams params_from_json(const json& j) {
    VilladsenParams p;
    p.m0 = bigint_from_json(require(j, "m0", "params"), "params m0");
    p.n0 = bigint_from_json(require(j, "n0", "params"), "params n0");
    for (const auto& n : require(j, "n_seq", "params")) {
        p.n_seq.push_back(bigint_from_json(n, "params n_seq"));
    }
    for (const auto& l : require(j, "l_seq", "params")) {
        p.l_seq.push_back(bigint_from_json(l, "params l_seq"));
    }
    p.target_r = rational_from_json(require(j, "target_r", "params"));
    p.validate();
    return p;
}

json measure_to_json(const MarginalMeasure& mu) {
    json terms = json::array();
    for (const auto& term : mu.product_terms()) {
        json marginals = json::array();
        for (const auto& marginal : term.marginals) {
            json atoms = json::array();
            for (const auto& [pos, mass] : marginal.atoms) {
                atoms.push_back({rational_json(pos), rational_json(mass)});
            }
            marginals.push_back(atoms);
        }
        terms.push_back({{"weight", rational_json(term.weight)}, {"marginals", marginals}});
    }
    json atoms = json::array();
    for (const auto& atom : mu.atom_part()) {
        json point = json::array();
        for (const auto& c : atom.point) point.push_back(rational_json(c));
        atoms.push_back({{"weight", rational_json(atom.weight)}, {"point", point}});
    }
    return {{"dim", mu.dim()}, {"product_terms", terms}, {"atoms", atoms}};
}

MarginalMeasure measure_from_json(const json& j) {
    const size_t dim = require(j, "dim", "measure").get<size_t>();
    std::vector<WeightedProductTerm> terms;
    if (j.contains("product_terms")) {
        for (const auto& tj : j["product_terms"]) {
            WeightedProductTerm term;
            term.weight = rational_from_json(require(tj, "weight", "measure term"));
            for (const auto& mj : require(tj, "marginals", "measure term")) {
                DiscreteMeasure1D marginal;
                for (const auto& aj : mj) {
                    if (!aj.is_array() || aj.size() != 2) {
                        throw ValidationError("measure marginal atoms must be [pos, mass] pairs");
                    }
                    marginal.atoms.emplace_back(rational_from_json(aj[0]),
                                                rational_from_json(aj[1]));
                }
                term.marginals.push_back(std::move(marginal));
            }
            terms.push_back(std::move(term));
        }
    }
    std::vector<WeightedAtom> atoms;
    if (j.contains("atoms")) {
        for (const auto& aj : j["atoms"]) {
            WeightedAtom atom;
            atom.weight = rational_from_json(require(aj, "weight", "measure atom"));
            for (const auto& c : require(aj, "point", "measure atom")) {
                atom.point.push_back(rational_from_json(c));
            }
            atoms.push_back(std::move(atom));
        }
    }
    return MarginalMeasure(dim, std::move(terms), std::move(atoms));
}

} // namespace cuntzlab::io
