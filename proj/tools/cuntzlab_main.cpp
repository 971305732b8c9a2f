// cuntzlab: batch front door for the comparison laboratory.
//
// Exit codes: 0 success, 1 errors (bad input, precondition violations),
// 2 mathematically negative results (a false certificate, a failed scan),
// so scripts can tell refutations from crashes.

#include <cuntzlab/cuntz.hpp>
#include <cuntzlab/errors.hpp>
#include <cuntzlab/json_io.hpp>
#include <cuntzlab/rsh.hpp>
#include <cuntzlab/scalar_kit.hpp>
#include <cuntzlab/villadsen.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <set>

namespace {

using namespace cuntzlab;
using io::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;

struct CommonOptions {
    std::string output;
    std::string format = "json";
    std::uint64_t seed = 0;
    double rank_tol = kDefaultRankTol;
    bool dry_run = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts, const std::string& default_format = "json") {
    opts.format = default_format;
    cmd->add_option("--output", opts.output, "write the report to this file instead of stdout");
    cmd->add_option("--format", opts.format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", opts.seed, "seed for randomized paths (default 0)");
    cmd->add_option("--rank-tol", opts.rank_tol, "eigenvalue threshold for rank counting");
    cmd->add_flag("--dry-run", opts.dry_run, "validate inputs against their schemas, compute nothing");
}

void emit(const CommonOptions& opts, const std::string& text) {
    if (opts.output.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(opts.output, std::ios::binary);
    if (!out) throw ValidationError("cannot write \"" + opts.output + "\"");
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

void emit_json(const CommonOptions& opts, const json& j) { emit(opts, j.dump(2)); }

int finish_dry_run(const CommonOptions& opts, const std::string& command) {
    emit_json(opts, json{{"command", command}, {"dry_run", true}, {"inputs", "ok"}});
    return kExitOk;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
    CommonOptions common;
    std::string space_path, a_path, b_path, dims_path;
    bool run_witness = false;
    int restarts = 8;
    int iters = 500;
    std::string dump_witness;
};

int run_compare(const CompareArgs& args) {
    const SpaceRef space = io::space_from_json(io::load_json_file(args.space_path));
    const MatrixField a = io::field_from_json(io::load_json_file(args.a_path), space);
    const MatrixField b = io::field_from_json(io::load_json_file(args.b_path), space);
    std::vector<int> dims(space->point_count(), space->covering_dim());
    if (!args.dims_path.empty()) {
        dims = io::dims_from_json(io::load_json_file(args.dims_path), *space);
    }
    if (args.common.dry_run) return finish_dry_run(args.common, "compare");

    const RankGapCertificate cert = rank_gap_certificate(a, b, dims, args.common.rank_tol);
    json report{{"command", "compare"}, {"holds", cert.holds}};
    if (cert.witness) report["witness"] = *cert.witness;
    if (args.run_witness) {
        const WitnessSearchResult result =
            witness_search(a, b, args.restarts, args.iters, args.common.seed);
        report["witness_search"] = {{"residual", io::format_double(result.residual)},
                                    {"restarts", args.restarts},
                                    {"iters", args.iters},
                                    {"seed", args.common.seed}};
        if (!args.dump_witness.empty()) {
            std::ofstream out(args.dump_witness, std::ios::binary);
            if (!out) throw ValidationError("cannot write \"" + args.dump_witness + "\"");
            out << io::operator_field_to_json(result.v).dump(2) << '\n';
            report["witness_search"]["dumped_to"] = args.dump_witness;
        }
    }
    emit_json(args.common, report);
    return cert.holds ? kExitOk : kExitNegative;
}

// ---------------------------------------------------------------- rc-bound

struct RcBoundArgs {
    CommonOptions common;
    std::string decomp_path;
};

int run_rc_bound(const RcBoundArgs& args) {
    const RshDecomposition d = io::decomposition_from_json(io::load_json_file(args.decomp_path));
    if (args.common.dry_run) return finish_dry_run(args.common, "rc-bound");
    const Rational bound = rc_upper_bound(d);
    if (args.common.format == "json") {
        emit_json(args.common, json{{"command", "rc-bound"},
                                    {"label", d.label()},
                                    {"rc_upper_bound", rational_to_string(bound)}});
    } else {
        emit(args.common, rational_to_string(bound));
    }
    return kExitOk;
}

// ---------------------------------------------------------------- sdg-check

struct SdgArgs {
    CommonOptions common;
    std::string seq_path;
    int big_n = 49;
    size_t from_index = 0;
};

int run_sdg(const SdgArgs& args) {
    const InductiveSequence seq = io::sequence_from_json(io::load_json_file(args.seq_path));
    if (args.common.dry_run) return finish_dry_run(args.common, "sdg-check");
    const SlowDimensionGrowthResult result =
        slow_dimension_growth_check(seq, args.big_n, args.from_index);
    json report{{"command", "sdg-check"}, {"N", args.big_n}, {"from", args.from_index},
                {"found", result.found}};
    if (result.found) report["j0"] = result.j0;
    emit_json(args.common, report);
    return result.found ? kExitOk : kExitNegative;
}

// ---------------------------------------------------------------- villadsen

struct VilladsenArgs {
    CommonOptions common;
    std::string params_path;
    size_t stages = 0;
    bool validate = false;
    bool k0 = false;
    long q_max = 10;
};

int run_villadsen(const VilladsenArgs& args) {
    const VilladsenParams params = io::params_from_json(io::load_json_file(args.params_path));
    if (args.common.dry_run) return finish_dry_run(args.common, "villadsen");
    const size_t stages = std::min(args.stages, params.max_stage());
    const auto table = stage_table(params, stages);

    if (args.common.format == "csv" && !args.validate && !args.k0) {
        std::string csv = "i,m_i,N_i,rc_i,ratio_i\n";
        for (const auto& s : table) {
            csv += std::to_string(s.i) + "," + bigint_to_string(s.m_i) + "," +
                   bigint_to_string(s.N_i) + "," + rational_to_string(s.rc_i) + "," +
                   rational_to_string(s.ratio_i) + "\n";
        }
        emit(args.common, csv);
        return kExitOk;
    }

    json rows = json::array();
    for (const auto& s : table) {
        rows.push_back({{"i", s.i},
                        {"m_i", bigint_to_string(s.m_i)},
                        {"N_i", bigint_to_string(s.N_i)},
                        {"rc_i", rational_to_string(s.rc_i)},
                        {"ratio_i", rational_to_string(s.ratio_i)}});
    }
    json report{{"command", "villadsen"}, {"stages", stages}, {"table", rows}};
    bool negative = false;
    if (args.validate) {
        const ParamsReport validation = validate_params(params, stages, args.q_max);
        json running = json::array();
        for (const auto& r : validation.running_ratios) running.push_back(rational_to_string(r));
        report["validation"] = {{"growth_ok", validation.growth_ok},
                                {"convergence_ok", validation.convergence_ok},
                                {"final_gap", rational_to_string(validation.final_gap)},
                                {"running_ratios", running},
                                {"nonzero_l_ok", validation.nonzero_l_ok},
                                {"q_max", validation.q_max},
                                {"divisibility_ok", validation.divisibility_ok},
                                {"prefix_verified", validation.all_ok()}};
        negative = negative || !validation.all_ok();
    }
    if (args.k0) {
        const K0Report k0 = k0_divisibility(params, args.q_max);
        json witnesses = json::array();
        for (const auto& [q, witness] : k0.witnesses) {
            json entry{{"q", q}};
            if (witness) entry["least_i"] = *witness;
            else entry["least_i"] = nullptr;
            witnesses.push_back(entry);
        }
        report["k0_divisibility"] = {{"q_max", k0.q_max},
                                     {"all_witnessed", k0.all_witnessed},
                                     {"witnesses", witnesses}};
        negative = negative || !k0.all_witnessed;
    }
    emit_json(args.common, report);
    return negative ? kExitNegative : kExitOk;
}

// ---------------------------------------------------------------- intertwine

struct IntertwineArgs {
    CommonOptions common;
    long n1 = 0, m1 = 0, n2 = 0;
    std::string mu_path;
    std::string direction;
    std::string out_path;
};

int run_intertwine(const IntertwineArgs& args) {
    if (!(args.n1 >= 1 && args.n1 <= args.m1 && args.m1 <= args.n2)) {
        throw PreconditionError("intertwine requires 1 <= N1 <= M1 <= N2");
    }
    std::optional<MarginalMeasure> mu;
    if (!args.mu_path.empty()) mu = io::measure_from_json(io::load_json_file(args.mu_path));
    if (args.common.dry_run) return finish_dry_run(args.common, "intertwine");

    const IntertwineDefect defect = intertwine_defect(args.n1, args.m1, args.n2);
    json report{{"command", "intertwine"},
                {"N1", args.n1},
                {"M1", args.m1},
                {"N2", args.n2},
                {"L", defect.l_count},
                {"bound", rational_to_string(defect.bound)}};
    if (mu) {
        if (args.direction.empty()) {
            throw ValidationError("--direction gamma|delta is required with --mu");
        }
        const IntertwineDirection dir = (args.direction == "gamma") ? IntertwineDirection::gamma
                                                                     : IntertwineDirection::delta;
        const MarginalMeasure image = intertwine_apply(*mu, dir, args.n1, args.m1, args.n2);
        const json image_json = io::measure_to_json(image);
        if (!args.out_path.empty()) {
            std::ofstream out(args.out_path, std::ios::binary);
            if (!out) throw ValidationError("cannot write \"" + args.out_path + "\"");
            out << image_json.dump(2) << '\n';
            report["image_written_to"] = args.out_path;
        } else {
            report["image"] = image_json;
        }
    }
    emit_json(args.common, report);
    return kExitOk;
}

// ---------------------------------------------------------------- semigroup

struct SemigroupArgs {
    CommonOptions common;
    std::string input_path;
};

WElement welement_from_json(const json& j, const SpaceRef& space, size_t trace_count) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "soft") {
        LAffFunction f;
        for (const auto& v : j.at("values")) f.values.push_back(io::rational_from_json(v));
        if (f.values.size() != trace_count) {
            throw ValidationError("soft element has the wrong number of trace values");
        }
        return f;
    }
    if (kind != "projection") throw ValidationError("element kind must be projection or soft");
    std::vector<int> ranks(space->point_count(), 0);
    for (auto it = j.at("ranks").begin(); it != j.at("ranks").end(); ++it) {
        ranks[space->index_of(it.key())] = it.value().get<int>();
    }
    LAffFunction iota;
    for (const auto& v : j.at("iota")) iota.values.push_back(io::rational_from_json(v));
    if (iota.values.size() != trace_count) {
        throw ValidationError("projection element has the wrong number of iota values");
    }
    std::string label = j.value("label", "");
    return CuntzClassRepr{CuntzClassRepr::Kind::projection,
                          RankFunction(space, kDefaultRankTol, std::move(ranks)), std::move(iota),
                          std::move(label)};
}

json welement_to_json(const WElement& e) {
    if (std::holds_alternative<LAffFunction>(e)) {
        json values = json::array();
        for (const auto& v : std::get<LAffFunction>(e).values) {
            values.push_back(rational_to_string(v));
        }
        return {{"kind", "soft"}, {"values", values}};
    }
    const auto& repr = std::get<CuntzClassRepr>(e);
    json ranks = json::object();
    const auto& space = repr.rank_fn.space();
    for (size_t i : space->sorted_order()) {
        ranks[space->point(i).id] = repr.rank_fn.at(i);
    }
    json iota = json::array();
    for (const auto& v : repr.iota.values) iota.push_back(rational_to_string(v));
    return {{"kind", "projection"}, {"ranks", ranks}, {"iota", iota}, {"label", repr.label}};
}

int run_semigroup(const SemigroupArgs& args) {
    const json input = io::load_json_file(args.input_path);
    const std::string op = input.at("op").get<std::string>();
    if (op != "add" && op != "leq") throw ValidationError("op must be add or leq");
    const size_t trace_count = input.at("trace_count").get<size_t>();

    // Projection operands compare rank functions pointwise, so both live on
    // one shared discrete space assembled from the union of their supports.
    std::set<std::string> ids;
    for (const char* side : {"lhs", "rhs"}) {
        const json& element = input.at(side);
        if (element.at("kind") == "projection") {
            for (auto it = element.at("ranks").begin(); it != element.at("ranks").end(); ++it) {
                ids.insert(it.key());
            }
        }
    }
    std::vector<SampledSpace::Point> points;
    for (const auto& id : ids) points.push_back({id, {}});
    SpaceRef space = std::make_shared<const SampledSpace>(
        "welements", 0, std::move(points), std::vector<std::pair<std::string, std::string>>{});

    const WElement lhs = welement_from_json(input.at("lhs"), space, trace_count);
    const WElement rhs = welement_from_json(input.at("rhs"), space, trace_count);
    if (args.common.dry_run) return finish_dry_run(args.common, "semigroup");

    json report{{"command", "semigroup"}, {"op", op}};
    if (op == "add") {
        const WElement sum = w_add(lhs, rhs);
        report["result"] = welement_to_json(sum);
        if (std::holds_alternative<LAffFunction>(sum) &&
            !std::get<LAffFunction>(sum).strictly_positive()) {
            report["strictly_positive"] = false; // boundary element, flagged
        }
    } else {
        report["lhs_leq_rhs"] = w_leq(lhs, rhs);
        report["rhs_leq_lhs"] = w_leq(rhs, lhs);
    }
    emit_json(args.common, report);
    return kExitOk;
}

// ---------------------------------------------------------------- ell

struct EllArgs {
    CommonOptions common;
    std::string space_path, field_path, compare_path, traces_path;
    int bins = 10;
};

json invariant_to_json(const SpectralInvariant& inv) {
    json distributions = json::array();
    for (const auto& dist : inv.distributions) {
        json row = json::array();
        for (const auto& mass : dist) row.push_back(rational_to_string(mass));
        distributions.push_back(row);
    }
    return {{"bins", inv.bins}, {"spectrum", inv.spectrum}, {"distributions", distributions}};
}

int run_ell(const EllArgs& args) {
    const SpaceRef space = io::space_from_json(io::load_json_file(args.space_path));
    const MatrixField a = io::field_from_json(io::load_json_file(args.field_path), space);
    std::vector<TraceMeasure> traces;
    for (const auto& tj : io::load_json_file(args.traces_path)) {
        traces.push_back(io::trace_from_json(tj, space));
    }
    std::optional<MatrixField> b;
    if (!args.compare_path.empty()) {
        b = io::field_from_json(io::load_json_file(args.compare_path), space);
    }
    if (args.common.dry_run) return finish_dry_run(args.common, "ell");

    const SpectralInvariant inv_a = ell_invariant(a, traces, args.bins);
    json report{{"command", "ell"}, {"invariant", invariant_to_json(inv_a)}};
    bool negative = false;
    if (b) {
        const SpectralInvariant inv_b = ell_invariant(*b, traces, args.bins);
        const bool equal = au_equivalent_candidates(inv_a, inv_b);
        report["compare_invariant"] = invariant_to_json(inv_b);
        report["au_equivalent_candidates"] = equal;
        negative = !equal;
    }
    emit_json(args.common, report);
    return negative ? kExitNegative : kExitOk;
}

// ---------------------------------------------------------------- make-grid

struct MakeGridArgs {
    CommonOptions common;
    std::vector<int> dims;
    int resolution = 1;
    std::string label;
};

int run_make_grid(const MakeGridArgs& args) {
    if (args.common.dry_run) {
        if (args.dims.empty() || args.resolution < 1) {
            throw PreconditionError("make-grid needs nonempty dims and resolution >= 1");
        }
        return finish_dry_run(args.common, "make-grid");
    }
    const SpaceRef space = make_grid(args.dims, args.resolution, args.label);
    emit_json(args.common, io::space_to_json(*space));
    return kExitOk;
}

// ---------------------------------------------------------------- kit-test

struct KitArgs {
    CommonOptions common;
    double delta = 0.5;
    double s = 0.0;
    int grid = 1000;
    double tol = 1e-12;
};

int run_kit(const KitArgs& args) {
    const ScalarKit kit(args.delta, args.s); // validates delta and s
    if (args.common.dry_run) return finish_dry_run(args.common, "kit-test");
    double worst_tg = 0.0, worst_hg = 0.0, worst_rw_low = 0.0, worst_rw_high = 0.0;
    for (int i = 0; i < args.grid; ++i) {
        const double t = (args.grid == 1) ? 0.0 : i / static_cast<double>(args.grid - 1);
        worst_tg = std::max(worst_tg, std::abs(t * kit.g(t) - kit.f(t)));
        worst_hg = std::max(worst_hg, std::abs(kit.h(t) * kit.g_s(t) - kit.f(t)));
        const double rw = kit.r(t) * kit.w(t);
        worst_rw_low = std::max(worst_rw_low, kit.f(t) - rw);
        worst_rw_high = std::max(worst_rw_high, rw - 1.0);
    }
    const bool ok = worst_tg <= args.tol && worst_hg <= args.tol && worst_rw_low <= args.tol &&
                    worst_rw_high <= args.tol;
    emit_json(args.common,
              json{{"command", "kit-test"},
                   {"delta", io::format_double(args.delta)},
                   {"s", io::format_double(args.s)},
                   {"grid", args.grid},
                   {"tol", io::format_double(args.tol)},
                   {"max_dev_t_g_vs_f", io::format_double(worst_tg)},
                   {"max_dev_h_gs_vs_f", io::format_double(worst_hg)},
                   {"max_dev_f_above_rw", io::format_double(worst_rw_low)},
                   {"max_dev_rw_above_one", io::format_double(worst_rw_high)},
                   {"ok", ok}});
    return ok ? kExitOk : kExitNegative;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cuntzlab: comparison certificates, rc bounds, and exact AH bookkeeping"};
    app.require_subcommand(1);

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "rank-gap Cuntz subequivalence certificate");
    add_common(compare, compare_args.common);
    compare->add_option("--space", compare_args.space_path, "space JSON")->required();
    compare->add_option("--a", compare_args.a_path, "left field JSON")->required();
    compare->add_option("--b", compare_args.b_path, "right field JSON")->required();
    compare->add_option("--dims", compare_args.dims_path, "per-point dimension JSON");
    compare->add_flag("--witness-search", compare_args.run_witness, "also run the numerical oracle");
    compare->add_option("--restarts", compare_args.restarts, "witness search restarts");
    compare->add_option("--iters", compare_args.iters, "witness search iterations per restart");
    compare->add_option("--dump-witness", compare_args.dump_witness, "write the witness field here");

    RcBoundArgs rc_args;
    auto* rc = app.add_subcommand("rc-bound", "radius-of-comparison upper bound of a decomposition");
    add_common(rc, rc_args.common, "csv");
    rc->add_option("--decomp", rc_args.decomp_path, "decomposition JSON")->required();

    SdgArgs sdg_args;
    auto* sdg = app.add_subcommand("sdg-check", "slow-dimension-growth scan of a sequence");
    add_common(sdg, sdg_args.common);
    sdg->add_option("--seq", sdg_args.seq_path, "inductive sequence JSON")->required();
    sdg->add_option("--N", sdg_args.big_n, "growth factor (default 49)");
    sdg->add_option("--from", sdg_args.from_index, "start index i (default 0)");

    VilladsenArgs villadsen_args;
    auto* villadsen = app.add_subcommand("villadsen", "stage invariants of an AH parameter set");
    add_common(villadsen, villadsen_args.common, "csv");
    villadsen->add_option("--params", villadsen_args.params_path, "parameter JSON")->required();
    villadsen->add_option("--stages", villadsen_args.stages, "number of stages to tabulate")
        ->required();
    villadsen->add_flag("--validate", villadsen_args.validate, "run the condition validator");
    villadsen->add_flag("--k0", villadsen_args.k0, "emit divisibility witnesses");
    villadsen->add_option("--qmax", villadsen_args.q_max, "divisibility bound (default 10)");

    IntertwineArgs intertwine_args;
    auto* intertwine = app.add_subcommand("intertwine", "block-containment defect and measure maps");
    add_common(intertwine, intertwine_args.common);
    intertwine->add_option("--N1", intertwine_args.n1)->required();
    intertwine->add_option("--M1", intertwine_args.m1)->required();
    intertwine->add_option("--N2", intertwine_args.n2)->required();
    intertwine->add_option("--mu", intertwine_args.mu_path, "marginal measure JSON");
    intertwine->add_option("--direction", intertwine_args.direction, "gamma or delta")
        ->check(CLI::IsMember({"gamma", "delta"}));
    intertwine->add_option("--out", intertwine_args.out_path, "write the image measure here");

    SemigroupArgs semigroup_args;
    auto* semigroup = app.add_subcommand("semigroup", "W-element addition and order");
    add_common(semigroup, semigroup_args.common);
    semigroup->add_option("--input", semigroup_args.input_path, "operation JSON")->required();

    EllArgs ell_args;
    auto* ell = app.add_subcommand("ell", "unitary-orbit spectral invariant");
    add_common(ell, ell_args.common);
    ell->add_option("--space", ell_args.space_path, "space JSON")->required();
    ell->add_option("--field", ell_args.field_path, "field JSON")->required();
    ell->add_option("--compare", ell_args.compare_path, "second field JSON to compare");
    ell->add_option("--traces", ell_args.traces_path, "trace measure list JSON")->required();
    ell->add_option("--bins", ell_args.bins, "spectral resolution (default 10)");

    MakeGridArgs grid_args;
    auto* grid = app.add_subcommand("make-grid", "write a cube grid space JSON");
    add_common(grid, grid_args.common);
    grid->add_option("--dims", grid_args.dims, "cube factor dimensions, e.g. --dims 2 or --dims 1 1")
        ->required();
    grid->add_option("--resolution", grid_args.resolution, "samples per axis minus one")->required();
    grid->add_option("--label", grid_args.label, "space label (default derived)");

    KitArgs kit_args;
    auto* kit = app.add_subcommand("kit-test", "scalar kit identity check");
    add_common(kit, kit_args.common);
    kit->add_option("--delta", kit_args.delta, "delta in (0,1]")->required();
    kit->add_option("--s", kit_args.s, "homotopy parameter in [0,1]");
    kit->add_option("--grid", kit_args.grid, "t-grid size (default 1000)");
    kit->add_option("--tol", kit_args.tol, "identity tolerance (default 1e-12)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compare->parsed()) return run_compare(compare_args);
        if (rc->parsed()) return run_rc_bound(rc_args);
        if (sdg->parsed()) return run_sdg(sdg_args);
        if (villadsen->parsed()) return run_villadsen(villadsen_args);
        if (intertwine->parsed()) return run_intertwine(intertwine_args);
        if (semigroup->parsed()) return run_semigroup(semigroup_args);
        if (ell->parsed()) return run_ell(ell_args);
        if (grid->parsed()) return run_make_grid(grid_args);
        if (kit->parsed()) return run_kit(kit_args);
    } catch (const Error& e) {
        std::cerr << "cuntzlab: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "cuntzlab: internal error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
