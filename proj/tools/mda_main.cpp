// Command-line front end: reproducible experiment runs with serialized
// outputs. Exit codes: 0 ok, 1 verification failure, 2 usage or envelope.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mda/enumerate.hpp"
#include "mda/flow.hpp"
#include "mda/io.hpp"
#include "mda/measure.hpp"
#include "mda/packet.hpp"
#include "mda/returns.hpp"
#include "mda/verify.hpp"

using namespace mda;

namespace {

struct RunConfig {
    std::string m_parts = "1";
    std::string n_parts = "1";
    std::string norms = "sup";
    double eps = 0.5;
    std::string eta = "0.4";
    int shape_index = 0; // 0 = d
    std::string moduli = "2,3";
    std::string theta;       // explicit entries
    std::uint64_t theta_seed = 1;
    unsigned theta_bits = 0; // >0 selects a rational single-entry target
    std::string precision = "f64";
    std::uint64_t seed = 1;
    double T = 8.0;
    std::string mode = "epsilon";
    long long s = 1;
    std::string ordering = "increasing-q";
    int workers = 1;
    std::string out_dir;
    std::string format = "csv";

    std::string canonical() const {
        std::ostringstream o;
        o << "eps=" << format_double(eps) << "\neta=" << eta << "\nformat=" << format
          << "\nj=" << shape_index << "\nm_parts=" << m_parts << "\nmode=" << mode
          << "\nmoduli=" << moduli << "\nn_parts=" << n_parts << "\nnorms=" << norms
          << "\nordering=" << ordering << "\nprecision=" << precision << "\ns=" << s
          << "\nseed=" << seed << "\nT=" << format_double(T) << "\ntheta=" << theta
          << "\ntheta_bits=" << theta_bits << "\ntheta_seed=" << theta_seed
          << "\nworkers=" << workers << "\n";
        return o.str();
    }
};

std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

struct Problem {
    Decomposition dec;
    NormSpec norms;
    Params params;
    Target target;
};

Problem build_problem(const RunConfig& cfg) {
    Decomposition dec(parse_ints(cfg.m_parts), parse_ints(cfg.n_parts));

    std::vector<std::string> kindNames;
    {
        std::istringstream in(cfg.norms);
        std::string tok;
        while (std::getline(in, tok, ',')) kindNames.push_back(tok);
    }
    NormSpec ns;
    if (kindNames.size() == 1)
        ns = NormSpec::all(norm_kind_from_name(kindNames[0]), dec);
    else
        for (const auto& k : kindNames) ns.kinds.push_back(norm_kind_from_name(k));
    ns.validate(dec);

    Params params;
    params.epsilon = cfg.eps;
    auto etas = parse_doubles(cfg.eta);
    if (static_cast<int>(etas.size()) == 1) etas.assign(dec.k(), etas[0]);
    params.etas = etas;
    params.shape_index = cfg.shape_index > 0 ? cfg.shape_index : dec.d();
    params.congruence_moduli = parse_ints(cfg.moduli);
    params.validate(dec);

    Precision prec = precision_from_name(cfg.precision);
    Target target;
    if (cfg.theta_bits > 0) {
        if (dec.m() != 1 || dec.n() != 1)
            throw std::invalid_argument("--theta-bits requires m = n = 1");
        target = Target::random_rational(cfg.theta_seed, cfg.theta_bits);
    } else if (!cfg.theta.empty()) {
        target = Target::from_doubles(dec.m(), dec.n(), parse_doubles(cfg.theta), prec);
    } else {
        target = Target::random(dec.m(), dec.n(), cfg.theta_seed, prec);
    }
    return Problem{dec, ns, params, target};
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    std::string dir = cfg.out_dir;
    if (dir.empty()) {
        const char* env = std::getenv("MDA_OUT_DIR");
        dir = env ? env : ".";
    }
    std::filesystem::create_directories(dir);
    return dir + "/" + name;
}

void emit(const RunConfig& cfg, const std::string& base, const std::string& csv,
          const OutputMeta& meta, long long members, long long degenerate) {
    if (cfg.format == "json") {
        write_file(out_path(cfg, base + ".json"), csv_to_json_rows(csv, meta));
    } else {
        write_file(out_path(cfg, base + ".csv"), csv);
        write_file(out_path(cfg, base + ".meta.json"), sidecar_json(meta, members, degenerate));
    }
}

int cmd_enumerate(const RunConfig& cfg) {
    Problem pr = build_problem(cfg);
    EnumConfig ec;
    ec.T = cfg.T;
    ec.mode = cfg.mode == "epsilon-star" ? EnumMode::EpsilonStar : EnumMode::Epsilon;
    ec.s = cfg.s;
    ec.workers = cfg.workers;
    ApproximateStream stream;
    if (cfg.theta_bits > 0 && cfg.precision == "rational" && pr.dec.d() == 2 &&
        cfg.mode != "epsilon-star" && pr.params.epsilon < 0.5 && pr.params.etas[0] < 0.5) {
        CfOptions cf;
        cf.T = cfg.T;
        stream = enumerate_cf(pr.target, pr.params, cf);
    } else {
        stream = enumerate_direct(pr.target, pr.params, pr.dec, pr.norms, ec);
    }
    if (cfg.ordering == "decreasing-error")
        stream = order_stream(stream, Ordering::ByDecreasingErrorBlock, pr.target, pr.params,
                              pr.dec, pr.norms);
    OutputMeta meta{"stream-v1", cfg.canonical(), cfg.seed};
    emit(cfg, "stream", stream_csv(stream, pr.target, pr.dec, pr.norms), meta,
         static_cast<long long>(stream.members.size()),
         static_cast<long long>(stream.degenerate.size()));
    return 0;
}

int cmd_packets(const RunConfig& cfg) {
    Problem pr = build_problem(cfg);
    EnumConfig ec;
    ec.T = cfg.T;
    ec.workers = cfg.workers;
    auto stream = enumerate_direct(pr.target, pr.params, pr.dec, pr.norms, ec);
    std::vector<Packet> packets;
    long long undefined = 0;
    for (const auto& a : stream.members) {
        auto pk = compute_packet(pr.target, a, pr.params, pr.dec, pr.norms);
        if (pk)
            packets.push_back(std::move(*pk));
        else
            ++undefined;
    }
    OutputMeta meta{"packet-v1", cfg.canonical(), cfg.seed};
    emit(cfg, "packets", packets_csv(packets, pr.dec, pr.params), meta,
         static_cast<long long>(packets.size()), undefined);
    return 0;
}

int cmd_flow(const RunConfig& cfg, const std::string& experiment, const std::string& boxSpec,
             long long minNodes) {
    Problem pr = build_problem(cfg);
    if (experiment == "visits") {
        EnumConfig ec;
        ec.T = cfg.T;
        ec.workers = cfg.workers;
        auto stream = enumerate_direct(pr.target, pr.params, pr.dec, pr.norms, ec);
        auto recs = visit_times(stream, pr.target, pr.params, pr.dec, pr.norms);
        OutputMeta meta{"visits-v1", cfg.canonical(), cfg.seed};
        emit(cfg, "visits", visits_csv(recs, stream, pr.dec), meta,
             static_cast<long long>(recs.size()), 0);
        return 0;
    }
    // birkhoff experiment
    auto vals = parse_doubles(boxSpec);
    if (vals.size() != static_cast<size_t>(2 * pr.dec.d()))
        throw std::invalid_argument("--box needs 2d comma-separated numbers (lo..., hi...)");
    Box w;
    w.lo.assign(vals.begin(), vals.begin() + pr.dec.d());
    w.hi.assign(vals.begin() + pr.dec.d(), vals.end());
    auto full = birkhoff_average(pr.target, w, pr.dec, pr.norms, cfg.T, minNodes, cfg.seed);
    auto half = birkhoff_average(pr.target, w, pr.dec, pr.norms, cfg.T / 2, minNodes, cfg.seed + 1);
    nlohmann::json j;
    j["schema"] = "birkhoff-v1";
    j["config_hash"] = fnv1a(cfg.canonical());
    j["seed"] = cfg.seed;
    j["box_lo"] = w.lo;
    j["box_hi"] = w.hi;
    j["grid_nodes"] = full.grid_nodes;
    j["polytope_volume"] = full.polytope_volume;
    j["averages"] = nlohmann::json::array(
        {nlohmann::json{{"T", cfg.T}, {"average", full.average}},
         nlohmann::json{{"T", cfg.T / 2}, {"average", half.average}}});
    write_file(out_path(cfg, "birkhoff.json"), j.dump(2) + "\n");
    return 0;
}

int cmd_returns(const RunConfig& cfg, int shift, const std::string& errRange,
                const std::string& betaRange, bool useCf) {
    Problem pr = build_problem(cfg);
    PacketConstraint constraint;
    if (!errRange.empty()) {
        auto v = parse_doubles(errRange);
        constraint.error_range = {{v.at(0), v.at(1)}};
    }
    if (!betaRange.empty()) {
        auto v = parse_doubles(betaRange);
        constraint.beta_range = {{v.at(0), v.at(1)}};
    }
    ReturnSeries series;
    if (useCf) {
        CfOptions cf;
        cf.T = cfg.T;
        series = build_return_series_cf(pr.target, pr.params, cf, constraint);
    } else {
        EnumConfig ec;
        ec.T = cfg.T;
        ec.workers = cfg.workers;
        auto stream = enumerate_direct(pr.target, pr.params, pr.dec, pr.norms, ec);
        series = build_return_series(stream, pr.target, pr.params, pr.dec, pr.norms, constraint);
    }
    OutputMeta meta{"series-v1", cfg.canonical(), cfg.seed};
    emit(cfg, "series", series_csv(series), meta,
         static_cast<long long>(series.entries.size()),
         static_cast<long long>(series.shape_undefined));
    if (shift >= 0) {
        auto w = shifted_sequence(series, shift);
        nlohmann::json j;
        j["schema"] = "shifted-v1";
        j["shift"] = shift;
        j["config_hash"] = fnv1a(cfg.canonical());
        j["count"] = w.values.size();
        if (w.values.size() >= 200) j["half_ks"] = empirical_stability(w.scalar());
        write_file(out_path(cfg, "shifted.json"), j.dump(2) + "\n");
    }
    return 0;
}

int cmd_constants(const RunConfig& cfg) {
    Problem pr = build_problem(cfg);
    nlohmann::json j;
    j["schema"] = "constants-v1";
    j["config_hash"] = fnv1a(cfg.canonical());
    j["counting_constant"] = counting_constant(pr.dec.n_parts, pr.dec.k());
    j["time_polytope_volume_T1"] = time_polytope_volume(1.0, pr.dec);
    j["unit_ball_volume"] = unit_ball_volume(pr.dec, pr.norms);
    j["zeta_d"] = riemann_zeta(pr.dec.d());
    for (int N : pr.params.congruence_moduli)
        j["primitive_residues"][std::to_string(N)] = primitive_residue_count(N, pr.dec.d());
    j["predicted_primitive"] =
        predicted_count(pr.params, pr.dec, pr.norms, EnumMode::Epsilon, 1).leading_constant;
    j["predicted_divisible"]["1"] =
        predicted_count(pr.params, pr.dec, pr.norms, EnumMode::EpsilonStar, 1).leading_constant;
    j["predicted_divisible"][std::to_string(cfg.s)] =
        predicted_count(pr.params, pr.dec, pr.norms, EnumMode::EpsilonStar, cfg.s)
            .leading_constant;
    j["exponent"] = pr.dec.k() + pr.dec.r() - 1;
    write_file(out_path(cfg, "constants.json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << std::endl;
    return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& experiment,
               const std::string& TlistSpec, int thetaSeeds) {
    VerifyOptions opts;
    if (!TlistSpec.empty()) opts.T_list = parse_doubles(TlistSpec);
    opts.theta_seeds = thetaSeeds;
    if (cfg.T > 0) opts.T = cfg.T;
    opts.theta_seed = cfg.theta_seed;
    opts.workers = cfg.workers;

    std::vector<TestReport> reports;
    bool all = true;
    for (int id : criteria_for_name(experiment)) {
        auto res = run_criterion(id, experiment == "all" ? VerifyOptions{} : opts);
        std::printf("[%s] criterion %2d: %s (%.1f s)\n", res.pass ? "PASS" : "FAIL", res.id,
                    res.name.c_str(), res.seconds);
        for (const auto& r : res.reports) {
            std::printf("    %s %s statistic=%.6g threshold=%.6g\n", r.pass ? "ok  " : "FAIL",
                        r.name.c_str(), r.statistic, r.threshold);
            reports.push_back(r);
        }
        all = all && res.pass;
    }
    OutputMeta meta{"report-v1", cfg.canonical(), cfg.seed};
    write_file(out_path(cfg, "report.json"), reports_json(reports, meta));
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiplicative Diophantine approximate enumeration and statistics"};
    app.set_config("--config");
    app.fallthrough(); // global flags may follow the subcommand name

    RunConfig cfg;
    app.add_option("--m-parts,--m", cfg.m_parts, "row block sizes, comma separated");
    app.add_option("--n-parts,--n", cfg.n_parts, "column block sizes, comma separated");
    app.add_option("--norms", cfg.norms, "block norms: sup|euclidean|taxicab");
    app.add_option("--eps", cfg.eps, "epsilon bound");
    app.add_option("--eta", cfg.eta, "per-row-block eta bounds");
    app.add_option("--j", cfg.shape_index, "shape index (default d)");
    app.add_option("--moduli", cfg.moduli, "congruence moduli");
    app.add_option("--theta", cfg.theta, "explicit target entries, row-major");
    app.add_option("--theta-seed", cfg.theta_seed, "random target seed");
    app.add_option("--theta-bits", cfg.theta_bits, "rational target denominator bits");
    app.add_option("--precision", cfg.precision, "f64|dd|rational");
    app.add_option("--seed", cfg.seed, "experiment seed");
    app.add_option("--T", cfg.T, "height exponent");
    app.add_option("--workers", cfg.workers, "worker threads");
    app.add_option("--out-dir", cfg.out_dir, "output directory (env MDA_OUT_DIR)");
    app.add_option("--format", cfg.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* enumCmd = app.add_subcommand("enumerate", "enumerate approximates to a CSV stream");
    enumCmd->add_option("--mode", cfg.mode, "epsilon|epsilon-star")
        ->check(CLI::IsMember({"epsilon", "epsilon-star"}));
    enumCmd->add_option("--s", cfg.s, "divisor filter (epsilon-star)");
    enumCmd->add_option("--ordering", cfg.ordering, "increasing-q|decreasing-error")
        ->check(CLI::IsMember({"increasing-q", "decreasing-error"}));

    auto* packetsCmd = app.add_subcommand("packets", "packets of the enumerated stream");

    auto* flowCmd = app.add_subcommand("flow", "visit times or grid flow averages");
    std::string flowExperiment = "visits", boxSpec = "-2,-2,2,2";
    long long minNodes = 1000;
    flowCmd->add_option("--experiment", flowExperiment, "visits|birkhoff")
        ->check(CLI::IsMember({"visits", "birkhoff"}));
    flowCmd->add_option("--box", boxSpec, "box lo...,hi... for birkhoff");
    flowCmd->add_option("--min-nodes", minNodes, "minimum grid nodes");

    auto* returnsCmd = app.add_subcommand("returns", "return-time series and shifted sequences");
    int shift = 0;
    std::string errRange, betaRange;
    bool useCf = false;
    returnsCmd->add_option("--shift", shift, "sequence shift s");
    returnsCmd->add_option("--error-range", errRange, "constraint: error in [a,b]");
    returnsCmd->add_option("--beta-range", betaRange, "constraint: torus beta in [a,b]");
    returnsCmd->add_flag("--cf", useCf, "use the continued-fraction path");

    auto* verifyCmd = app.add_subcommand("verify", "run acceptance experiments");
    std::string experiment = "all", TlistSpec;
    int thetaSeeds = 0;
    verifyCmd->add_option("experiment", experiment,
                          "all|constants|enumerator|counting|coprime|multiplicative|"
                          "cross-section|packet|shape|birkhoff|returns");
    verifyCmd->add_option("--T-list", TlistSpec, "T values for counting fits");
    verifyCmd->add_option("--theta-seeds", thetaSeeds, "number of random targets");

    auto* constCmd = app.add_subcommand("constants", "dump closed-form constants as JSON");

    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (enumCmd->parsed()) return cmd_enumerate(cfg);
        if (packetsCmd->parsed()) return cmd_packets(cfg);
        if (flowCmd->parsed()) return cmd_flow(cfg, flowExperiment, boxSpec, minNodes);
        if (returnsCmd->parsed()) return cmd_returns(cfg, shift, errRange, betaRange, useCf);
        if (verifyCmd->parsed()) return cmd_verify(cfg, experiment, TlistSpec, thetaSeeds);
        if (constCmd->parsed()) return cmd_constants(cfg);
    } catch (const EnvelopeError& e) {
        std::cerr << "envelope violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
