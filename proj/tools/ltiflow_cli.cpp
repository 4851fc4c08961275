// Command-line front end: exact analysis and synthesis for LTI communication
// networks and decentralized linear systems.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ltiflow/json_io.hpp"
#include "ltiflow/simulate.hpp"
#include "ltiflow/synthesis.hpp"

using namespace ltiflow;

namespace {

struct Options {
    std::string command;
    std::string input_path;
    std::optional<std::uint64_t> seed;
    unsigned rounds = 3;
    long sample_bound = 1000000;
    std::string field;
    std::string lambda;
    std::string mode;
    std::string form = "canonical";
    bool proper = false;
    bool aux_receiver = false;
    std::string d_ax;
    std::string kind = "alternating";
    std::string amplitude = "1";
    std::string target = "both";
    std::size_t steps = 200;
    unsigned precision = 6;
};

std::string fnv1a_digest(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t require_seed(const Options& opt) {
    if (!opt.seed)
        throw ParseError("--seed is required for randomized subcommands");
    return *opt.seed;
}

json report_header(const Options& opt, const std::string& raw) {
    json rep;
    std::string cmd = opt.command + " " + opt.input_path;
    rep["command"] = cmd;
    rep["input_digest"] = fnv1a_digest(raw);
    json cfg;
    if (opt.seed) cfg["seed"] = *opt.seed;
    cfg["rounds"] = opt.rounds;
    cfg["sample_bound"] = opt.sample_bound;
    rep["config"] = cfg;
    return rep;
}

void emit(const json& rep) { std::cout << rep.dump(2) << "\n"; }

std::string decimal_string(const Rat& x, unsigned digits) {
    BigInt n = numerator(x), d = denominator(x);
    bool neg = n < 0;
    if (neg) n = -n;
    BigInt scale = 1;
    for (unsigned i = 0; i < digits; ++i) scale *= 10;
    BigInt whole = n / d;
    BigInt frac = ((n % d) * scale) / d;
    std::string fs = frac.str();
    while (fs.size() < digits) fs = "0" + fs;
    std::string out = whole.str();
    if (digits > 0) out += "." + fs;
    return neg ? "-" + out : out;
}

std::string decimal_string(const GaussRat& x, unsigned digits) {
    return decimal_string(x.re, digits) + "+" + decimal_string(x.im, digits) + "i";
}

template <class F>
json design_to_json(const SynthesisDesign<F>& d) {
    json j;
    j["field"] = FieldOps<F>::name();
    j["verdict"] = d.stable ? "stable" : "unstable";
    j["certificate"] = poly_to_json(d.certificate);
    j["epsilon"] = scalar_to_json(d.epsilon);
    j["delay"] = d.delay;
    j["relay_gains"] = gains_to_json(d.relay_gains);
    j["k_ob"] = matrix_to_json(d.k_ob);
    j["precoders"] = json::array();
    for (const auto& p : d.precoders) j["precoders"].push_back(const_matrix_to_json(p));
    j["compensators"] = json::array();
    for (const auto& c : d.compensators)
        j["compensators"].push_back({{"A", const_matrix_to_json(c.a)},
                                     {"B", const_matrix_to_json(c.b)},
                                     {"C", const_matrix_to_json(c.c)},
                                     {"D", const_matrix_to_json(c.d)}});
    j["closed_loop"] = {{"A", const_matrix_to_json(d.closed_loop.a)},
                        {"B", const_matrix_to_json(d.closed_loop.b)},
                        {"C", const_matrix_to_json(d.closed_loop.c)},
                        {"D", const_matrix_to_json(d.closed_loop.d)}};
    j["plant_dims"] = d.plant_dims;
    return j;
}

template <class F>
SynthesisDesign<F> design_from_json(const json& j) {
    SynthesisDesign<F> d;
    d.certificate = poly_from_json<F>(j.at("certificate"));
    d.stable = j.at("verdict").get<std::string>() == "stable";
    d.delay = j.value("delay", 0u);
    const auto& cl = j.at("closed_loop");
    d.closed_loop.a = const_matrix_from_json<F>(cl.at("A"));
    d.closed_loop.b = const_matrix_from_json<F>(cl.at("B"));
    d.closed_loop.c = const_matrix_from_json<F>(cl.at("C"));
    d.closed_loop.d = const_matrix_from_json<F>(cl.at("D"));
    for (const auto& md : j.at("plant_dims")) d.plant_dims.push_back(md.get<std::size_t>());
    for (std::size_t m : d.plant_dims) d.plant_dim += m;
    return d;
}

template <class F>
json row_to_json(const ConditionRow& row) {
    return {{"lambda", row.lambda},
            {"observable", row.observable},
            {"controllable", row.controllable},
            {"m_lambda", row.m_lambda},
            {"mincuts", row.mincuts},
            {"mincut_ok", row.mincut_ok}};
}

template <class F>
int run_typed(const Options& opt) {
    const std::string raw = read_file(opt.input_path);
    json input = json::parse(raw);
    json rep = report_header(opt, raw);
    RankConfig cfg{opt.sample_bound, opt.rounds, opt.seed.value_or(0)};

    if (opt.command == "capacity") {
        cfg.seed = require_seed(opt);
        auto net = network_from_json<F>(input);
        if (!opt.lambda.empty()) {
            F lambda = scalar_from_string<F>(opt.lambda);
            rep["lambda"] = opt.lambda;
            rep["capacity"] = capacity_at(net, lambda, cfg);
        } else {
            auto rxs = net.receivers();
            auto txs = net.transmitters();
            json per = json::array();
            for (std::size_t r : rxs) {
                std::size_t g = generic_rank(net, std::optional<F>(), cfg,
                                             net.nodes[txs[0]].id, net.nodes[r].id);
                per.push_back({{"receiver", net.nodes[r].id}, {"capacity", g}});
            }
            rep["capacity"] = per;
        }
        emit(rep);
        return 0;
    }
    if (opt.command == "mincut") {
        auto net = network_from_json<F>(input);
        std::optional<F> at;
        if (!opt.lambda.empty()) {
            at = scalar_from_string<F>(opt.lambda);
            rep["lambda"] = opt.lambda;
        }
        json per = json::array();
        for (std::size_t r : net.receivers()) {
            auto mc = mincut_rank(net, at, net.nodes[r].id);
            per.push_back({{"receiver", net.nodes[r].id},
                           {"mincut", mc.rank},
                           {"witness_cut", mc.witness.v_side}});
        }
        rep["mincut"] = per;
        emit(rep);
        return 0;
    }
    if (opt.command == "verify") {
        cfg.seed = require_seed(opt);
        auto net = network_from_json<F>(input);
        auto txs = net.transmitters();
        json per = json::array();
        bool all_ok = true;
        for (std::size_t r : net.receivers()) {
            std::size_t mc = mincut_rank(net, std::optional<F>(), net.nodes[r].id).rank;
            std::size_t g = generic_rank(net, std::optional<F>(), cfg, net.nodes[txs[0]].id,
                                         net.nodes[r].id);
            bool ok = mc == g;
            all_ok = all_ok && ok;
            per.push_back({{"receiver", net.nodes[r].id},
                           {"maxflow", g},
                           {"mincut", mc},
                           {"equal", ok}});
        }
        rep["mincut_maxflow"] = per;
        rep["verdict"] = all_ok;
        emit(rep);
        return 0;
    }
    if (opt.command == "linearize") {
        auto net = network_from_json<F>(input);
        std::vector<std::size_t> dax;
        if (!opt.d_ax.empty()) {
            std::stringstream ss(opt.d_ax);
            std::string tok;
            while (std::getline(ss, tok, ',')) dax.push_back(std::stoul(tok));
        }
        std::string mode = opt.mode.empty() ? "ptop" : opt.mode;
        if (mode == "ptop") {
            std::size_t d_tx = net.nodes[net.transmitters()[0]].ports_to_channel;
            std::size_t d_rx = net.nodes[net.receivers()[0]].ports_from_channel;
            std::size_t d = dax.empty() ? std::max(d_tx, d_rx) : dax[0];
            auto lin = opt.aux_receiver ? linearize_with_aux_receiver(net, d)
                                        : linearize_ptop(net, d);
            rep["network"] = network_to_json(lin.base);
            rep["linearization"] = linearization_annex(lin);
        } else {
            MultiMode mm;
            if (mode == "multicast")
                mm = MultiMode::multicast;
            else if (mode == "broadcast")
                mm = MultiMode::broadcast;
            else if (mode == "unicast")
                mm = MultiMode::unicast;
            else
                throw ParseError("unknown linearize mode: " + mode);
            if (dax.empty()) {
                std::size_t arcs = (mm == MultiMode::multicast) ? 1 : 2;
                for (std::size_t a = 0; a < arcs; ++a) dax.push_back(1);
            }
            auto lin = linearize_multi(net, mm, dax);
            rep["network"] = network_to_json(lin.base);
            rep["linearization"] = linearization_annex(lin);
        }
        emit(rep);
        return 0;
    }
    if (opt.command == "code-synth") {
        cfg.seed = require_seed(opt);
        auto net = network_from_json<F>(input);
        auto rxs = net.receivers();
        GainAssignment<F> gains;
        if (rxs.size() == 1)
            gains = synthesize_gains(net, cfg);
        else if (rxs.size() == 2)
            gains = synthesize_gains_multicast(net, cfg);
        else
            throw ParseError("code-synth handles one or two receivers");
        rep["gains"] = gains_to_json(gains);
        json ranks = json::array();
        const std::string tx = net.nodes[net.transmitters()[0]].id;
        for (std::size_t r : rxs) {
            std::size_t rank = transfer_rank(net, gains, tx, net.nodes[r].id);
            std::size_t mc = mincut_rank(net, std::optional<F>(), net.nodes[r].id).rank;
            ranks.push_back(
                {{"receiver", net.nodes[r].id}, {"achieved_rank", rank}, {"mincut", mc}});
        }
        rep["achieved"] = ranks;
        emit(rep);
        return 0;
    }
    if (opt.command == "fixed-modes") {
        auto sys = system_from_json<F>(input);
        std::vector<F> lambdas;
        if (!opt.lambda.empty()) {
            lambdas.push_back(scalar_from_string<F>(opt.lambda));
        } else {
            lambdas = unstable_eigenvalues(sys.a);
        }
        cfg.seed = require_seed(opt);
        json per = json::array();
        bool any_fixed = false;
        for (const auto& l : lambdas) {
            auto alg = fixed_mode_algebraic(sys, l);
            bool samp = fixed_mode_sampling(sys, l, cfg);
            any_fixed = any_fixed || alg.fixed;
            json w = json::array();
            for (std::size_t i : alg.witness) w.push_back(i + 1);
            per.push_back({{"lambda", to_string(l)},
                           {"fixed", alg.fixed},
                           {"sampling_fixed", samp},
                           {"min_bordered_rank", alg.min_rank},
                           {"dim", sys.dim()},
                           {"witness_subset", w}});
        }
        rep["modes"] = per;
        rep["has_fixed_mode"] = any_fixed;
        emit(rep);
        return 0;
    }
    if (opt.command == "externalize") {
        auto sys = system_from_json<F>(input);
        if (opt.lambda.empty()) throw ParseError("externalize needs --lambda");
        if (opt.proper && !sys.proper())
            throw ParseError("--proper requires a feedthrough grid in the system file");
        F lambda = scalar_from_string<F>(opt.lambda);
        StandardNetwork<F> sn;
        if (opt.form == "canonical")
            sn = externalize_canonical(sys, lambda);
        else if (opt.form == "jordan")
            sn = externalize_jordan(sys, lambda);
        else
            throw ParseError("unknown externalization form: " + opt.form);
        rep["lambda"] = opt.lambda;
        rep["form"] = opt.form;
        rep["m_lambda"] = m_lambda_of(sys.a, lambda);
        rep["threshold"] =
            (opt.form == "jordan") ? m_lambda_of(sys.a, lambda) : sys.dim();
        rep["network"] = network_to_json(to_network(sn));
        emit(rep);
        return 0;
    }
    if (opt.command == "stabilizability") {
        auto prob = problem_from_json<F>(input);
        std::string mode = opt.mode.empty() ? to_string(prob.mode) : opt.mode;
        if (mode == "ptop") {
            auto r = stabilizability_ptop(prob);
            json rows = json::array();
            for (const auto& row : r.rows) rows.push_back(row_to_json<F>(row));
            rep["rows"] = rows;
            rep["stabilizable"] = r.stabilizable;
        } else if (mode == "multicast") {
            auto r = stabilizability_multicast(prob);
            json rows = json::array();
            for (const auto& row : r.rows) rows.push_back(row_to_json<F>(row));
            rep["rows"] = rows;
            rep["alternatively_stabilizable"] = r.stabilizable;
        } else if (mode == "broadcast") {
            auto r = stabilizability_broadcast(prob);
            json rows = json::array();
            for (const auto& row : r.rows) rows.push_back(row_to_json<F>(row));
            rep["rows"] = rows;
            rep["m1_max"] = r.m1_max;
            rep["m2_max"] = r.m2_max;
            rep["sufficient"] = r.sufficient;
            rep["necessary"] = r.necessary;
        } else if (mode == "unicast-check") {
            auto r = stabilizability_unicast_check(prob);
            json rows = json::array();
            for (const auto& row : r.rows) rows.push_back(row_to_json<F>(row));
            rep["rows"] = rows;
            rep["per_pair_conditions_hold"] = r.stabilizable;
            rep["note"] = "condition template only; the tight multiple-unicast "
                          "characterization is open";
        } else {
            throw ParseError("unknown stabilizability mode: " + mode);
        }
        emit(rep);
        return 0;
    }
    if (opt.command == "synthesize") {
        cfg.seed = require_seed(opt);
        auto prob = problem_from_json<F>(input);
        std::string mode = opt.mode.empty() ? to_string(prob.mode) : opt.mode;
        try {
            SynthesisDesign<F> design;
            if (mode == "ptop")
                design = synthesize_ptop(prob, cfg);
            else if (mode == "broadcast")
                design = synthesize_broadcast(prob, cfg);
            else
                throw ParseError("synthesize handles ptop and broadcast modes");
            rep["design"] = design_to_json(design);
            emit(rep);
            return 0;
        } catch (const NotStabilizable& e) {
            rep["verdict"] = "not stabilizable";
            rep["reason"] = e.what();
            emit(rep);
            return 3;
        } catch (const NotIndependentlyStabilizable& e) {
            rep["verdict"] = "not independently stabilizable";
            rep["reason"] = e.what();
            emit(rep);
            return 3;
        }
    }
    if (opt.command == "simulate") {
        auto design = design_from_json<F>(input);
        DisturbanceSpec<F> spec;
        if (opt.kind == "zero")
            spec.kind = DisturbanceKind::zero;
        else if (opt.kind == "constant")
            spec.kind = DisturbanceKind::constant;
        else if (opt.kind == "alternating")
            spec.kind = DisturbanceKind::alternating;
        else if (opt.kind == "random-signs")
            spec.kind = DisturbanceKind::seeded_random_signs;
        else
            throw ParseError("unknown disturbance kind: " + opt.kind);
        if (spec.kind == DisturbanceKind::seeded_random_signs) spec.seed = require_seed(opt);
        spec.amplitude = scalar_from_string<F>(opt.amplitude);
        if (opt.target == "plant1")
            spec.target = DisturbanceTarget::plant1;
        else if (opt.target == "plant2")
            spec.target = DisturbanceTarget::plant2;
        else
            spec.target = DisturbanceTarget::both;
        auto trace = simulate(design, spec, opt.steps);
        // CSV: step, per-state decimals, max-norm
        std::cout << "step";
        for (std::size_t i = 0; i < design.closed_loop.order(); ++i) std::cout << ",x" << i;
        std::cout << ",max_norm\n";
        for (std::size_t n = 0; n < trace.states.size(); ++n) {
            std::cout << n;
            for (const auto& e : trace.states[n])
                std::cout << "," << decimal_string(e, opt.precision);
            std::cout << "," << decimal_string(trace.norms[n], opt.precision) << "\n";
        }
        std::cerr << "bounded: " << (boundedness_verdict(trace, design) ? "true" : "false")
                  << "\n";
        return 0;
    }
    if (opt.command == "realize") {
        auto prob = problem_from_json<F>(input);
        auto real = realize_closed_network(prob);
        rep["system"] = system_to_json(real.sys);
        rep["plant_dim"] = real.plant_dim;
        rep["observer_controllers"] = real.observer_controllers;
        rep["relay_controllers"] = real.relay_controllers;
        rep["controller_controllers"] = real.controller_controllers;
        emit(rep);
        return 0;
    }
    throw ParseError("unknown subcommand: " + opt.command);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact network-coding and decentralized-control toolkit"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("input", opt.input_path, "input JSON file")->required();
        sub->add_option("--seed", opt.seed, "RNG seed (required for randomized operations)");
        sub->add_option("--rounds", opt.rounds, "sampling rounds");
        sub->add_option("--sample-bound", opt.sample_bound, "integer sampling bound");
        sub->add_option("--field", opt.field, "scalar field override: Q or Qi");
    };

    add_common(app.add_subcommand("capacity", "d.o.f. capacity (at a frequency with --lambda)"));
    app.get_subcommand("capacity")->add_option("--lambda", opt.lambda, "generalized frequency");
    add_common(app.add_subcommand("mincut", "cut enumeration with witness cuts"));
    app.get_subcommand("mincut")->add_option("--lambda", opt.lambda, "generalized frequency");
    add_common(app.add_subcommand("verify", "check the mincut-maxflow identity"));
    add_common(app.add_subcommand("linearize", "acyclic single-hop form with circulation arcs"));
    {
        auto* s = app.get_subcommand("linearize");
        s->add_option("--mode", opt.mode, "ptop|multicast|broadcast|unicast");
        s->add_flag("--aux-receiver", opt.aux_receiver, "add the invertibility receiver");
        s->add_option("--d-ax", opt.d_ax, "auxiliary port counts, comma separated");
    }
    add_common(app.add_subcommand("code-synth", "mincut-achieving gain synthesis"));
    add_common(app.add_subcommand("fixed-modes", "fixed-mode detection"));
    app.get_subcommand("fixed-modes")
        ->add_option("--lambda", opt.lambda, "candidate eigenvalue (default: all unstable)");
    add_common(app.add_subcommand("externalize", "standard-network externalization"));
    {
        auto* s = app.get_subcommand("externalize");
        s->add_option("--lambda", opt.lambda, "eigenvalue to externalize at");
        s->add_option("--form", opt.form, "canonical|jordan");
        s->add_flag("--proper", opt.proper, "use the proper-system variant");
    }
    add_common(app.add_subcommand("stabilizability", "stabilizability over the network"));
    app.get_subcommand("stabilizability")
        ->add_option("--mode", opt.mode, "ptop|multicast|broadcast|unicast-check");
    add_common(app.add_subcommand("synthesize", "controller/observer/relay synthesis"));
    app.get_subcommand("synthesize")->add_option("--mode", opt.mode, "ptop|broadcast");
    add_common(app.add_subcommand("simulate", "closed-loop trace of a design"));
    {
        auto* s = app.get_subcommand("simulate");
        s->add_option("--kind", opt.kind, "zero|constant|alternating|random-signs");
        s->add_option("--amplitude", opt.amplitude, "disturbance amplitude");
        s->add_option("--target", opt.target, "plant1|plant2|both");
        s->add_option("--steps", opt.steps, "horizon length");
        s->add_option("--precision", opt.precision, "decimal digits in the CSV");
    }
    add_common(app.add_subcommand("realize", "closed-network decentralized realization"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }
    opt.command = app.get_subcommands().front()->get_name();

    try {
        std::string field = opt.field;
        if (field.empty()) {
            json input = json::parse(read_file(opt.input_path));
            field = input.is_object() ? field_tag(input) : "Q";
        }
        if (field == "Q") return run_typed<Rat>(opt);
        if (field == "Qi") return run_typed<GaussRat>(opt);
        throw ParseError("unknown field: " + field);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const PortKindViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return 2;
    }
}
