// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Golden values come from worked examples; property suites compare
// two independently computed sides.

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "../fixtures.hpp"
#include "ltiflow/json_io.hpp"
#include "ltiflow/simulate.hpp"
#include "ltiflow/synthesis.hpp"

using namespace ltiflow;
using fixtures::Sampler;
using M = Matrix<Rat>;
using RM = RatMatrix<Rat>;
using R = RatFn<Rat>;
using P = Poly<Rat>;

namespace {

int failures = 0;

void run_criterion(int number, const std::string& name, const std::function<bool()>& body) {
    auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string note;
    try {
        ok = body();
    } catch (const std::exception& e) {
        note = std::string(" (") + e.what() + ")";
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    std::printf("[%s] %d. %s (%lld ms)%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                static_cast<long long>(ms), note.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

M jordan_from_blocks(const std::vector<std::pair<Rat, std::size_t>>& blocks) {
    std::size_t m = 0;
    for (const auto& [ev, sz] : blocks) m += sz;
    M a(m, m);
    std::size_t off = 0;
    for (const auto& [ev, sz] : blocks) {
        for (std::size_t i = 0; i < sz; ++i) {
            a(off + i, off + i) = ev;
            if (i + 1 < sz) a(off + i, off + i + 1) = Rat(1);
        }
        off += sz;
    }
    return a;
}

// criterion 1 --------------------------------------------------------------

bool appendix_golden() {
    Rat lambda(3), lambda_p(7);
    M a = jordan_from_blocks({{lambda, 3}, {lambda, 2}, {lambda_p, 1}});
    auto x = jordan_indexing(a, lambda);
    bool ok = x.kappa_l == std::vector<std::size_t>{0, 0, 0, 1, 1, 2, 2};
    ok = ok && x.kappa_r == std::vector<std::size_t>{0, 1, 1, 1, 2, 2, 2};
    ok = ok && x.m_lambda == 2;
    ok = ok && x.iota_l == std::vector<std::size_t>{0, 3, 5};
    ok = ok && x.iota_r == std::vector<std::size_t>{0, 1, 4};
    ok = ok && x.pi_l == std::vector<std::size_t>{3, 4, 1, 5, 2, 6};
    ok = ok && x.pi_r == std::vector<std::size_t>{1, 3, 4, 2, 5, 6};
    M pl{{0, 0, 1, 0, 0, 0}, {0, 0, 0, 1, 0, 0}, {1, 0, 0, 0, 0, 0},
         {0, 0, 0, 0, 1, 0}, {0, 1, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 1}};
    M pr{{1, 0, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0}, {0, 0, 0, 1, 0, 0},
         {0, 1, 0, 0, 0, 0}, {0, 0, 0, 0, 1, 0}, {0, 0, 0, 0, 0, 1}};
    ok = ok && x.p_l == pl && x.p_r == pr;

    auto part = partition_jordan(a, lambda, {}, {});
    R zl = R::z() - R(lambda);
    RM a22{{R(-1), R(0), R(0), R(0)},
           {zl, R(-1), R(0), R(0)},
           {R(0), R(0), R(-1), R(0)},
           {R(0), R(0), R(0), R::z() - R(lambda_p)}};
    return ok && part.a22 == a22;
}

// criterion 2 --------------------------------------------------------------

bool mincut_maxflow_suite() {
    Sampler rng(20240801);
    RankConfig cfg{1000000, 3, 0};
    for (int t = 0; t < 200; ++t) {
        auto net = fixtures::random_network(rng, 4, 3, 2);
        cfg.seed = 50000 + t;
        std::size_t mc = mincut_rank(net).rank;
        std::size_t gr = generic_rank(net, std::optional<Rat>(), cfg);
        if (mc != gr) return false;
    }
    return true;
}

// criterion 3 --------------------------------------------------------------

bool offset_suite() {
    Sampler rng(20240802);
    RankConfig cfg{1000000, 3, 0};
    for (int t = 0; t < 100; ++t) {
        auto net = fixtures::random_network(rng, 3, 2, 2);
        std::size_t d_tx = net.nodes[net.transmitters()[0]].ports_to_channel;
        std::size_t d_rx = net.nodes[net.receivers()[0]].ports_from_channel;
        auto lin = linearize_ptop(net, std::max(d_tx, d_rx));
        cfg.seed = 60000 + t;
        auto rep = verify_offsets(net, lin, cfg);
        if (!rep.maxflow_ok || !rep.mincut_ok) return false;
    }
    return true;
}

// criterion 4 --------------------------------------------------------------

DecSystem<Rat> random_jordan_system(Sampler& rng, std::size_t max_m, std::size_t max_v,
                                    bool proper) {
    std::vector<std::pair<Rat, std::size_t>> blocks;
    std::size_t m = 0;
    while (m == 0 || (m < max_m && rng.coin())) {
        std::size_t sz = 1 + rng.uniform_int(0, 1);
        sz = std::min(sz, max_m - m);
        if (sz == 0) break;
        blocks.emplace_back(Rat(rng.uniform_int(2, 4)), sz);
        m += sz;
    }
    DecSystem<Rat> sys;
    sys.a = jordan_from_blocks(blocks);
    std::size_t v = 1 + rng.uniform_int(0, static_cast<long>(max_v - 1));
    for (std::size_t i = 0; i < v; ++i) {
        std::size_t q = 1 + rng.uniform_int(0, 1);
        std::size_t r = 1 + rng.uniform_int(0, 1);
        M b(m, q), c(r, m);
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t j = 0; j < q; ++j) b(p, j) = Rat(rng.uniform_int(-2, 2));
        for (std::size_t p = 0; p < r; ++p)
            for (std::size_t j = 0; j < m; ++j) c(p, j) = Rat(rng.uniform_int(-2, 2));
        sys.b.push_back(b);
        sys.c.push_back(c);
    }
    if (proper) {
        std::vector<std::vector<M>> d(v);
        for (std::size_t i = 0; i < v; ++i)
            for (std::size_t j = 0; j < v; ++j) {
                M dij(sys.c[i].rows(), sys.b[j].cols());
                for (std::size_t p = 0; p < dij.rows(); ++p)
                    for (std::size_t q = 0; q < dij.cols(); ++q)
                        dij(p, q) = Rat(rng.uniform_int(-1, 1));
                d[i].push_back(dij);
            }
        sys.d = d;
    }
    return sys;
}

bool equivalence_suite() {
    Sampler rng(20240803);
    RankConfig cfg{1000000, 3, 0};
    for (int t = 0; t < 100; ++t) {
        auto sys = random_jordan_system(rng, 5, 3, false);
        cfg.seed = 70000 + t;
        Rat lambda(rng.uniform_int(2, 4));
        if (!equivalence_report(sys, lambda, cfg).unanimous) return false;
    }
    for (int t = 0; t < 50; ++t) {
        auto sys = random_jordan_system(rng, 4, 2, true);
        cfg.seed = 80000 + t;
        Rat lambda(rng.uniform_int(2, 4));
        if (!equivalence_report(sys, lambda, cfg).unanimous) return false;
    }
    return true;
}

// criterion 5 --------------------------------------------------------------

bool two_hop_golden() {
    auto net = fixtures::two_hop_internal_example();
    RankConfig cfg{1000000, 3, 123};
    if (generic_rank(net, std::optional<Rat>(), cfg) != 1) return false;
    auto lin = linearize_ptop(net, 1);
    auto rep = verify_offsets(net, lin, cfg);
    return rep.maxflow_ok && rep.mincut_ok && rep.maxflow_rhs == 1 + lin.d;
}

// criterion 6 --------------------------------------------------------------

bool unfolding_golden() {
    // simple relay network: source -> relay -> destination, unit channels
    auto net = fixtures::one_relay_chain();
    std::size_t mc = mincut_rank(net).rank;
    if (mc != 1) return false;
    auto lin = linearize_with_aux_receiver(net, mc);
    GainAssignment<Rat> gains;  // S = R = D = 1
    gains.relay[lin.gain_tx_id] = fixtures::ones(1, 1);
    gains.relay["r1"] = fixtures::ones(1, 1);
    gains.relay[lin.gain_rx_id] = fixtures::ones(1, 1);
    std::size_t cap = transfer_rank(lin.base, gains, lin.txp_id, lin.rxp_id);
    std::size_t aux = transfer_rank(lin.base, gains, lin.txp_id, lin.rxq_id);
    return cap == 3 && aux == lin.d_ax + lin.d;
}

// criterion 7 --------------------------------------------------------------

bool broadcast_gap_golden() {
    ControlProblem<Rat> prob;
    prob.mode = ProblemMode::broadcast;
    prob.plants.push_back({M{{Rat(3)}}, {M{{Rat(1)}}}, M{{Rat(1)}}});
    prob.plants.push_back({M{{Rat(2)}}, {M{{Rat(1)}}}, M{{Rat(1)}}});
    prob.net.nodes.push_back({"obs", 1, 0, NodeKind::transmitter});
    prob.net.nodes.push_back({"cn1", 0, 1, NodeKind::receiver});
    prob.net.nodes.push_back({"cn2", 0, 1, NodeKind::receiver});
    prob.net.set_channel("obs", "cn1", RM{{R(P{Rat(-6), Rat(3)}, P{Rat(0), Rat(1)})}});
    prob.net.set_channel("obs", "cn2", RM{{R(P{Rat(-6), Rat(2)}, P{Rat(0), Rat(1)})}});
    prob.observer_nodes = {"obs"};
    prob.controller_nodes = {"cn1", "cn2"};
    auto rep = stabilizability_broadcast(prob);
    return !rep.sufficient && rep.necessary;
}

// criterion 8 --------------------------------------------------------------

ControlProblem<Rat> random_ptop_problem(Sampler& rng) {
    // one unstable eigenvalue with m_lambda <= 2, remaining modes stable
    ControlProblem<Rat> prob;
    prob.mode = ProblemMode::ptop;
    Rat lambda(rng.uniform_int(2, 4));
    std::size_t ml = 1 + rng.uniform_int(0, 1);
    std::vector<std::pair<Rat, std::size_t>> blocks;
    std::size_t m = 0;
    if (ml == 2) {
        blocks = {{lambda, 1}, {lambda, 1}};
        m = 2;
        if (rng.coin()) {
            blocks.push_back({Rat(1, 2), 1});
            m = 3;
        }
    } else {
        std::size_t sz = 1 + rng.uniform_int(0, 1);
        blocks = {{lambda, sz}};
        m = sz;
        if (m < 3 && rng.coin()) {
            blocks.push_back({Rat(-1, 3), 1});
            m += 1;
        }
    }
    Plant<Rat> plant;
    plant.a = jordan_from_blocks(blocks);
    plant.b = {M::identity(m)};
    plant.c = M::identity(m);

    std::size_t w = ml;  // pipe width carries the unstable block count
    prob.net.nodes.push_back({"obs", w, 0, NodeKind::transmitter});
    std::size_t v = rng.uniform_int(0, 2);
    std::string prev = "obs";
    for (std::size_t i = 0; i < v; ++i) {
        std::string id = "r" + std::to_string(i + 1);
        prob.net.nodes.push_back({id, w, w, NodeKind::relay});
    }
    prob.net.nodes.push_back({"cn", 0, w, NodeKind::receiver});
    auto stable_link = [&](std::size_t rows, std::size_t cols) {
        RM h(rows, cols);
        for (std::size_t i = 0; i < rows && i < cols; ++i) {
            // identity backbone, sometimes through a stable pole
            if (rng.coin())
                h(i, i) = R(1);
            else
                h(i, i) = R(P{Rat(1)}, P{Rat(rng.coin() ? 1 : -1, 2), Rat(1)});
        }
        if (rng.coin() && rows > 1)
            h(rows - 1, 0) += fixtures::random_stable_causal_entry(rng, 1, 1);
        return h;
    };
    for (std::size_t i = 0; i <= v; ++i) {
        std::string from = (i == 0) ? "obs" : "r" + std::to_string(i);
        std::string to = (i == v) ? "cn" : "r" + std::to_string(i + 1);
        prob.net.set_channel(from, to, stable_link(w, w));
    }
    prob.plants.push_back(std::move(plant));
    prob.observer_nodes = {"obs"};
    prob.controller_nodes = {"cn"};
    return prob;
}

bool synthesis_suite() {
    Sampler rng(20240804);
    RankConfig cfg{100, 3, 0};
    int done = 0;
    for (int t = 0; t < 400 && done < 20; ++t) {
        auto prob = random_ptop_problem(rng);
        if (!stabilizability_ptop(prob).stabilizable) continue;
        cfg.seed = 90000 + t;
        auto design = synthesize_ptop(prob, cfg);
        if (!design.stable || !strictly_stable(design.certificate)) return false;
        auto trace = simulate(design,
                              DisturbanceSpec<Rat>{DisturbanceKind::alternating, Rat(1),
                                                   DisturbanceTarget::both, 0},
                              200);
        if (!boundedness_verdict(trace, design)) return false;
        ++done;
    }
    if (done < 20) return false;

    int bdone = 0;
    for (int t = 0; t < 100 && bdone < 5; ++t) {
        // matched spectra: both plants share the unstable eigenvalue
        ControlProblem<Rat> prob;
        prob.mode = ProblemMode::broadcast;
        Rat lambda(rng.uniform_int(2, 4));
        prob.plants.push_back({M{{lambda}}, {M{{Rat(1)}}}, M{{Rat(1)}}});
        prob.plants.push_back({M{{lambda}}, {M{{Rat(1)}}}, M{{Rat(1)}}});
        prob.net.nodes.push_back({"obs", 2, 0, NodeKind::transmitter});
        prob.net.nodes.push_back({"cn1", 0, 1, NodeKind::receiver});
        prob.net.nodes.push_back({"cn2", 0, 1, NodeKind::receiver});
        RM h1(1, 2), h2(1, 2);
        h1(0, 0) = R(Rat(rng.uniform_int(1, 3)));
        h1(0, 1) = R(Rat(rng.uniform_int(0, 2)));
        h2(0, 0) = R(Rat(rng.uniform_int(0, 2)));
        h2(0, 1) = R(Rat(rng.uniform_int(1, 3)));
        if (rng.coin()) h1(0, 1) = h1(0, 1) * R(P{Rat(1)}, P{Rat(-1, 2), Rat(1)});
        prob.net.set_channel("obs", "cn1", h1);
        prob.net.set_channel("obs", "cn2", h2);
        prob.observer_nodes = {"obs"};
        prob.controller_nodes = {"cn1", "cn2"};
        if (!stabilizability_broadcast(prob).sufficient) continue;
        cfg.seed = 95000 + t;
        SynthesisDesign<Rat> design;
        try {
            design = synthesize_broadcast(prob, cfg);
        } catch (const SynthesisBudgetExceeded&) {
            continue;
        }
        if (!design.stable || !cross_transfers_zero(design)) return false;
        auto trace = simulate(design,
                              DisturbanceSpec<Rat>{DisturbanceKind::alternating, Rat(1),
                                                   DisturbanceTarget::both, 0},
                              200);
        if (!boundedness_verdict(trace, design)) return false;
        ++bdone;
    }
    return bdone >= 5;
}

// criterion 9 --------------------------------------------------------------

bool butterfly_regression() {
    auto net = fixtures::butterfly();
    if (mincut_rank(net, std::optional<Rat>(), "rx1").rank != 2) return false;
    if (mincut_rank(net, std::optional<Rat>(), "rx2").rank != 2) return false;
    RankConfig cfg{1000000, 3, 424242};
    auto gains = synthesize_gains_multicast(net, cfg);
    return mat_rank(transfer_matrix(net, gains, "tx", "rx1")) == 2 &&
           mat_rank(transfer_matrix(net, gains, "tx", "rx2")) == 2;
}

}  // namespace

int main() {
    run_criterion(1, "appendix jordan-indexing golden data", appendix_golden);
    run_criterion(2, "mincut-maxflow property on 200 random networks", mincut_maxflow_suite);
    run_criterion(3, "linearization offset identities on 100 random networks", offset_suite);
    run_criterion(4, "five-way fixed-mode equivalence on 150 random systems",
                  equivalence_suite);
    run_criterion(5, "two-hop network golden values", two_hop_golden);
    run_criterion(6, "unfolding example: unit gains reach capacity 3", unfolding_golden);
    run_criterion(7, "broadcast gap: necessary holds, sufficient fails",
                  broadcast_gap_golden);
    run_criterion(8, "end-to-end synthesis with certificates and bounded traces",
                  synthesis_suite);
    run_criterion(9, "butterfly regression: mincut and code synthesis at rank 2",
                  butterfly_regression);
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
