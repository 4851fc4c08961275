#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "ltiflow/linearize.hpp"

using namespace ltiflow;
using fixtures::butterfly;
using fixtures::direct_identity;
using fixtures::one_relay_chain;
using fixtures::ones;
using fixtures::random_network;
using fixtures::two_hop_internal_example;
using R = RatFn<Rat>;
using M = RatMatrix<Rat>;

TEST_CASE("block shapes of the no-relay linearization") {
    auto net = direct_identity(1);
    auto lin = linearize_ptop(net, 1);
    REQUIRE(lin.d == 1);
    REQUIRE(lin.a_block == M{{R(0), R(0)}, {R(0), R(1)}});
    REQUIRE(lin.b_tx == M{{R(0)}, {R(1)}});
    REQUIRE(lin.c_tx == M{{R(-1), R(0)}});
    REQUIRE(lin.b_rx == M{{R(1)}, {R(0)}});
    REQUIRE(lin.c_rx == M{{R(0), R(-1)}});
}

TEST_CASE("offset d sums the receiver and relay output ports") {
    Sampler rng(31);
    for (int t = 0; t < 10; ++t) {
        auto net = random_network(rng, 2, 3, 1);
        auto lin = linearize_ptop(net, 2);
        std::size_t expected = net.nodes[net.receivers()[0]].ports_from_channel;
        for (std::size_t r : net.relays()) expected += net.nodes[r].ports_from_channel;
        REQUIRE(lin.d == expected);
    }
}

TEST_CASE("two-hop linearization: rank 1 + d and affine gain entry structure") {
    auto net = two_hop_internal_example();
    auto lin = linearize_ptop(net, 1);
    REQUIRE(lin.d == 3);

    RankConfig cfg{1000000, 3, 5};
    auto rep = verify_offsets(net, lin, cfg);
    REQUIRE(rep.maxflow_ok);
    REQUIRE(rep.mincut_ok);
    REQUIRE(rep.maxflow_rhs == 1 + lin.d);  // transfer rank is 1
}

TEST_CASE("G_lin is affine in every gain variable") {
    Sampler rng(37);
    for (int t = 0; t < 8; ++t) {
        auto net = random_network(rng, 2, 2, 1);
        auto lin = linearize_ptop(net, 2);
        auto g1 = detail::sample_relay_gains(lin.base, rng, 50);
        auto g2 = detail::sample_relay_gains(lin.base, rng, 50);
        // midpoint linearity entrywise: G((g1+g2)/2) = (G(g1)+G(g2))/2
        GainAssignment<Rat> mid;
        for (const auto& [id, m1] : g1.relay) {
            auto m2 = g2.relay.at(id);
            mid.relay[id] = (m1 + m2) * R(Rat(1, 2));
        }
        auto lhs = lin.g_lin(mid);
        auto rhs = (lin.g_lin(g1) + lin.g_lin(g2)) * R(Rat(1, 2));
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("direct identity with d_ax = 2 satisfies both offset identities") {
    auto net = direct_identity(2);
    auto lin = linearize_ptop(net, 2);
    RankConfig cfg{1000000, 3, 13};
    auto rep = verify_offsets(net, lin, cfg);
    REQUIRE(rep.maxflow_ok);
    REQUIRE(rep.mincut_ok);
    REQUIRE(rep.mincut_lhs == 2 + lin.d);
}

TEST_CASE("offset identities hold on random networks") {
    Sampler rng(41);
    RankConfig cfg{1000000, 3, 0};
    for (int t = 0; t < 20; ++t) {
        auto net = random_network(rng, 3, 2, 2);
        std::size_t d_tx = net.nodes[net.transmitters()[0]].ports_to_channel;
        std::size_t d_rx = net.nodes[net.receivers()[0]].ports_from_channel;
        auto lin = linearize_ptop(net, std::max(d_tx, d_rx));
        cfg.seed = 4000 + t;
        auto rep = verify_offsets(net, lin, cfg);
        REQUIRE(rep.maxflow_ok);
        REQUIRE(rep.mincut_ok);
    }
}

TEST_CASE("aux receiver detects loop-singular gain draws") {
    // one relay with a unit self-loop: K = 1 makes I - HK singular
    LtiNetwork<Rat> net;
    net.nodes.push_back({"tx", 1, 0, NodeKind::transmitter});
    net.nodes.push_back({"r1", 1, 1, NodeKind::relay});
    net.nodes.push_back({"rx", 0, 1, NodeKind::receiver});
    net.set_channel("tx", "r1", ones(1, 1));
    net.set_channel("r1", "r1", ones(1, 1));
    net.set_channel("r1", "rx", ones(1, 1));

    auto lin = linearize_with_aux_receiver(net, 1);
    GainAssignment<Rat> g;
    g.relay["r1"] = ones(1, 1);
    g.relay[lin.gain_tx_id] = ones(1, 1);
    g.relay[lin.gain_rx_id] = ones(1, 1);
    std::size_t full = lin.d_ax + lin.d;
    REQUIRE(transfer_rank(lin.base, g, lin.txp_id, lin.rxq_id) < full);

    g.relay["r1"] = M{{R(Rat(1, 2))}};  // pole moves off 1, loop becomes invertible
    REQUIRE(transfer_rank(lin.base, g, lin.txp_id, lin.rxq_id) == full);
    GainAssignment<Rat> orig;
    orig.relay["r1"] = M{{R(Rat(1, 2))}};
    REQUIRE_NOTHROW(transfer_matrix(net, orig));
}

TEST_CASE("aux receiver threshold is automatically satisfiable on acyclic networks") {
    RankConfig cfg{1000000, 3, 17};
    auto net = two_hop_internal_example();
    auto gains = synthesize_gains(net, cfg);
    REQUIRE(mat_rank(transfer_matrix(net, gains)) == 1);
}

TEST_CASE("synthesis achieves the mincut") {
    RankConfig cfg{1000000, 3, 19};

    auto id2 = direct_identity(2);
    auto g0 = synthesize_gains(id2, cfg);
    REQUIRE(g0.relay.empty());
    REQUIRE(mat_rank(transfer_matrix(id2, g0)) == 2);

    Sampler rng(43);
    for (int t = 0; t < 10; ++t) {
        auto net = random_network(rng, 2, 2, 1);
        cfg.seed = 6000 + t;
        auto mc = mincut_rank(net).rank;
        auto gains = synthesize_gains(net, cfg);
        REQUIRE(mat_rank(transfer_matrix(net, gains)) == mc);
    }
}

TEST_CASE("butterfly multicast synthesis reaches rank 2 per receiver") {
    RankConfig cfg{1000000, 3, 23};
    auto net = butterfly();
    auto gains = synthesize_gains_multicast(net, cfg);
    REQUIRE(mat_rank(transfer_matrix(net, gains, "tx", "rx1")) == 2);
    REQUIRE(mat_rank(transfer_matrix(net, gains, "tx", "rx2")) == 2);
}

TEST_CASE("multicast linearization of the butterfly") {
    auto net = butterfly();
    auto lin = linearize_multi(net, MultiMode::multicast, {2});
    REQUIRE(lin.d == 2 + 2 + 1 + 1 + 2 + 1);  // receiver ports + relay output ports
    REQUIRE(lin.thresholds.size() == 2);
    for (const auto& th : lin.thresholds) {
        REQUIRE(th.relation == Relation::at_least);
        REQUIRE(th.value == lin.d + 2);
    }
    // every edge from tx' into a gain node is a -1 block, all others are +1/H
    std::size_t txp = lin.base.node_index("tx'");
    for (std::size_t r : lin.base.relays()) {
        auto c = lin.base.channel(txp, r);
        bool saw_minus_one = false;
        for (std::size_t i = 0; i < c.rows(); ++i)
            for (std::size_t j = 0; j < c.cols(); ++j) {
                if (c(i, j) == R(-1)) saw_minus_one = true;
                else REQUIRE(c(i, j) == R(0));
            }
        REQUIRE(saw_minus_one);
    }

    // gains meeting the original-network conditions meet the linearized
    // thresholds, and conversely
    RankConfig cfg{1000000, 1, 29};
    Sampler rng(cfg.seed);
    auto gains = fixtures::butterfly_unit_gains();
    GainAssignment<Rat> lg = gains;
    lg.relay["tx"] = rng.int_matrix<Rat>(2, 2, 100);
    lg.relay["rx1"] = rng.int_matrix<Rat>(2, 2, 100);
    lg.relay["rx2"] = rng.int_matrix<Rat>(2, 2, 100);
    for (const auto& th : lin.thresholds) {
        std::size_t rank = transfer_rank(lin.base, lg, "tx'", th.receiver);
        REQUIRE(rank >= th.value);
    }
}

TEST_CASE("broadcast and unicast linearizations differ only in the transmitter columns") {
    // two-receiver broadcast network: one transmitter, no relays
    LtiNetwork<Rat> br;
    br.nodes.push_back({"tx", 2, 0, NodeKind::transmitter});
    br.nodes.push_back({"rx1", 0, 1, NodeKind::receiver});
    br.nodes.push_back({"rx2", 0, 1, NodeKind::receiver});
    br.set_channel("tx", "rx1", M{{R(2), R(1)}});
    br.set_channel("tx", "rx2", M{{R(1), R(2)}});
    auto lbr = linearize_multi(br, MultiMode::broadcast, {1, 1});
    REQUIRE(lbr.thresholds.size() == 4);

    // the two arc gain nodes share the same outgoing column block
    auto b1 = lbr.base.channel(lbr.base.node_index("tx_arc1"), lbr.base.node_index("rx11'"));
    auto b2 = lbr.base.channel(lbr.base.node_index("tx_arc2"), lbr.base.node_index("rx22'"));
    REQUIRE(b1 == b2);

    // unicast with distinct transmitters gets distinct columns
    LtiNetwork<Rat> uni;
    uni.nodes.push_back({"tx1", 1, 0, NodeKind::transmitter});
    uni.nodes.push_back({"tx2", 1, 0, NodeKind::transmitter});
    uni.nodes.push_back({"rx1", 0, 1, NodeKind::receiver});
    uni.nodes.push_back({"rx2", 0, 1, NodeKind::receiver});
    uni.set_channel("tx1", "rx1", ones(1, 1));
    uni.set_channel("tx2", "rx2", M{{R(Rat(3))}});
    auto luni = linearize_multi(uni, MultiMode::unicast, {1, 1});
    auto u1 = luni.base.channel(luni.base.node_index("tx1"), luni.base.node_index("rx11'"));
    auto u2 = luni.base.channel(luni.base.node_index("tx2"), luni.base.node_index("rx22'"));
    REQUIRE(u1 != u2);

    REQUIRE_THROWS_AS(linearize_multi(br, MultiMode::unicast, {1, 1}), ModeShapeMismatch);
}

TEST_CASE("multi-mode linearized ranks equal the offset pair ranks both ways") {
    // for every receiver rx_kl', rank G_{tx',rx_kl'} = d + rank(K_rxl G K_txk)
    Sampler rng(67);
    for (int t = 0; t < 12; ++t) {
        bool unicast = rng.coin();
        LtiNetwork<Rat> net;
        std::size_t v = rng.uniform_int(0, 2);
        if (unicast) {
            net.nodes.push_back({"tx1", 1, 0, NodeKind::transmitter});
            net.nodes.push_back({"tx2", 1, 0, NodeKind::transmitter});
        } else {
            net.nodes.push_back({"tx", 2, 0, NodeKind::transmitter});
        }
        for (std::size_t i = 0; i < v; ++i)
            net.nodes.push_back({"r" + std::to_string(i + 1), 1, 1, NodeKind::relay});
        net.nodes.push_back({"rx1", 0, 1, NodeKind::receiver});
        net.nodes.push_back({"rx2", 0, 1, NodeKind::receiver});
        for (std::size_t i = 0; i < net.nodes.size(); ++i)
            for (std::size_t j = 0; j < net.nodes.size(); ++j) {
                if (net.nodes[i].kind == NodeKind::receiver ||
                    net.nodes[j].kind == NodeKind::transmitter || i == j)
                    continue;
                if (rng.uniform_int(0, 2) == 0) continue;
                RatMatrix<Rat> m(net.nodes[j].ports_from_channel,
                                 net.nodes[i].ports_to_channel);
                for (std::size_t p = 0; p < m.rows(); ++p)
                    for (std::size_t q = 0; q < m.cols(); ++q)
                        m(p, q) = fixtures::random_poly_entry(rng, 1, 3);
                net.set_channel(net.nodes[i].id, net.nodes[j].id, m);
            }
        auto lin = linearize_multi(net, unicast ? MultiMode::unicast : MultiMode::broadcast,
                                   {1, 1});

        // sample every gain in the linearized network once
        GainAssignment<Rat> lg;
        for (std::size_t r : lin.base.relays()) {
            const auto& n = lin.base.nodes[r];
            lg.relay[n.id] = rng.int_matrix<Rat>(n.ports_to_channel, n.ports_from_channel, 1000);
        }
        GainAssignment<Rat> orig;
        for (std::size_t r : net.relays()) orig.relay[net.nodes[r].id] =
            lg.relay.at(net.nodes[r].id);

        auto tx_gain_id = [&](std::size_t k) {
            if (unicast) return std::string("tx") + std::to_string(k + 1);
            return std::string("tx_arc") + std::to_string(k + 1);
        };
        auto tx_id = [&](std::size_t k) {
            return unicast ? "tx" + std::to_string(k + 1) : std::string("tx");
        };
        struct Pair {
            const char* sink;
            std::size_t arc, rx;
        };
        for (const Pair& pr : {Pair{"rx11'", 0, 0}, Pair{"rx22'", 1, 1}, Pair{"rx12'", 0, 1},
                               Pair{"rx21'", 1, 0}}) {
            RatMatrix<Rat> g;
            try {
                g = transfer_matrix(net, orig, tx_id(pr.arc),
                                    "rx" + std::to_string(pr.rx + 1));
            } catch (const LoopSingular&) {
                goto next_instance;
            }
            {
                auto k_tx = lg.relay.at(tx_gain_id(pr.arc));
                auto k_rx = lg.relay.at("rx" + std::to_string(pr.rx + 1));
                std::size_t lhs = mat_rank(RatMatrix<Rat>(k_rx * g * k_tx));
                std::size_t rhs = transfer_rank(lin.base, lg, "tx'", pr.sink);
                REQUIRE(rhs == lin.d + lhs);
            }
        }
    next_instance:;
    }
}

TEST_CASE("broadcast with zero cross-channels meets the interference bounds at d") {
    LtiNetwork<Rat> br;
    br.nodes.push_back({"tx", 2, 0, NodeKind::transmitter});
    br.nodes.push_back({"rx1", 0, 1, NodeKind::receiver});
    br.nodes.push_back({"rx2", 0, 1, NodeKind::receiver});
    br.set_channel("tx", "rx1", M{{R(1), R(0)}});
    br.set_channel("tx", "rx2", M{{R(0), R(1)}});
    auto lin = linearize_multi(br, MultiMode::broadcast, {1, 1});

    // port-selector precoders route message k through its private channel,
    // so the interference thresholds are met at exactly d
    GainAssignment<Rat> g;
    g.relay["tx_arc1"] = M{{R(1)}, {R(0)}};
    g.relay["tx_arc2"] = M{{R(0)}, {R(1)}};
    g.relay["rx1"] = ones(1, 1);
    g.relay["rx2"] = ones(1, 1);
    for (const auto& th : lin.thresholds) {
        std::size_t rank = transfer_rank(lin.base, g, "tx'", th.receiver);
        if (th.relation == Relation::at_most) {
            REQUIRE(th.value == lin.d);
            REQUIRE(rank == lin.d);
        } else {
            REQUIRE(rank >= th.value);
        }
    }
}
