#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "ltiflow/realize.hpp"
#include "ltiflow/roots.hpp"

using namespace ltiflow;
using fixtures::ones;
using fixtures::Sampler;
using M = Matrix<Rat>;
using RM = RatMatrix<Rat>;
using R = RatFn<Rat>;
using P = Poly<Rat>;

namespace {

RM random_causal(Sampler& rng, std::size_t p, std::size_t q, int max_den_deg, long bound) {
    RM h(p, q);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            int dd = 1 + static_cast<int>(rng.uniform_int(0, max_den_deg - 1));
            std::vector<Rat> den;
            for (int k = 0; k < dd; ++k) den.emplace_back(rng.uniform_int(-2, 2));
            den.emplace_back(1);  // monic, degree dd
            std::vector<Rat> num;
            for (int k = 0; k <= dd; ++k) num.emplace_back(rng.uniform_int(-3, 3));
            h(i, j) = R(P(std::move(num)), P(std::move(den)));
        }
    return h;
}

}  // namespace

TEST_CASE("scalar delay channel realization") {
    RM h{{R(P{Rat(1)}, P{Rat(-1, 2), Rat(1)})}};  // 1/(z - 1/2)
    auto ss = realize_channel(h);
    REQUIRE(ss.order() == 1);
    REQUIRE(ss.a == M{{Rat(1, 2)}});
    REQUIRE(ss.b == M{{Rat(1)}});
    REQUIRE(ss.c == M{{Rat(1)}});
    REQUIRE(ss.d == M{{Rat(0)}});
    REQUIRE(ss.transfer() == h);
}

TEST_CASE("constant channels need no states") {
    RM h{{R(3), R(-2)}};
    auto ss = realize_channel(h);
    REQUIRE(ss.order() == 0);
    REQUIRE(ss.d == M{{Rat(3), Rat(-2)}});
    REQUIRE(ss.transfer() == h);
}

TEST_CASE("transfer identity on random causal matrices") {
    Sampler rng(211);
    for (int t = 0; t < 12; ++t) {
        auto h = random_causal(rng, 2, 2, 3, 3);
        auto ss = realize_channel(h);
        REQUIRE(ss.transfer() == h);
    }
    RM bad{{R::z()}};
    REQUIRE_THROWS_AS(realize_channel(bad), NonCausalEntry);
}

TEST_CASE("node grid reproduces each channel block") {
    LtiNetwork<Rat> net;
    net.nodes.push_back({"tx", 1, 0, NodeKind::transmitter});
    net.nodes.push_back({"r1", 1, 1, NodeKind::relay});
    net.nodes.push_back({"rx", 0, 1, NodeKind::receiver});
    net.set_channel("tx", "r1", RM{{R(P{Rat(1)}, P{Rat(0), Rat(1)})}});  // 1/z
    net.set_channel("r1", "rx", RM{{R(P{Rat(2)}, P{Rat(-1, 3), Rat(1)})}});
    auto g = realize_node_grid(net);
    REQUIRE(g.order() == 2);

    // per-pair transfer: C_j (zI-A)^{-1} B_i + D[j][i]
    StateSpace<Rat> pair;
    pair.a = g.a;
    pair.b = g.b[0];
    pair.c = g.c[1];
    pair.d = g.d[1][0];
    REQUIRE(pair.transfer() == net.channel(0, 1));
}

TEST_CASE("closing a relay matches the scalar pole formula") {
    // relay with self loop 1/(2z): gain k moves the pole to k/2
    LtiNetwork<Rat> net;
    net.nodes.push_back({"tx", 1, 0, NodeKind::transmitter});
    net.nodes.push_back({"r1", 1, 1, NodeKind::relay});
    net.nodes.push_back({"rx", 0, 1, NodeKind::receiver});
    net.set_channel("tx", "r1", ones(1, 1));
    net.set_channel("r1", "r1", RM{{R(P{Rat(1)}, P{Rat(0), Rat(2)})}});  // 1/(2z)
    net.set_channel("r1", "rx", ones(1, 1));

    GainAssignment<Rat> g;
    g.relay["r1"] = RM{{R(Rat(3))}};
    auto a = closed_network_state_matrix(net, g);
    auto chi = char_poly_const(a);
    REQUIRE(chi == P{Rat(-3, 2), Rat(1)});  // pole at k/2 = 3/2
    REQUIRE(!strictly_stable(chi));
    g.relay["r1"] = RM{{R(Rat(1))}};
    REQUIRE(strictly_stable(char_poly_const(closed_network_state_matrix(net, g))));
}

TEST_CASE("memoryless network closure has no states") {
    LtiNetwork<Rat> net;
    net.nodes.push_back({"tx", 1, 0, NodeKind::transmitter});
    net.nodes.push_back({"r1", 1, 1, NodeKind::relay});
    net.nodes.push_back({"rx", 0, 1, NodeKind::receiver});
    net.set_channel("tx", "r1", ones(1, 1));
    net.set_channel("r1", "rx", ones(1, 1));
    GainAssignment<Rat> g;
    g.relay["r1"] = ones(1, 1);
    REQUIRE(closed_network_state_matrix(net, g).rows() == 0);
}

TEST_CASE("ill-posed static loop is rejected") {
    // unit memoryless self loop with unit gain: 1 - k d = 0
    LtiNetwork<Rat> net;
    net.nodes.push_back({"tx", 1, 0, NodeKind::transmitter});
    net.nodes.push_back({"r1", 1, 1, NodeKind::relay});
    net.nodes.push_back({"rx", 0, 1, NodeKind::receiver});
    net.set_channel("tx", "r1", ones(1, 1));
    net.set_channel("r1", "r1", ones(1, 1));
    net.set_channel("r1", "rx", ones(1, 1));
    GainAssignment<Rat> g;
    g.relay["r1"] = ones(1, 1);
    REQUIRE_THROWS_AS(closed_network_state_matrix(net, g), LoopSingular);
}

TEST_CASE("grid closure agrees with the transfer formula") {
    Sampler rng(223);
    for (int t = 0; t < 8; ++t) {
        auto net = fixtures::random_causal_network(rng, 2, 2, 2);
        GainAssignment<Rat> gains;
        for (std::size_t r : net.relays()) {
            const auto& n = net.nodes[r];
            gains.relay[n.id] = rng.int_matrix<Rat>(n.ports_to_channel, n.ports_from_channel, 5);
        }
        RM direct;
        try {
            direct = transfer_matrix(net, gains);
        } catch (const LoopSingular&) {
            continue;
        }
        auto grid = realize_node_grid(net);
        std::vector<std::pair<std::size_t, Matrix<Rat>>> statics;
        for (std::size_t r : net.relays())
            statics.emplace_back(r, to_const_matrix(gains.relay.at(net.nodes[r].id)));
        std::size_t tx = net.transmitters()[0], rx = net.receivers()[0];
        NodeGrid<Rat> closedg;
        try {
            closedg = close_nodes(grid, statics, {tx, rx});
        } catch (const LoopSingular&) {
            continue;
        }
        StateSpace<Rat> ss;
        ss.a = closedg.a;
        ss.b = closedg.b[0];
        ss.c = closedg.c[1];
        ss.d = closedg.d[1][0];
        REQUIRE(ss.transfer() == direct);
    }
}
