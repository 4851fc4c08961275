#pragma once

#include "ltiflow/linearize.hpp"
#include "ltiflow/network.hpp"
#include "ltiflow/rng.hpp"

namespace fixtures {

using ltiflow::GainAssignment;
using ltiflow::LtiNetwork;
using ltiflow::NodeKind;
using ltiflow::Poly;
using ltiflow::Rat;
using ltiflow::RatFn;
using ltiflow::RatMatrix;
using ltiflow::Sampler;

inline RatMatrix<Rat> ones(std::size_t r, std::size_t c) {
    RatMatrix<Rat> m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = RatFn<Rat>(1);
    return m;
}

/// tx -> r1 -> r2 -> rx with unit scalar channels; end-to-end gain k2 k1.
inline LtiNetwork<Rat> two_hop_internal_example() {
    LtiNetwork<Rat> net;
    net.nodes.push_back({"tx", 1, 0, NodeKind::transmitter});
    net.nodes.push_back({"r1", 1, 1, NodeKind::relay});
    net.nodes.push_back({"r2", 1, 1, NodeKind::relay});
    net.nodes.push_back({"rx", 0, 1, NodeKind::receiver});
    net.set_channel("tx", "r1", ones(1, 1));
    net.set_channel("r1", "r2", ones(1, 1));
    net.set_channel("r2", "rx", ones(1, 1));
    return net;
}

/// tx -> r1 -> rx chain with unit scalar channels.
inline LtiNetwork<Rat> one_relay_chain() {
    LtiNetwork<Rat> net;
    net.nodes.push_back({"tx", 1, 0, NodeKind::transmitter});
    net.nodes.push_back({"r1", 1, 1, NodeKind::relay});
    net.nodes.push_back({"rx", 0, 1, NodeKind::receiver});
    net.set_channel("tx", "r1", ones(1, 1));
    net.set_channel("r1", "rx", ones(1, 1));
    return net;
}

inline LtiNetwork<Rat> direct_identity(std::size_t m) {
    LtiNetwork<Rat> net;
    net.nodes.push_back({"tx", m, 0, NodeKind::transmitter});
    net.nodes.push_back({"rx", 0, m, NodeKind::receiver});
    net.set_channel("tx", "rx", RatMatrix<Rat>::identity(m));
    return net;
}

/// Classic butterfly: two sources' worth of ports at one transmitter, a
/// shared bottleneck, two receivers. All edge gains are 1.
inline LtiNetwork<Rat> butterfly() {
    LtiNetwork<Rat> net;
    net.nodes.push_back({"tx", 2, 0, NodeKind::transmitter});
    net.nodes.push_back({"a", 2, 1, NodeKind::relay});   // copies to rx1 and the bottleneck
    net.nodes.push_back({"b", 2, 1, NodeKind::relay});   // copies to rx2 and the bottleneck
    net.nodes.push_back({"c", 1, 2, NodeKind::relay});   // bottleneck combiner
    net.nodes.push_back({"d", 2, 1, NodeKind::relay});   // bottleneck fan-out
    net.nodes.push_back({"rx1", 0, 2, NodeKind::receiver});
    net.nodes.push_back({"rx2", 0, 2, NodeKind::receiver});
    net.set_channel("tx", "a", RatMatrix<Rat>{{RatFn<Rat>(1), RatFn<Rat>(0)}});
    net.set_channel("tx", "b", RatMatrix<Rat>{{RatFn<Rat>(0), RatFn<Rat>(1)}});
    // a: port 0 -> rx1 input 0, port 1 -> c input 0
    net.set_channel("a", "rx1",
                    RatMatrix<Rat>{{RatFn<Rat>(1), RatFn<Rat>(0)}, {RatFn<Rat>(0), RatFn<Rat>(0)}});
    net.set_channel("a", "c",
                    RatMatrix<Rat>{{RatFn<Rat>(0), RatFn<Rat>(1)}, {RatFn<Rat>(0), RatFn<Rat>(0)}});
    // b: port 0 -> c input 1, port 1 -> rx2 input 1
    net.set_channel("b", "c",
                    RatMatrix<Rat>{{RatFn<Rat>(0), RatFn<Rat>(0)}, {RatFn<Rat>(1), RatFn<Rat>(0)}});
    net.set_channel("b", "rx2",
                    RatMatrix<Rat>{{RatFn<Rat>(0), RatFn<Rat>(0)}, {RatFn<Rat>(0), RatFn<Rat>(1)}});
    net.set_channel("c", "d", ones(1, 1));
    // d: port 0 -> rx1 input 1, port 1 -> rx2 input 0
    net.set_channel("d", "rx1",
                    RatMatrix<Rat>{{RatFn<Rat>(0), RatFn<Rat>(0)}, {RatFn<Rat>(1), RatFn<Rat>(0)}});
    net.set_channel("d", "rx2",
                    RatMatrix<Rat>{{RatFn<Rat>(0), RatFn<Rat>(1)}, {RatFn<Rat>(0), RatFn<Rat>(0)}});
    return net;
}

/// The figure's fixed butterfly code: every relay copies or sums its inputs.
inline GainAssignment<Rat> butterfly_unit_gains() {
    GainAssignment<Rat> g;
    g.relay["a"] = ones(2, 1);
    g.relay["b"] = ones(2, 1);
    g.relay["c"] = ones(1, 2);
    g.relay["d"] = ones(2, 1);
    return g;
}

inline RatFn<Rat> random_poly_entry(Sampler& rng, int max_deg, long bound) {
    std::vector<Rat> c;
    int d = static_cast<int>(rng.uniform_int(0, max_deg));
    for (int k = 0; k <= d; ++k) c.emplace_back(rng.uniform_int(-bound, bound));
    return RatFn<Rat>(Poly<Rat>(std::move(c)));
}

/// Causal entry with a stable denominator built from small-modulus roots.
inline RatFn<Rat> random_stable_causal_entry(Sampler& rng, int max_den_deg, long bound) {
    static const Rat roots[] = {Rat(0), Rat(1, 2), Rat(-1, 2), Rat(1, 3), Rat(-2, 5)};
    int dd = static_cast<int>(rng.uniform_int(0, max_den_deg));
    Poly<Rat> den{Rat(1)};
    for (int k = 0; k < dd; ++k)
        den *= Poly<Rat>{-roots[rng.uniform_int(0, 4)], Rat(1)};
    std::vector<Rat> num;
    for (int k = 0; k <= dd; ++k) num.emplace_back(rng.uniform_int(-bound, bound));
    return RatFn<Rat>(Poly<Rat>(std::move(num)), std::move(den));
}

/// Random point-to-point network with stable causal channels throughout.
inline LtiNetwork<Rat> random_causal_network(Sampler& rng, std::size_t v_max,
                                             std::size_t ports_max, int max_den_deg,
                                             long bound = 3) {
    LtiNetwork<Rat> net;
    std::size_t v = rng.uniform_int(0, static_cast<long>(v_max));
    std::size_t d_tx = 1 + rng.uniform_int(0, static_cast<long>(ports_max - 1));
    std::size_t d_rx = 1 + rng.uniform_int(0, static_cast<long>(ports_max - 1));
    net.nodes.push_back({"tx", d_tx, 0, NodeKind::transmitter});
    for (std::size_t i = 0; i < v; ++i) {
        std::size_t din = 1 + rng.uniform_int(0, static_cast<long>(ports_max - 1));
        std::size_t dout = 1 + rng.uniform_int(0, static_cast<long>(ports_max - 1));
        net.nodes.push_back({"r" + std::to_string(i + 1), din, dout, NodeKind::relay});
    }
    net.nodes.push_back({"rx", 0, d_rx, NodeKind::receiver});
    for (std::size_t i = 0; i < net.nodes.size(); ++i)
        for (std::size_t j = 0; j < net.nodes.size(); ++j) {
            const auto& nf = net.nodes[i];
            const auto& nt = net.nodes[j];
            if (nf.kind == NodeKind::receiver || nt.kind == NodeKind::transmitter) continue;
            if (rng.uniform_int(0, 2) == 0) continue;
            RatMatrix<Rat> m(nt.ports_from_channel, nf.ports_to_channel);
            for (std::size_t p = 0; p < m.rows(); ++p)
                for (std::size_t q = 0; q < m.cols(); ++q)
                    m(p, q) = random_stable_causal_entry(rng, max_den_deg, bound);
            net.set_channel(nf.id, nt.id, m);
        }
    return net;
}

/// Random point-to-point network: up to v_max relays, port counts up to
/// ports_max, random integer polynomial channels of degree <= deg_max.
inline LtiNetwork<Rat> random_network(Sampler& rng, std::size_t v_max, std::size_t ports_max,
                                      int deg_max, long bound = 3) {
    LtiNetwork<Rat> net;
    std::size_t v = rng.uniform_int(0, static_cast<long>(v_max));
    std::size_t d_tx = 1 + rng.uniform_int(0, static_cast<long>(ports_max - 1));
    std::size_t d_rx = 1 + rng.uniform_int(0, static_cast<long>(ports_max - 1));
    net.nodes.push_back({"tx", d_tx, 0, NodeKind::transmitter});
    for (std::size_t i = 0; i < v; ++i) {
        std::size_t din = 1 + rng.uniform_int(0, static_cast<long>(ports_max - 1));
        std::size_t dout = 1 + rng.uniform_int(0, static_cast<long>(ports_max - 1));
        net.nodes.push_back({"r" + std::to_string(i + 1), din, dout, NodeKind::relay});
    }
    net.nodes.push_back({"rx", 0, d_rx, NodeKind::receiver});
    auto maybe_channel = [&](const std::string& from, const std::string& to) {
        if (rng.uniform_int(0, 2) == 0) return;  // one third of pairs stay disconnected
        std::size_t fi = net.node_index(from), ti = net.node_index(to);
        int deg = (fi == ti) ? 0 : deg_max;  // self-loop blocks must stay proper
        RatMatrix<Rat> m(net.nodes[ti].ports_from_channel, net.nodes[fi].ports_to_channel);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                m(i, j) = random_poly_entry(rng, deg, bound);
        net.set_channel(from, to, m);
    };
    for (std::size_t i = 0; i < net.nodes.size(); ++i)
        for (std::size_t j = 0; j < net.nodes.size(); ++j) {
            const auto& nf = net.nodes[i];
            const auto& nt = net.nodes[j];
            if (nf.kind == NodeKind::receiver || nt.kind == NodeKind::transmitter) continue;
            maybe_channel(nf.id, nt.id);
        }
    return net;
}

}  // namespace fixtures
