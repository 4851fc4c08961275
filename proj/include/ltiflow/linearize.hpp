#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltiflow/network.hpp"

namespace ltiflow {

/// Acyclic single-hop form of a point-to-point network with a circulation
/// arc. States are ordered [X_ax; Y; X_1; ...; X_v]; the derived network has
/// an outer transmitter tx', one gain node per original terminal and relay,
/// an outer receiver rx' and optionally the auxiliary receiver rx'' whose
/// mincut achievement certifies invertibility of the relay loop.
template <class F>
struct LinearizedNetwork {
    LtiNetwork<F> base;
    std::size_t d = 0;
    std::size_t d_ax = 0;
    bool aux_receiver = false;

    std::string txp_id, rxp_id, rxq_id;     // tx', rx', rx''
    std::string gain_tx_id, gain_rx_id;     // gain nodes for K_tx, K_rx
    std::vector<std::string> relay_ids;     // original relay ids, in order

    RatMatrix<F> a_block;
    RatMatrix<F> b_tx, c_tx, b_rx, c_rx;
    std::vector<RatMatrix<F>> b_relay, c_relay;

    /// G_lin = A + B_tx K_tx C_tx + sum B_i K_i C_i + B_rx K_rx C_rx.
    RatMatrix<F> g_lin(const GainAssignment<F>& gains) const {
        RatMatrix<F> g = a_block + b_tx * gains.relay.at(gain_tx_id) * c_tx +
                         b_rx * gains.relay.at(gain_rx_id) * c_rx;
        for (std::size_t i = 0; i < relay_ids.size(); ++i)
            g += b_relay[i] * gains.relay.at(relay_ids[i]) * c_relay[i];
        return g;
    }
};

enum class MultiMode { multicast, broadcast, unicast };

inline const char* to_string(MultiMode m) {
    switch (m) {
        case MultiMode::multicast: return "multicast";
        case MultiMode::broadcast: return "broadcast";
        case MultiMode::unicast: return "unicast";
    }
    return "?";
}

enum class Relation { at_least, at_most };

struct RankThreshold {
    std::string receiver;
    Relation relation = Relation::at_least;
    std::size_t value = 0;
};

/// Circulation-arc augmented form for multicast, broadcast, and
/// multiple-unicast information flow. Broadcast and unicast carry four
/// receivers (two intended, two eavesdropper-style bounds); multicast two.
template <class F>
struct MultiLinearized {
    MultiMode mode = MultiMode::multicast;
    LtiNetwork<F> base;
    std::size_t d = 0;
    std::vector<std::size_t> d_ax;
    std::vector<RankThreshold> thresholds;
};

namespace detail {

template <class F>
void require_ptop(const LtiNetwork<F>& net) {
    if (net.transmitters().size() != 1 || net.receivers().size() != 1)
        throw DimensionMismatch("linearization needs a point-to-point network");
}

}  // namespace detail

/// Builds the linearized network per the displayed block decomposition:
/// A = diag(0_ax, I_d), each C has one -I block, each B stacks the node's
/// outgoing channel column. All gain variables enter G_lin affinely.
template <class F>
LinearizedNetwork<F> linearize_ptop(const LtiNetwork<F>& net, std::size_t d_ax,
                                    bool with_aux_receiver = false) {
    detail::require_ptop(net);
    validate(net);
    if (d_ax < 1) throw InvalidConfig("auxiliary port count must be at least 1");

    LinearizedNetwork<F> lin;
    lin.d_ax = d_ax;
    const std::size_t tx = net.transmitters()[0];
    const std::size_t rx = net.receivers()[0];
    const auto relays = net.relays();
    const std::size_t d_tx = net.nodes[tx].ports_to_channel;
    const std::size_t d_rx = net.nodes[rx].ports_from_channel;

    std::vector<std::size_t> offsets;  // state offsets of [Y; X_i...] after X_ax
    std::size_t d = d_rx;
    for (std::size_t r : relays) {
        offsets.push_back(d_ax + d);
        d += net.nodes[r].ports_from_channel;
    }
    lin.d = d;
    const std::size_t n = d_ax + d;

    lin.a_block = RatMatrix<F>(n, n);
    for (std::size_t i = d_ax; i < n; ++i) lin.a_block(i, i) = RatFn<F>(1);

    auto neg_eye_at = [&](std::size_t rows, std::size_t offset) {
        RatMatrix<F> c(rows, n);
        for (std::size_t i = 0; i < rows; ++i) c(i, offset + i) = RatFn<F>(-1);
        return c;
    };
    auto stacked_b = [&](std::size_t from) {
        RatMatrix<F> b(n, net.nodes[from].ports_to_channel);
        b.set_block(d_ax, 0, net.channel(from, rx));
        for (std::size_t k = 0; k < relays.size(); ++k)
            b.set_block(offsets[k], 0, net.channel(from, relays[k]));
        return b;
    };

    lin.b_tx = stacked_b(tx);
    lin.c_tx = neg_eye_at(d_ax, 0);
    for (std::size_t k = 0; k < relays.size(); ++k) {
        lin.b_relay.push_back(stacked_b(relays[k]));
        lin.c_relay.push_back(neg_eye_at(net.nodes[relays[k]].ports_from_channel, offsets[k]));
        lin.relay_ids.push_back(net.nodes[relays[k]].id);
    }
    lin.b_rx = RatMatrix<F>(n, d_ax);
    for (std::size_t i = 0; i < d_ax; ++i) lin.b_rx(i, i) = RatFn<F>(1);
    lin.c_rx = neg_eye_at(d_rx, d_ax);

    lin.txp_id = net.nodes[tx].id + "'";
    lin.rxp_id = net.nodes[rx].id + "'";
    lin.rxq_id = net.nodes[rx].id + "''";
    lin.gain_tx_id = net.nodes[tx].id;
    lin.gain_rx_id = net.nodes[rx].id;

    LtiNetwork<F>& b = lin.base;
    b.nodes.push_back({lin.txp_id, n, 0, NodeKind::transmitter});
    b.nodes.push_back({lin.gain_tx_id, d_tx, d_ax, NodeKind::relay});
    for (std::size_t k = 0; k < relays.size(); ++k)
        b.nodes.push_back({net.nodes[relays[k]].id, net.nodes[relays[k]].ports_to_channel,
                           net.nodes[relays[k]].ports_from_channel, NodeKind::relay});
    b.nodes.push_back({lin.gain_rx_id, d_ax, d_rx, NodeKind::relay});
    b.nodes.push_back({lin.rxp_id, 0, n, NodeKind::receiver});

    b.set_channel(lin.txp_id, lin.rxp_id, lin.a_block);
    b.set_channel(lin.txp_id, lin.gain_tx_id, lin.c_tx);
    b.set_channel(lin.gain_tx_id, lin.rxp_id, lin.b_tx);
    for (std::size_t k = 0; k < relays.size(); ++k) {
        b.set_channel(lin.txp_id, lin.relay_ids[k], lin.c_relay[k]);
        b.set_channel(lin.relay_ids[k], lin.rxp_id, lin.b_relay[k]);
    }
    b.set_channel(lin.txp_id, lin.gain_rx_id, lin.c_rx);
    b.set_channel(lin.gain_rx_id, lin.rxp_id, lin.b_rx);

    if (with_aux_receiver) {
        lin.aux_receiver = true;
        b.nodes.push_back({lin.rxq_id, 0, n, NodeKind::receiver});
        b.set_channel(lin.txp_id, lin.rxq_id, RatMatrix<F>::identity(n));
        for (std::size_t k = 0; k < relays.size(); ++k)
            b.set_channel(lin.relay_ids[k], lin.rxq_id, lin.b_relay[k]);
    }
    validate(lin.base);
    return lin;
}

template <class F>
LinearizedNetwork<F> linearize_with_aux_receiver(const LtiNetwork<F>& net, std::size_t d_ax) {
    return linearize_ptop(net, d_ax, true);
}

struct OffsetReport {
    std::size_t maxflow_lhs = 0;  // rank(K_rx G K_tx) + d
    std::size_t maxflow_rhs = 0;  // rank G_lin
    bool maxflow_ok = false;
    std::size_t mincut_lhs = 0;  // min{rank K_tx, rank K_rx, mincut} + d
    std::size_t mincut_rhs = 0;  // mincut of the linearized network
    bool mincut_ok = false;
    bool ok() const { return maxflow_ok && mincut_ok; }
};

/// Checks the maxflow and mincut equivalence identities between a network and
/// its linearization; both sides are computed independently (sampled generic
/// ranks for maxflow, cut enumeration for mincut).
template <class F>
OffsetReport verify_offsets(const LtiNetwork<F>& net, const LinearizedNetwork<F>& lin,
                            const RankConfig& cfg, bool throw_on_violation = false) {
    detail::require_ptop(net);
    const std::size_t tx = net.transmitters()[0];
    const std::size_t rx = net.receivers()[0];
    const std::size_t d_tx = net.nodes[tx].ports_to_channel;
    const std::size_t d_rx = net.nodes[rx].ports_from_channel;
    if (lin.d_ax < std::max(d_tx, d_rx))
        throw InvalidConfig("offset verification needs d_ax >= max(d_tx, d_rx)");
    cfg.require_bound_at_least(lin.d_ax + lin.d);

    OffsetReport rep;
    Sampler rng(cfg.seed);
    std::size_t lhs_best = 0, rhs_best = 0;
    for (unsigned round = 0; round < cfg.rounds; ++round) {
        for (int attempt = 0;; ++attempt) {
            auto gains = detail::sample_relay_gains(net, rng, cfg.sample_bound);
            auto k_tx = rng.int_matrix<F>(d_tx, lin.d_ax, cfg.sample_bound);
            auto k_rx = rng.int_matrix<F>(lin.d_ax, d_rx, cfg.sample_bound);
            try {
                auto g = transfer_matrix(net, gains, net.nodes[tx].id, net.nodes[rx].id);
                lhs_best = std::max(lhs_best, mat_rank(RatMatrix<F>(k_rx * g * k_tx)));
                GainAssignment<F> lin_gains = gains;
                lin_gains.relay[lin.gain_tx_id] = k_tx;
                lin_gains.relay[lin.gain_rx_id] = k_rx;
                rhs_best = std::max(rhs_best, mat_rank(lin.g_lin(lin_gains)));
                break;
            } catch (const LoopSingular&) {
                if (attempt >= 64) throw;
            }
        }
    }
    rep.maxflow_lhs = lhs_best + lin.d;
    rep.maxflow_rhs = rhs_best;
    rep.maxflow_ok = rep.maxflow_lhs == rep.maxflow_rhs;

    std::size_t rank_ktx = std::min(d_tx, lin.d_ax);
    std::size_t rank_krx = std::min(lin.d_ax, d_rx);
    std::size_t mc = mincut_rank(net, std::optional<F>(), net.nodes[rx].id).rank;
    rep.mincut_lhs = std::min({rank_ktx, rank_krx, mc}) + lin.d;
    rep.mincut_rhs = mincut_rank(lin.base, std::optional<F>(), lin.rxp_id).rank;
    rep.mincut_ok = rep.mincut_lhs == rep.mincut_rhs;

    if (throw_on_violation && !rep.ok())
        throw OffsetViolation("linearization offset identity failed");
    return rep;
}

/// Circulation-arc augmentation for multicast (one shared arc), broadcast
/// (two arcs, shared transmitter column) and multiple-unicast (two arcs,
/// distinct transmitter columns). `rates` are the per-receiver message
/// dimensions d_1, d_2 (and the interference bounds d_3, d_4 for broadcast
/// and unicast); when empty, d_k defaults to the per-receiver mincut and the
/// interference bounds default to zero.
template <class F>
MultiLinearized<F> linearize_multi(const LtiNetwork<F>& net, MultiMode mode,
                                   std::vector<std::size_t> d_ax,
                                   std::vector<std::size_t> rates = {}) {
    validate(net);
    const auto txs = net.transmitters();
    const auto rxs = net.receivers();
    const auto relays = net.relays();
    if (mode == MultiMode::unicast) {
        if (txs.size() != 2 || rxs.size() != 2)
            throw ModeShapeMismatch("unicast linearization needs two transmitters and two receivers");
    } else {
        if (txs.size() != 1 || rxs.size() != 2)
            throw ModeShapeMismatch(std::string(to_string(mode)) +
                                    " linearization needs one transmitter and two receivers");
    }
    const std::size_t arcs = (mode == MultiMode::multicast) ? 1 : 2;
    if (d_ax.size() != arcs) throw ModeShapeMismatch("wrong number of auxiliary port counts");
    for (std::size_t a : d_ax)
        if (a < 1) throw InvalidConfig("auxiliary port count must be at least 1");

    MultiLinearized<F> lin;
    lin.mode = mode;
    lin.d_ax = d_ax;
    const std::size_t ax_total = (arcs == 2) ? d_ax[0] + d_ax[1] : d_ax[0];
    const std::size_t d_rx1 = net.nodes[rxs[0]].ports_from_channel;
    const std::size_t d_rx2 = net.nodes[rxs[1]].ports_from_channel;

    std::vector<std::size_t> offsets;
    std::size_t d = d_rx1 + d_rx2;
    for (std::size_t r : relays) {
        offsets.push_back(ax_total + d);
        d += net.nodes[r].ports_from_channel;
    }
    lin.d = d;
    const std::size_t n = ax_total + d;

    RatMatrix<F> a_block(n, n);
    for (std::size_t i = ax_total; i < n; ++i) a_block(i, i) = RatFn<F>(1);

    auto neg_eye_at = [&](std::size_t rows, std::size_t offset) {
        RatMatrix<F> c(rows, n);
        for (std::size_t i = 0; i < rows; ++i) c(i, offset + i) = RatFn<F>(-1);
        return c;
    };
    auto stacked_b = [&](std::size_t from) {
        RatMatrix<F> b(n, net.nodes[from].ports_to_channel);
        b.set_block(ax_total, 0, net.channel(from, rxs[0]));
        b.set_block(ax_total + d_rx1, 0, net.channel(from, rxs[1]));
        for (std::size_t k = 0; k < relays.size(); ++k)
            b.set_block(offsets[k], 0, net.channel(from, relays[k]));
        return b;
    };
    auto arc_b = [&](std::size_t arc) {
        RatMatrix<F> b(n, d_ax[arc]);
        std::size_t off = (arc == 0) ? 0 : d_ax[0];
        for (std::size_t i = 0; i < d_ax[arc]; ++i) b(off + i, i) = RatFn<F>(1);
        return b;
    };

    // gain node descriptors: (id, B, C, ports_to, ports_from)
    struct GainNode {
        std::string id;
        RatMatrix<F> b, c;
        std::size_t to, from;
    };
    std::vector<GainNode> gnodes;
    if (mode == MultiMode::unicast) {
        for (std::size_t a = 0; a < 2; ++a) {
            std::size_t off = (a == 0) ? 0 : d_ax[0];
            gnodes.push_back({net.nodes[txs[a]].id, stacked_b(txs[a]), neg_eye_at(d_ax[a], off),
                              net.nodes[txs[a]].ports_to_channel, d_ax[a]});
        }
    } else if (mode == MultiMode::broadcast) {
        for (std::size_t a = 0; a < 2; ++a) {
            std::size_t off = (a == 0) ? 0 : d_ax[0];
            gnodes.push_back({net.nodes[txs[0]].id + "_arc" + std::to_string(a + 1),
                              stacked_b(txs[0]), neg_eye_at(d_ax[a], off),
                              net.nodes[txs[0]].ports_to_channel, d_ax[a]});
        }
    } else {
        gnodes.push_back({net.nodes[txs[0]].id, stacked_b(txs[0]), neg_eye_at(d_ax[0], 0),
                          net.nodes[txs[0]].ports_to_channel, d_ax[0]});
    }
    const std::size_t n_tx_nodes = gnodes.size();
    for (std::size_t k = 0; k < relays.size(); ++k)
        gnodes.push_back({net.nodes[relays[k]].id, stacked_b(relays[k]),
                          neg_eye_at(net.nodes[relays[k]].ports_from_channel, offsets[k]),
                          net.nodes[relays[k]].ports_to_channel,
                          net.nodes[relays[k]].ports_from_channel});
    const std::size_t first_rx_node = gnodes.size();
    {
        std::size_t arc1 = 0, arc2 = (arcs == 2) ? 1 : 0;
        gnodes.push_back({net.nodes[rxs[0]].id, arc_b(arc1), neg_eye_at(d_rx1, ax_total),
                          d_ax[arc1], d_rx1});
        gnodes.push_back({net.nodes[rxs[1]].id, arc_b(arc2),
                          neg_eye_at(d_rx2, ax_total + d_rx1), d_ax[arc2], d_rx2});
    }

    const std::string txp = "tx'";
    LtiNetwork<F>& b = lin.base;
    b.nodes.push_back({txp, n, 0, NodeKind::transmitter});
    for (const auto& g : gnodes) b.nodes.push_back({g.id, g.to, g.from, NodeKind::relay});

    // receiver wiring: which tx-side arc gain and which rx gain feed each sink
    struct Sink {
        std::string id;
        std::size_t tx_node, rx_node;
        Relation rel;
        std::size_t rate_index;
    };
    std::vector<Sink> sinks;
    if (mode == MultiMode::multicast) {
        sinks.push_back({net.nodes[rxs[0]].id + "'", 0, first_rx_node, Relation::at_least, 0});
        sinks.push_back({net.nodes[rxs[1]].id + "'", 0, first_rx_node + 1, Relation::at_least, 1});
    } else {
        sinks.push_back({"rx11'", 0, first_rx_node, Relation::at_least, 0});
        sinks.push_back({"rx22'", 1, first_rx_node + 1, Relation::at_least, 1});
        sinks.push_back({"rx12'", 0, first_rx_node + 1, Relation::at_most, 2});
        sinks.push_back({"rx21'", 1, first_rx_node, Relation::at_most, 3});
    }
    for (const auto& s : sinks) b.nodes.push_back({s.id, 0, n, NodeKind::receiver});

    for (const auto& g : gnodes) b.set_channel(txp, g.id, g.c);
    for (const auto& s : sinks) {
        b.set_channel(txp, s.id, a_block);
        b.set_channel(gnodes[s.tx_node].id, s.id, gnodes[s.tx_node].b);
        for (std::size_t k = 0; k < relays.size(); ++k) {
            const auto& g = gnodes[n_tx_nodes + k];
            b.set_channel(g.id, s.id, g.b);
        }
        b.set_channel(gnodes[s.rx_node].id, s.id, gnodes[s.rx_node].b);
    }
    validate(lin.base);

    // default message rates: per-receiver mincut; interference bounds zero
    std::vector<std::size_t> rk = rates;
    if (rk.empty()) {
        std::size_t m1 = mincut_rank(net, std::optional<F>(), net.nodes[rxs[0]].id).rank;
        std::size_t m2 = mincut_rank(net, std::optional<F>(), net.nodes[rxs[1]].id).rank;
        if (mode == MultiMode::multicast) {
            std::size_t r = std::min(m1, m2);
            rk = {r, r};
        } else {
            rk = {m1, m2, 0, 0};
        }
    }
    if (rk.size() != sinks.size()) throw ModeShapeMismatch("wrong number of rate parameters");
    for (const auto& s : sinks)
        lin.thresholds.push_back({s.id, s.rel, d + rk[s.rate_index]});
    return lin;
}

/// Mincut-achieving LTI code for a point-to-point network: d_ax is set to the
/// d.o.f. mincut, then memoryless integer gains are drawn until the
/// linearized network with the auxiliary receiver reaches rank d + mincut
/// toward rx' and full rank toward rx''. The returned relay gains achieve the
/// mincut of the original network with an invertible relay loop.
template <class F>
GainAssignment<F> synthesize_gains(const LtiNetwork<F>& net, const RankConfig& cfg,
                                   unsigned budget = 32) {
    detail::require_ptop(net);
    const std::size_t rx = net.receivers()[0];
    const std::size_t mc = mincut_rank(net, std::optional<F>(), net.nodes[rx].id).rank;
    const std::size_t d_ax = std::max<std::size_t>(mc, 1);
    auto lin = linearize_with_aux_receiver(net, d_ax);
    cfg.require_bound_at_least(lin.d_ax + lin.d);

    Sampler rng(cfg.seed);
    for (unsigned attempt = 0; attempt < budget; ++attempt) {
        auto gains = detail::sample_relay_gains(lin.base, rng, cfg.sample_bound);
        std::size_t to_rxp = transfer_rank(lin.base, gains, lin.txp_id, lin.rxp_id);
        std::size_t to_rxq = transfer_rank(lin.base, gains, lin.txp_id, lin.rxq_id);
        if (to_rxp >= lin.d + mc && to_rxq == lin.d_ax + lin.d) {
            GainAssignment<F> out;
            for (const auto& id : lin.relay_ids) out.relay[id] = gains.relay.at(id);
            out.k_tx = gains.relay.at(lin.gain_tx_id);
            out.k_rx = gains.relay.at(lin.gain_rx_id);
            return out;
        }
    }
    throw SynthesisBudgetExceeded("no mincut-achieving gain assignment found within budget");
}

/// Multicast variant: a common-rate code achieving the smaller of the two
/// receiver mincuts at both receivers simultaneously.
template <class F>
GainAssignment<F> synthesize_gains_multicast(const LtiNetwork<F>& net, const RankConfig& cfg,
                                             unsigned budget = 32) {
    validate(net);
    const auto rxs = net.receivers();
    if (net.transmitters().size() != 1 || rxs.size() != 2)
        throw ModeShapeMismatch("multicast synthesis needs one transmitter and two receivers");
    std::size_t m1 = mincut_rank(net, std::optional<F>(), net.nodes[rxs[0]].id).rank;
    std::size_t m2 = mincut_rank(net, std::optional<F>(), net.nodes[rxs[1]].id).rank;
    const std::size_t rate = std::min(m1, m2);
    const std::size_t tx = net.transmitters()[0];

    Sampler rng(cfg.seed);
    for (unsigned attempt = 0; attempt < budget; ++attempt) {
        auto gains = detail::sample_relay_gains(net, rng, cfg.sample_bound);
        try {
            bool ok = true;
            for (std::size_t k : rxs)
                ok = ok && transfer_rank(net, gains, net.nodes[tx].id, net.nodes[k].id) >= rate;
            if (ok) return gains;
        } catch (const LoopSingular&) {
        }
    }
    throw SynthesisBudgetExceeded("no multicast gain assignment found within budget");
}

}  // namespace ltiflow
