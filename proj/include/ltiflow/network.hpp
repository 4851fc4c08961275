#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ltiflow/linalg.hpp"
#include "ltiflow/rng.hpp"

namespace ltiflow {

enum class NodeKind { transmitter, relay, receiver };

inline const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::transmitter: return "transmitter";
        case NodeKind::relay: return "relay";
        case NodeKind::receiver: return "receiver";
    }
    return "?";
}

/// A node and its port counts. `ports_to_channel` is the number of signals the
/// node feeds into the channels, `ports_from_channel` the number it receives.
struct NodeSpec {
    std::string id;
    std::size_t ports_to_channel = 0;    // d_{i,in}
    std::size_t ports_from_channel = 0;  // d_{i,out}
    NodeKind kind = NodeKind::relay;
};

/// Point-to-point or multi-terminal LTI communication network. The channel
/// block from node `i` to node `j` has shape d_{j,out} x d_{i,in}; absent
/// blocks are zero.
template <class F>
class LtiNetwork {
   public:
    std::vector<NodeSpec> nodes;
    std::map<std::pair<std::size_t, std::size_t>, RatMatrix<F>> channels;

    std::size_t node_index(const std::string& id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id) return i;
        throw Error("unknown node id: " + id);
    }
    std::vector<std::size_t> transmitters() const { return of_kind(NodeKind::transmitter); }
    std::vector<std::size_t> relays() const { return of_kind(NodeKind::relay); }
    std::vector<std::size_t> receivers() const { return of_kind(NodeKind::receiver); }

    void set_channel(const std::string& from, const std::string& to, RatMatrix<F> m) {
        channels[{node_index(from), node_index(to)}] = std::move(m);
    }

    /// Channel block, materializing zeros for absent pairs.
    RatMatrix<F> channel(std::size_t from, std::size_t to) const {
        auto it = channels.find({from, to});
        if (it != channels.end()) return it->second;
        return RatMatrix<F>::zero(nodes[to].ports_from_channel, nodes[from].ports_to_channel);
    }

    bool has_pole_at(const F& lambda) const {
        for (const auto& [key, m] : channels)
            for (std::size_t i = 0; i < m.rows(); ++i)
                for (std::size_t j = 0; j < m.cols(); ++j)
                    if (m(i, j).has_pole_at(lambda)) return true;
        return false;
    }

    /// The same network with every channel entry evaluated at z = lambda.
    LtiNetwork at_lambda(const F& lambda) const {
        LtiNetwork out;
        out.nodes = nodes;
        for (const auto& [key, m] : channels) {
            try {
                out.channels[key] = to_ratfn_matrix(eval_matrix(m, lambda));
            } catch (const PoleAtPoint&) {
                throw PoleAtLambda("channel " + nodes[key.first].id + "->" +
                                   nodes[key.second].id + " has a pole at the given frequency");
            }
        }
        return out;
    }

   private:
    std::vector<std::size_t> of_kind(NodeKind k) const {
        std::vector<std::size_t> r;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].kind == k) r.push_back(i);
        return r;
    }
};

/// Relay gain assignment; optional pre/post processors at the terminals.
template <class F>
struct GainAssignment {
    std::map<std::string, RatMatrix<F>> relay;
    std::optional<RatMatrix<F>> k_tx;
    std::optional<RatMatrix<F>> k_rx;
};

/// Transmitter-side node subset defining a cut.
struct Cut {
    std::vector<std::string> v_side;
};

template <class F>
void validate(const LtiNetwork<F>& net) {
    if (net.transmitters().empty() || net.receivers().empty())
        throw PortKindViolation("network needs at least one transmitter and one receiver");
    for (const auto& n : net.nodes) {
        if (n.kind == NodeKind::transmitter && n.ports_from_channel != 0)
            throw PortKindViolation("transmitter " + n.id + " must not receive from channels");
        if (n.kind == NodeKind::receiver && n.ports_to_channel != 0)
            throw PortKindViolation("receiver " + n.id + " must not transmit into channels");
    }
    for (const auto& [key, m] : net.channels) {
        const auto& from = net.nodes[key.first];
        const auto& to = net.nodes[key.second];
        if (to.kind == NodeKind::transmitter)
            throw PortKindViolation("channel into transmitter " + to.id);
        if (from.kind == NodeKind::receiver)
            throw PortKindViolation("channel out of receiver " + from.id);
        if (m.rows() != to.ports_from_channel || m.cols() != from.ports_to_channel)
            throw DimensionMismatch("channel " + from.id + "->" + to.id + " is " +
                                    m.shape_str() + ", expected " +
                                    std::to_string(to.ports_from_channel) + "x" +
                                    std::to_string(from.ports_to_channel));
        if (key.first == key.second) {
            for (std::size_t i = 0; i < m.rows(); ++i)
                for (std::size_t j = 0; j < m.cols(); ++j)
                    if (!m(i, j).is_causal())
                        throw PortKindViolation("improper self-loop channel at node " + from.id);
        }
    }
}

template <class F>
void validate_gains(const LtiNetwork<F>& net, const GainAssignment<F>& gains) {
    for (std::size_t r : net.relays()) {
        const auto& n = net.nodes[r];
        auto it = gains.relay.find(n.id);
        if (it == gains.relay.end()) throw DimensionMismatch("missing gain for relay " + n.id);
        const auto& k = it->second;
        if (k.rows() != n.ports_to_channel || k.cols() != n.ports_from_channel)
            throw DimensionMismatch("gain of relay " + n.id + " is " + k.shape_str() +
                                    ", expected " + std::to_string(n.ports_to_channel) + "x" +
                                    std::to_string(n.ports_from_channel));
        for (std::size_t i = 0; i < k.rows(); ++i)
            for (std::size_t j = 0; j < k.cols(); ++j)
                if (!k(i, j).is_causal())
                    throw PortKindViolation("non-causal gain entry at relay " + n.id);
    }
}

namespace detail {

/// Relay loop matrix I - [H_{s,r} K_s] and the terminal blocks of the
/// transfer formula.
template <class F>
struct LoopBlocks {
    RatMatrix<F> i_minus_q;                // t x t, t = sum of relay d_out
    std::vector<std::size_t> relay_nodes;  // network indices
    std::vector<std::size_t> row_offsets;  // per relay, into the t rows
    std::size_t t = 0;
};

template <class F>
LoopBlocks<F> loop_blocks(const LtiNetwork<F>& net, const GainAssignment<F>& gains) {
    LoopBlocks<F> lb;
    lb.relay_nodes = net.relays();
    for (std::size_t r : lb.relay_nodes) {
        lb.row_offsets.push_back(lb.t);
        lb.t += net.nodes[r].ports_from_channel;
    }
    lb.i_minus_q = RatMatrix<F>::identity(lb.t);
    for (std::size_t a = 0; a < lb.relay_nodes.size(); ++a) {
        std::size_t s = lb.relay_nodes[a];
        const auto& ks = gains.relay.at(net.nodes[s].id);
        for (std::size_t b = 0; b < lb.relay_nodes.size(); ++b) {
            std::size_t r = lb.relay_nodes[b];
            auto hk = net.channel(s, r) * ks;  // d_{r,out} x d_{s,out}
            if (hk.is_zero()) continue;
            for (std::size_t i = 0; i < hk.rows(); ++i)
                for (std::size_t j = 0; j < hk.cols(); ++j)
                    lb.i_minus_q(lb.row_offsets[b] + i, lb.row_offsets[a] + j) -= hk(i, j);
        }
    }
    return lb;
}

template <class F>
RatMatrix<F> stacked_inflow(const LtiNetwork<F>& net, const LoopBlocks<F>& lb, std::size_t tx) {
    RatMatrix<F> v(lb.t, net.nodes[tx].ports_to_channel);
    for (std::size_t b = 0; b < lb.relay_nodes.size(); ++b)
        v.set_block(lb.row_offsets[b], 0, net.channel(tx, lb.relay_nodes[b]));
    return v;
}

template <class F>
RatMatrix<F> stacked_outflow(const LtiNetwork<F>& net, const GainAssignment<F>& gains,
                             const LoopBlocks<F>& lb, std::size_t rx) {
    RatMatrix<F> w(net.nodes[rx].ports_from_channel, lb.t);
    for (std::size_t a = 0; a < lb.relay_nodes.size(); ++a) {
        std::size_t s = lb.relay_nodes[a];
        auto hk = net.channel(s, rx) * gains.relay.at(net.nodes[s].id);
        w.set_block(0, lb.row_offsets[a], hk);
    }
    return w;
}

}  // namespace detail

/// Closed-form end-to-end transfer matrix
///   H_{tx,rx} + [H_{i,rx} K_i] (I - [H_{s,r} K_s])^{-1} [H_{tx,i}].
/// Throws LoopSingular when the relay loop matrix is not invertible.
template <class F>
RatMatrix<F> transfer_matrix(const LtiNetwork<F>& net, const GainAssignment<F>& gains,
                             const std::string& tx_id, const std::string& rx_id) {
    validate_gains(net, gains);
    const std::size_t tx = net.node_index(tx_id), rx = net.node_index(rx_id);
    RatMatrix<F> g = net.channel(tx, rx);
    auto lb = detail::loop_blocks(net, gains);
    if (lb.t == 0) return g;
    RatMatrix<F> inv;
    try {
        inv = mat_inverse(lb.i_minus_q);
    } catch (const SingularMatrix&) {
        throw LoopSingular();
    }
    return g + detail::stacked_outflow(net, gains, lb, rx) * inv *
                   detail::stacked_inflow(net, lb, tx);
}

template <class F>
RatMatrix<F> transfer_matrix(const LtiNetwork<F>& net, const GainAssignment<F>& gains) {
    auto txs = net.transmitters();
    auto rxs = net.receivers();
    if (txs.size() != 1 || rxs.size() != 1)
        throw DimensionMismatch(
            "transfer_matrix without terminal ids needs a point-to-point network");
    return transfer_matrix(net, gains, net.nodes[txs[0]].id, net.nodes[rxs[0]].id);
}

/// Rank of the end-to-end transfer matrix, through the block rank identity
/// rank [H W; -V I-Q] = rank(I-Q) + rank(H + W (I-Q)^{-1} V); a single
/// elimination, no rational-function inverse.
template <class F>
std::size_t transfer_rank(const LtiNetwork<F>& net, const GainAssignment<F>& gains,
                          const std::string& tx_id, const std::string& rx_id) {
    const std::size_t tx = net.node_index(tx_id), rx = net.node_index(rx_id);
    auto lb = detail::loop_blocks(net, gains);
    if (lb.t == 0) return mat_rank(net.channel(tx, rx));
    if (mat_rank(lb.i_minus_q) < lb.t) throw LoopSingular();
    auto top = RatMatrix<F>::hstack(net.channel(tx, rx),
                                    detail::stacked_outflow(net, gains, lb, rx));
    auto bottom = RatMatrix<F>::hstack(-detail::stacked_inflow(net, lb, tx), lb.i_minus_q);
    return mat_rank(RatMatrix<F>::vstack(top, bottom)) - lb.t;
}

namespace detail {

template <class F>
GainAssignment<F> sample_relay_gains(const LtiNetwork<F>& net, Sampler& rng, long bound) {
    GainAssignment<F> g;
    for (std::size_t r : net.relays()) {
        const auto& n = net.nodes[r];
        g.relay[n.id] = rng.int_matrix<F>(n.ports_to_channel, n.ports_from_channel, bound);
    }
    return g;
}

}  // namespace detail

/// Generic transfer rank: maximum transfer rank over `rounds` random integer
/// gain substitutions (Schwartz-Zippel). Singular loop draws are resampled.
template <class F>
std::size_t generic_rank(const LtiNetwork<F>& net, const std::optional<F>& at,
                         const RankConfig& cfg, const std::string& tx_id,
                         const std::string& rx_id) {
    const LtiNetwork<F> work = at ? net.at_lambda(*at) : net;
    std::size_t dim = 0;
    for (const auto& n : work.nodes)
        dim = std::max(dim, std::max(n.ports_to_channel, n.ports_from_channel));
    cfg.require_bound_at_least(dim);
    Sampler rng(cfg.seed);
    std::size_t best = 0;
    for (unsigned round = 0; round < cfg.rounds; ++round) {
        for (int attempt = 0;; ++attempt) {
            auto gains = detail::sample_relay_gains(work, rng, cfg.sample_bound);
            try {
                best = std::max(best, transfer_rank(work, gains, tx_id, rx_id));
                break;
            } catch (const LoopSingular&) {
                if (attempt >= 64) throw;  // a measure-zero event, repeated
            }
        }
    }
    return best;
}

template <class F>
std::size_t generic_rank(const LtiNetwork<F>& net, const std::optional<F>& at,
                         const RankConfig& cfg) {
    auto txs = net.transmitters();
    auto rxs = net.receivers();
    if (txs.size() != 1 || rxs.size() != 1)
        throw DimensionMismatch(
            "generic_rank without terminal ids needs a point-to-point network");
    return generic_rank(net, at, cfg, net.nodes[txs[0]].id, net.nodes[rxs[0]].id);
}

/// Cross-cut channel matrix H_{V,V^c}: rows are the receiver-side port blocks
/// (receivers first, then relays in network order), columns the
/// transmitter-side blocks (transmitters first).
template <class F>
RatMatrix<F> cut_matrix(const LtiNetwork<F>& net, const Cut& cut) {
    std::vector<bool> in_v(net.nodes.size(), false);
    for (const auto& id : cut.v_side) in_v[net.node_index(id)] = true;
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        if (net.nodes[i].kind == NodeKind::transmitter && !in_v[i])
            throw InvalidCut("cut must contain transmitter " + net.nodes[i].id);
        if (net.nodes[i].kind == NodeKind::receiver && in_v[i])
            throw InvalidCut("cut must exclude receiver " + net.nodes[i].id);
    }
    std::vector<std::size_t> col_nodes, row_nodes;
    for (std::size_t i = 0; i < net.nodes.size(); ++i)
        if (net.nodes[i].kind == NodeKind::transmitter) col_nodes.push_back(i);
    for (std::size_t i = 0; i < net.nodes.size(); ++i)
        if (net.nodes[i].kind == NodeKind::receiver) row_nodes.push_back(i);
    for (std::size_t i = 0; i < net.nodes.size(); ++i)
        if (net.nodes[i].kind == NodeKind::relay) {
            if (in_v[i])
                col_nodes.push_back(i);
            else
                row_nodes.push_back(i);
        }
    std::size_t nrows = 0, ncols = 0;
    for (std::size_t i : row_nodes) nrows += net.nodes[i].ports_from_channel;
    for (std::size_t j : col_nodes) ncols += net.nodes[j].ports_to_channel;
    RatMatrix<F> h(nrows, ncols);
    std::size_t r0 = 0;
    for (std::size_t i : row_nodes) {
        std::size_t c0 = 0;
        for (std::size_t j : col_nodes) {
            h.set_block(r0, c0, net.channel(j, i));
            c0 += net.nodes[j].ports_to_channel;
        }
        r0 += net.nodes[i].ports_from_channel;
    }
    return h;
}

/// Cut matrix when only the listed receivers count as receiving terminals
/// (other receivers contribute nothing) and only the listed transmitters as
/// sources; empty source list means all of them.
template <class F>
RatMatrix<F> cut_matrix_for_targets(const LtiNetwork<F>& net, const Cut& cut,
                                    const std::vector<std::size_t>& target_rxs,
                                    const std::vector<std::size_t>& source_txs) {
    std::vector<bool> in_v(net.nodes.size(), false);
    for (const auto& id : cut.v_side) in_v[net.node_index(id)] = true;
    std::vector<std::size_t> col_nodes = source_txs, row_nodes = target_rxs;
    if (col_nodes.empty())
        for (std::size_t i = 0; i < net.nodes.size(); ++i)
            if (net.nodes[i].kind == NodeKind::transmitter) col_nodes.push_back(i);
    for (std::size_t i = 0; i < net.nodes.size(); ++i)
        if (net.nodes[i].kind == NodeKind::relay) {
            if (in_v[i])
                col_nodes.push_back(i);
            else
                row_nodes.push_back(i);
        }
    std::size_t nrows = 0, ncols = 0;
    for (std::size_t i : row_nodes) nrows += net.nodes[i].ports_from_channel;
    for (std::size_t j : col_nodes) ncols += net.nodes[j].ports_to_channel;
    RatMatrix<F> h(nrows, ncols);
    std::size_t r0 = 0;
    for (std::size_t i : row_nodes) {
        std::size_t c0 = 0;
        for (std::size_t j : col_nodes) {
            h.set_block(r0, c0, net.channel(j, i));
            c0 += net.nodes[j].ports_to_channel;
        }
        r0 += net.nodes[i].ports_from_channel;
    }
    return h;
}

template <class F>
RatMatrix<F> cut_matrix_for_target(const LtiNetwork<F>& net, const Cut& cut,
                                   std::size_t target_rx) {
    return cut_matrix_for_targets(net, cut, {target_rx}, {});
}

struct MincutResult {
    std::size_t rank = 0;
    Cut witness;
};

inline constexpr std::size_t kRelayEnumerationCap = 20;

/// Exhaustive minimum of the cut rank over all 2^v transmitter-side relay
/// subsets, evaluated toward the listed receivers (jointly, as an augmented
/// receiver) from the listed sources (all transmitters when empty).
template <class F>
MincutResult mincut_rank_multi(const LtiNetwork<F>& net, const std::optional<F>& at,
                               const std::vector<std::string>& rx_ids,
                               const std::vector<std::string>& tx_ids = {}) {
    const LtiNetwork<F> work = at ? net.at_lambda(*at) : net;
    auto relays = work.relays();
    if (relays.size() > kRelayEnumerationCap)
        throw TooManyRelays("cut enumeration capped at " +
                            std::to_string(kRelayEnumerationCap) + " relays");
    std::vector<std::size_t> rxs, txs;
    for (const auto& id : rx_ids) rxs.push_back(work.node_index(id));
    for (const auto& id : tx_ids) txs.push_back(work.node_index(id));
    MincutResult best;
    bool first = true;
    for (std::size_t mask = 0; mask < (std::size_t(1) << relays.size()); ++mask) {
        Cut cut;
        if (tx_ids.empty())
            for (std::size_t i : work.transmitters()) cut.v_side.push_back(work.nodes[i].id);
        else
            for (const auto& id : tx_ids) cut.v_side.push_back(id);
        for (std::size_t b = 0; b < relays.size(); ++b)
            if (mask & (std::size_t(1) << b)) cut.v_side.push_back(work.nodes[relays[b]].id);
        std::size_t r = mat_rank(cut_matrix_for_targets(work, cut, rxs, txs));
        if (first || r < best.rank) {
            best.rank = r;
            best.witness = cut;
            first = false;
        }
    }
    return best;
}

template <class F>
MincutResult mincut_rank(const LtiNetwork<F>& net, const std::optional<F>& at,
                         const std::string& rx_id) {
    return mincut_rank_multi(net, at, std::vector<std::string>{rx_id});
}

template <class F>
MincutResult mincut_rank(const LtiNetwork<F>& net, const std::optional<F>& at = std::nullopt) {
    auto rxs = net.receivers();
    if (rxs.size() != 1)
        throw DimensionMismatch(
            "mincut_rank without a receiver id needs a single-receiver network");
    return mincut_rank(net, at, net.nodes[rxs[0]].id);
}

/// d.o.f. capacity at a generalized frequency; cross-checked against the cut
/// enumeration per the algebraic mincut-maxflow theorem. A shortfall is
/// retried with a larger sample bound before reporting MincutMismatch.
template <class F>
std::size_t capacity_at(const LtiNetwork<F>& net, const F& lambda, const RankConfig& cfg) {
    auto rxs = net.receivers();
    auto txs = net.transmitters();
    if (txs.size() != 1 || rxs.size() != 1)
        throw DimensionMismatch("capacity_at needs a point-to-point network");
    const std::string tx_id = net.nodes[txs[0]].id;
    const std::string rx_id = net.nodes[rxs[0]].id;
    if (net.has_pole_at(lambda)) throw PoleAtLambda("channel entries have a pole at lambda");
    std::size_t mc = mincut_rank(net, std::optional<F>(lambda), rx_id).rank;
    RankConfig c = cfg;
    for (int escalation = 0; escalation < 3; ++escalation) {
        std::size_t g = generic_rank(net, std::optional<F>(lambda), c, tx_id, rx_id);
        if (g == mc) return g;
        c.sample_bound *= 16;
        c.seed += 1;
    }
    throw MincutMismatch("sampled transfer rank never met the mincut rank");
}

}  // namespace ltiflow
