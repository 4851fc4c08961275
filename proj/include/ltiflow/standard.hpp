#pragma once

#include <string>
#include <vector>

#include "ltiflow/network.hpp"

namespace ltiflow {

/// The eight-tuple (A; B_i, B_i'; C_i, C_i'; D, D'; S, S') of the standard
/// single-hop LTI network with the inner S-loop. The loop dimension may be
/// zero, in which case only A + sum B_i K_i C_i remains.
template <class F>
struct StandardNetwork {
    RatMatrix<F> a;                      // n_y x n_u
    std::vector<RatMatrix<F>> b;         // n_y x q_i
    std::vector<RatMatrix<F>> b_prime;   // n_s x q_i
    std::vector<RatMatrix<F>> c;         // r_i x n_u
    std::vector<RatMatrix<F>> c_prime;   // r_i x n_s
    RatMatrix<F> d;        // n_y x n_s
    RatMatrix<F> d_prime;  // n_s x n_u
    RatMatrix<F> s;        // n_s x n_s
    RatMatrix<F> s_prime;  // n_s x n_s

    std::size_t relay_count() const { return b.size(); }
    std::size_t loop_dim() const { return s.rows(); }
    std::size_t in_dim() const { return a.cols(); }
    std::size_t out_dim() const { return a.rows(); }
};

/// Closed-form transfer matrix from the transmitter to the receiver,
///   G = A + sum B_i K_i C_i
///     + (D + sum B_i K_i C_i') (S^{-1} - (S' + sum B_i' K_i C_i'))^{-1}
///       (D' + sum B_i' K_i C_i).
template <class F>
RatMatrix<F> std_transfer(const StandardNetwork<F>& sn,
                          const std::vector<RatMatrix<F>>& gains) {
    if (gains.size() != sn.relay_count())
        throw DimensionMismatch("standard network needs one gain per relay");
    RatMatrix<F> g = sn.a;
    for (std::size_t i = 0; i < gains.size(); ++i) g += sn.b[i] * gains[i] * sn.c[i];
    if (sn.loop_dim() == 0) return g;

    RatMatrix<F> s_inv;
    try {
        s_inv = mat_inverse(sn.s);
    } catch (const SingularMatrix&) {
        throw InnerLoopSingular("S block is singular");
    }
    RatMatrix<F> mid = s_inv - sn.s_prime;
    RatMatrix<F> left = sn.d, right = sn.d_prime;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        mid -= sn.b_prime[i] * gains[i] * sn.c_prime[i];
        left += sn.b[i] * gains[i] * sn.c_prime[i];
        right += sn.b_prime[i] * gains[i] * sn.c[i];
    }
    RatMatrix<F> mid_inv;
    try {
        mid_inv = mat_inverse(mid);
    } catch (const SingularMatrix&) {
        throw InnerLoopSingular();
    }
    return g + left * mid_inv * right;
}

/// Channel matrices of the standard network, obtained by collapsing the
/// S-loop: H_{tx,rx} = A + D (S^{-1}-S')^{-1} D' and so on.
template <class F>
struct StandardChannels {
    RatMatrix<F> tx_rx;
    std::vector<RatMatrix<F>> tx_i;               // per relay
    std::vector<RatMatrix<F>> i_rx;               // per relay
    std::vector<std::vector<RatMatrix<F>>> i_j;   // [from][to]
};

template <class F>
StandardChannels<F> std_channels(const StandardNetwork<F>& sn) {
    StandardChannels<F> ch;
    const std::size_t v = sn.relay_count();
    if (sn.loop_dim() == 0) {
        ch.tx_rx = sn.a;
        for (std::size_t i = 0; i < v; ++i) {
            ch.tx_i.push_back(sn.c[i]);
            ch.i_rx.push_back(sn.b[i]);
        }
        ch.i_j.assign(v, std::vector<RatMatrix<F>>());
        for (std::size_t i = 0; i < v; ++i)
            for (std::size_t j = 0; j < v; ++j)
                ch.i_j[i].push_back(RatMatrix<F>::zero(sn.c[j].rows(), sn.b[i].cols()));
        return ch;
    }
    RatMatrix<F> core;
    try {
        core = mat_inverse(RatMatrix<F>(mat_inverse(sn.s) - sn.s_prime));
    } catch (const SingularMatrix&) {
        throw InnerLoopSingular("S^{-1} - S' is singular");
    }
    ch.tx_rx = sn.a + sn.d * core * sn.d_prime;
    for (std::size_t i = 0; i < v; ++i) {
        ch.tx_i.push_back(sn.c[i] + sn.c_prime[i] * core * sn.d_prime);
        ch.i_rx.push_back(sn.b[i] + sn.d * core * sn.b_prime[i]);
    }
    ch.i_j.assign(v, std::vector<RatMatrix<F>>());
    for (std::size_t i = 0; i < v; ++i)
        for (std::size_t j = 0; j < v; ++j)
            ch.i_j[i].push_back(sn.c_prime[j] * core * sn.b_prime[i]);
    return ch;
}

/// Materializes the standard network as an LtiNetwork with node ids
/// "tx", "K1".."Kv", "rx".
template <class F>
LtiNetwork<F> to_network(const StandardNetwork<F>& sn) {
    auto ch = std_channels(sn);
    const std::size_t v = sn.relay_count();
    LtiNetwork<F> net;
    net.nodes.push_back({"tx", sn.in_dim(), 0, NodeKind::transmitter});
    for (std::size_t i = 0; i < v; ++i)
        net.nodes.push_back(
            {"K" + std::to_string(i + 1), sn.b[i].cols(), sn.c[i].rows(), NodeKind::relay});
    net.nodes.push_back({"rx", 0, sn.out_dim(), NodeKind::receiver});
    auto relay_id = [](std::size_t i) { return "K" + std::to_string(i + 1); };
    if (!ch.tx_rx.is_zero()) net.set_channel("tx", "rx", ch.tx_rx);
    for (std::size_t i = 0; i < v; ++i) {
        if (!ch.tx_i[i].is_zero()) net.set_channel("tx", relay_id(i), ch.tx_i[i]);
        if (!ch.i_rx[i].is_zero()) net.set_channel(relay_id(i), "rx", ch.i_rx[i]);
        for (std::size_t j = 0; j < v; ++j)
            if (!ch.i_j[i][j].is_zero()) net.set_channel(relay_id(i), relay_id(j), ch.i_j[i][j]);
    }
    validate(net);
    return net;
}

}  // namespace ltiflow
