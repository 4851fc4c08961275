#pragma once

#include <utility>
#include <vector>

#include "ltiflow/network.hpp"

namespace ltiflow {

/// Constant state-space realization x[n+1] = A x + B u, y = C x + D u.
template <class F>
struct StateSpace {
    Matrix<F> a, b, c, d;

    std::size_t order() const { return a.rows(); }
    std::size_t inputs() const { return d.cols(); }
    std::size_t outputs() const { return d.rows(); }

    /// Exact transfer matrix C (zI - A)^{-1} B + D.
    RatMatrix<F> transfer() const {
        RatMatrix<F> dd = to_ratfn_matrix(d);
        if (order() == 0) return dd;
        const std::size_t n = order();
        RatMatrix<F> zia(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                zia(i, j) = RatFn<F>(Poly<F>(-a(i, j)));
                if (i == j) zia(i, j) += RatFn<F>::z();
            }
        return to_ratfn_matrix(c) * mat_inverse(zia) * to_ratfn_matrix(b) + dd;
    }
};

/// Controllable-canonical realization, one companion block per input column
/// over that column's common denominator. Every entry must be causal.
template <class F>
StateSpace<F> realize_channel(const RatMatrix<F>& h) {
    const std::size_t p = h.rows(), q = h.cols();
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < q; ++j)
            if (!h(i, j).is_causal())
                throw NonCausalEntry("channel entry (" + std::to_string(i) + "," +
                                     std::to_string(j) + ") is not causal");
    std::vector<Matrix<F>> blocks_a, blocks_b;
    std::vector<Matrix<F>> blocks_c;  // p x n_j per column
    StateSpace<F> ss;
    ss.d = Matrix<F>(p, q);
    std::size_t total = 0;
    std::vector<std::size_t> offs;
    std::vector<Matrix<F>> col_a, col_c;
    for (std::size_t j = 0; j < q; ++j) {
        Poly<F> den{FieldOps<F>::from_int(1)};
        for (std::size_t i = 0; i < p; ++i) den = lcm(den, h(i, j).den());
        den = den.monic();
        const std::size_t n = static_cast<std::size_t>(den.deg());
        Matrix<F> aj(n, n), cj(p, n);
        for (std::size_t k = 0; k + 1 < n; ++k) aj(k, k + 1) = FieldOps<F>::from_int(1);
        for (std::size_t k = 0; k < n; ++k) aj(n - 1, k) = -den[k];
        for (std::size_t i = 0; i < p; ++i) {
            Poly<F> num = h(i, j).num() * (den / h(i, j).den());
            auto [quot, rem] = divmod(num, den);
            if (quot.deg() > 0) throw NonCausalEntry("entry has improper part");
            ss.d(i, j) = quot.is_zero() ? FieldOps<F>::from_int(0) : quot.constant_term();
            for (std::size_t k = 0; k < n; ++k) cj(i, k) = rem[k];
        }
        offs.push_back(total);
        total += n;
        col_a.push_back(std::move(aj));
        col_c.push_back(std::move(cj));
    }
    ss.a = Matrix<F>(total, total);
    ss.b = Matrix<F>(total, q);
    ss.c = Matrix<F>(p, total);
    for (std::size_t j = 0; j < q; ++j) {
        const std::size_t n = col_a[j].rows();
        if (n == 0) continue;
        ss.a.set_block(offs[j], offs[j], col_a[j]);
        ss.b(offs[j] + n - 1, j) = FieldOps<F>::from_int(1);
        ss.c.set_block(0, offs[j], col_c[j]);
    }
    return ss;
}

/// Realization of every channel block between the nodes of a network:
/// x[n+1] = A x + sum_i B_i u_i and y_j = C_j x + sum_i D[j][i] u_i, where
/// u_i is node i's signal into the channels and y_j node j's signal out of
/// them.
template <class F>
struct NodeGrid {
    Matrix<F> a;
    std::vector<Matrix<F>> b;                // per node, states x d_{i,in}
    std::vector<Matrix<F>> c;                // per node, d_{j,out} x states
    std::vector<std::vector<Matrix<F>>> d;   // d[to][from]

    std::size_t order() const { return a.rows(); }
    std::size_t node_count() const { return b.size(); }
};

template <class F>
NodeGrid<F> realize_node_grid(const LtiNetwork<F>& net) {
    const std::size_t nn = net.nodes.size();
    std::vector<StateSpace<F>> pieces;
    std::vector<std::pair<std::size_t, std::size_t>> keys;
    std::size_t total = 0;
    for (const auto& [key, h] : net.channels) {
        auto ss = realize_channel(h);
        total += ss.order();
        pieces.push_back(std::move(ss));
        keys.push_back(key);
    }
    NodeGrid<F> g;
    g.a = Matrix<F>(total, total);
    for (std::size_t i = 0; i < nn; ++i) {
        g.b.emplace_back(total, net.nodes[i].ports_to_channel);
        g.c.emplace_back(net.nodes[i].ports_from_channel, total);
    }
    g.d.assign(nn, std::vector<Matrix<F>>());
    for (std::size_t j = 0; j < nn; ++j)
        for (std::size_t i = 0; i < nn; ++i)
            g.d[j].emplace_back(net.nodes[j].ports_from_channel, net.nodes[i].ports_to_channel);
    std::size_t off = 0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const auto& [from, to] = keys[k];
        const auto& ss = pieces[k];
        g.a.set_block(off, off, ss.a);
        g.b[from].set_block(off, 0, ss.b);
        g.c[to].set_block(0, off, ss.c);
        g.d[to][from] += ss.d;
        off += ss.order();
    }
    return g;
}

/// Closes u_k = K_k y_k for the selected nodes; the result is a grid over the
/// remaining nodes with the loop absorbed into the state matrix. Throws
/// LoopSingular when the static feedthrough loop is not well posed.
template <class F>
NodeGrid<F> close_nodes(const NodeGrid<F>& g,
                        const std::vector<std::pair<std::size_t, Matrix<F>>>& static_gains,
                        const std::vector<std::size_t>& keep) {
    std::vector<std::size_t> closed;
    std::vector<Matrix<F>> gains;
    for (const auto& [idx, k] : static_gains) {
        closed.push_back(idx);
        gains.push_back(k);
    }
    // stacked closed-side blocks
    std::size_t uy = 0, yy = 0;
    for (std::size_t t = 0; t < closed.size(); ++t) {
        uy += g.b[closed[t]].cols();
        yy += g.c[closed[t]].rows();
    }
    Matrix<F> bigk(uy, yy);
    {
        std::size_t ro = 0, co = 0;
        for (std::size_t t = 0; t < closed.size(); ++t) {
            bigk.set_block(ro, co, gains[t]);
            ro += gains[t].rows();
            co += gains[t].cols();
        }
    }
    Matrix<F> bs(g.order(), uy), cs(yy, g.order());
    Matrix<F> dss(yy, uy);
    {
        std::size_t co = 0;
        for (std::size_t t = 0; t < closed.size(); ++t) {
            bs.set_block(0, co, g.b[closed[t]]);
            co += g.b[closed[t]].cols();
        }
        std::size_t ro = 0;
        for (std::size_t t = 0; t < closed.size(); ++t) {
            cs.set_block(ro, 0, g.c[closed[t]]);
            std::size_t co2 = 0;
            for (std::size_t s = 0; s < closed.size(); ++s) {
                dss.set_block(ro, co2, g.d[closed[t]][closed[s]]);
                co2 += g.b[closed[s]].cols();
            }
            ro += g.c[closed[t]].rows();
        }
    }
    // u_S = (I - K D_SS)^{-1} K (C_S x + D_SR u_R)
    Matrix<F> loop = Matrix<F>::identity(uy) - bigk * dss;
    Matrix<F> w;
    try {
        w = to_const_matrix(mat_inverse(to_ratfn_matrix(loop)));
    } catch (const SingularMatrix&) {
        throw LoopSingular("static gain loop is not well posed");
    }
    Matrix<F> wk = w * bigk;

    NodeGrid<F> out;
    out.a = g.a + bs * wk * cs;
    for (std::size_t r : keep) {
        // D_SR stacked for this input
        Matrix<F> dsr(yy, g.b[r].cols());
        std::size_t ro = 0;
        for (std::size_t t = 0; t < closed.size(); ++t) {
            dsr.set_block(ro, 0, g.d[closed[t]][r]);
            ro += g.c[closed[t]].rows();
        }
        out.b.push_back(g.b[r] + bs * wk * dsr);
        // D_RS stacked for this output
        Matrix<F> drs(g.c[r].rows(), uy);
        std::size_t co = 0;
        for (std::size_t t = 0; t < closed.size(); ++t) {
            drs.set_block(0, co, g.d[r][closed[t]]);
            co += g.b[closed[t]].cols();
        }
        out.c.push_back(g.c[r] + drs * wk * cs);
    }
    out.d.assign(keep.size(), std::vector<Matrix<F>>());
    for (std::size_t rj = 0; rj < keep.size(); ++rj)
        for (std::size_t ri = 0; ri < keep.size(); ++ri) {
            Matrix<F> dsr(yy, g.b[keep[ri]].cols());
            std::size_t ro = 0;
            for (std::size_t t = 0; t < closed.size(); ++t) {
                dsr.set_block(ro, 0, g.d[closed[t]][keep[ri]]);
                ro += g.c[closed[t]].rows();
            }
            Matrix<F> drs(g.c[keep[rj]].rows(), uy);
            std::size_t co = 0;
            for (std::size_t t = 0; t < closed.size(); ++t) {
                drs.set_block(0, co, g.d[keep[rj]][closed[t]]);
                co += g.b[closed[t]].cols();
            }
            out.d[rj].push_back(g.d[keep[rj]][keep[ri]] + drs * wk * dsr);
        }
    return out;
}

/// Single-input single-output reduction of a closed grid: the state matrix of
/// the network once every relay is closed with its static gain.
template <class F>
Matrix<F> closed_network_state_matrix(const LtiNetwork<F>& net, const GainAssignment<F>& gains) {
    auto g = realize_node_grid(net);
    std::vector<std::pair<std::size_t, Matrix<F>>> statics;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        if (net.nodes[i].kind == NodeKind::relay)
            statics.emplace_back(i, to_const_matrix(gains.relay.at(net.nodes[i].id)));
        else
            keep.push_back(i);
    }
    return close_nodes(g, statics, keep).a;
}

}  // namespace ltiflow
