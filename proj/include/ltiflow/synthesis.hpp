#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltiflow/control.hpp"

namespace ltiflow {

/// Appendix-style realization of a control problem as one decentralized
/// system: plant states first, channel states after, one controller per
/// observer, relay and controller node.
template <class F>
struct ClosedRealization {
    DecSystem<F> sys;
    std::size_t plant_dim = 0;
    std::vector<std::size_t> observer_controllers;
    std::vector<std::size_t> relay_controllers;
    std::vector<std::size_t> controller_controllers;
};

template <class F>
ClosedRealization<F> realize_closed_network(const ControlProblem<F>& prob) {
    validate_problem(prob);
    const auto& net = prob.net;
    auto grid = realize_node_grid(net);
    const std::size_t n_ch = grid.order();

    std::size_t m = 0;
    std::vector<std::size_t> plant_off;
    for (const auto& p : prob.plants) {
        plant_off.push_back(m);
        m += p.a.rows();
    }
    ClosedRealization<F> out;
    out.plant_dim = m;
    const std::size_t n = m + n_ch;
    DecSystem<F>& sys = out.sys;
    sys.a = Matrix<F>(n, n);
    for (std::size_t k = 0; k < prob.plants.size(); ++k)
        sys.a.set_block(plant_off[k], plant_off[k], prob.plants[k].a);
    sys.a.set_block(m, m, grid.a);

    struct Role {
        std::size_t node;   // network node index
        int kind;           // 0 observer, 1 relay, 2 controller
        std::size_t plant;  // attached plant (or input matrix) index
    };
    std::vector<Role> roles;
    for (std::size_t k = 0; k < prob.observer_nodes.size(); ++k)
        roles.push_back({net.node_index(prob.observer_nodes[k]), 0, k});
    for (std::size_t r : net.relays()) roles.push_back({r, 1, 0});
    for (std::size_t k = 0; k < prob.controller_nodes.size(); ++k)
        roles.push_back({net.node_index(prob.controller_nodes[k]), 2, k});

    auto plant_input = [&](std::size_t k) -> const Matrix<F>& {
        if (prob.mode == ProblemMode::multicast) return prob.plants[0].b[k];
        return prob.plants[k].b[0];
    };

    for (std::size_t t = 0; t < roles.size(); ++t) {
        const Role& role = roles[t];
        if (role.kind == 0) out.observer_controllers.push_back(t);
        if (role.kind == 1) out.relay_controllers.push_back(t);
        if (role.kind == 2) out.controller_controllers.push_back(t);

        if (role.kind == 2) {
            // plant input; channel output observation
            const Matrix<F>& bk = plant_input(role.plant);
            Matrix<F> b(n, bk.cols());
            std::size_t off =
                (prob.mode == ProblemMode::multicast) ? 0 : plant_off[role.plant];
            b.set_block(off, 0, bk);
            sys.b.push_back(std::move(b));
            Matrix<F> c(grid.c[role.node].rows(), n);
            c.set_block(0, m, grid.c[role.node]);
            sys.c.push_back(std::move(c));
        } else if (role.kind == 0) {
            // channel input; plant output observation
            Matrix<F> b(n, grid.b[role.node].cols());
            b.set_block(m, 0, grid.b[role.node]);
            sys.b.push_back(std::move(b));
            if (prob.mode == ProblemMode::broadcast) {
                // the single observer sees both plant outputs, stacked
                std::size_t rows = prob.plants[0].c.rows() + prob.plants[1].c.rows();
                Matrix<F> c(rows, n);
                c.set_block(0, plant_off[0], prob.plants[0].c);
                c.set_block(prob.plants[0].c.rows(), plant_off[1], prob.plants[1].c);
                sys.c.push_back(std::move(c));
            } else {
                const auto& cp = prob.plants[role.plant].c;
                Matrix<F> c(cp.rows(), n);
                c.set_block(0, plant_off[role.plant], cp);
                sys.c.push_back(std::move(c));
            }
        } else {
            Matrix<F> b(n, grid.b[role.node].cols());
            b.set_block(m, 0, grid.b[role.node]);
            sys.b.push_back(std::move(b));
            Matrix<F> c(grid.c[role.node].rows(), n);
            c.set_block(0, m, grid.c[role.node]);
            sys.c.push_back(std::move(c));
        }
    }

    std::vector<std::vector<Matrix<F>>> d(roles.size());
    for (std::size_t i = 0; i < roles.size(); ++i)
        for (std::size_t j = 0; j < roles.size(); ++j) {
            Matrix<F> dij(sys.c[i].rows(), sys.b[j].cols());
            bool i_channel_out = roles[i].kind != 0;  // observers watch the plant
            bool j_channel_in = roles[j].kind != 2;   // controllers drive the plant
            if (i_channel_out && j_channel_in) dij = grid.d[roles[i].node][roles[j].node];
            d[i].push_back(std::move(dij));
        }
    sys.d = std::move(d);
    validate(sys);
    return out;
}

/// A complete relay/observer/controller design with its closed-loop
/// realization and exact stability certificate.
template <class F>
struct SynthesisDesign {
    GainAssignment<F> relay_gains;
    RatMatrix<F> k_ob;                        // memoryless for ptop, rational for broadcast
    std::vector<Matrix<F>> precoders;         // broadcast: K_cn1', K_cn2'
    std::vector<StateSpace<F>> compensators;  // one per controller node
    StateSpace<F> closed_loop;                // input: disturbance w, output: plant states
    std::size_t plant_dim = 0;
    std::vector<std::size_t> plant_dims;      // per plant
    Poly<F> certificate;
    bool stable = false;
    F epsilon = FieldOps<F>::from_int(1);
    std::size_t delay = 0;                    // broadcast causality delay d
};

namespace detail {

/// Physical closed loop: plants + dynamic observer gain + relay-closed
/// network + constant precoders + per-controller compensators.
/// States: [x_plants; x_obgain; x_channels; compensators...].
template <class F>
StateSpace<F> assemble_closed_loop(const ControlProblem<F>& prob,
                                   const GainAssignment<F>& relay_gains,
                                   const StateSpace<F>& obgain,
                                   const std::vector<Matrix<F>>& precoders,
                                   const std::vector<StateSpace<F>>& compensators) {
    const auto& net = prob.net;
    auto grid = realize_node_grid(net);
    std::vector<std::pair<std::size_t, Matrix<F>>> statics;
    for (std::size_t r : net.relays())
        statics.emplace_back(r, to_const_matrix(relay_gains.relay.at(net.nodes[r].id)));
    std::vector<std::size_t> keep;
    keep.push_back(net.node_index(prob.observer_nodes[0]));
    for (const auto& id : prob.controller_nodes) keep.push_back(net.node_index(id));
    auto closed = close_nodes(grid, statics, keep);
    // closed grid positions: 0 = observer, 1.. = controllers

    std::size_t m = 0;
    std::vector<std::size_t> plant_off;
    for (const auto& p : prob.plants) {
        plant_off.push_back(m);
        m += p.a.rows();
    }
    const std::size_t nk = obgain.order();
    const std::size_t nn = closed.order();
    std::vector<std::size_t> comp_off;
    std::size_t ncomp = 0;
    for (const auto& cpn : compensators) {
        comp_off.push_back(m + nk + nn + ncomp);
        ncomp += cpn.order();
    }
    const std::size_t total = m + nk + nn + ncomp;

    // stacked plant output y_p = C_py x_p
    std::size_t ry = 0;
    for (const auto& p : prob.plants) ry += p.c.rows();
    Matrix<F> c_py(ry, m);
    {
        std::size_t ro = 0;
        for (std::size_t k = 0; k < prob.plants.size(); ++k) {
            c_py.set_block(ro, plant_off[k], prob.plants[k].c);
            ro += prob.plants[k].c.rows();
        }
    }

    StateSpace<F> cl;
    cl.a = Matrix<F>(total, total);
    cl.b = Matrix<F>(total, m);  // disturbance w, one channel per plant state
    cl.c = Matrix<F>(m, total);  // expose the plant states
    cl.d = Matrix<F>(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        cl.b(i, i) = FieldOps<F>::from_int(1);
        cl.c(i, i) = FieldOps<F>::from_int(1);
    }

    // plant rows: x_p+ = A_p x_p + sum_k B_pk u_k with u_k = C_ck xhat_k
    for (std::size_t k = 0; k < prob.plants.size(); ++k)
        cl.a.set_block(plant_off[k], plant_off[k], prob.plants[k].a);
    for (std::size_t k = 0; k < compensators.size(); ++k) {
        const Matrix<F>& bk = (prob.mode == ProblemMode::multicast) ? prob.plants[0].b[k]
                                                                    : prob.plants[k].b[0];
        std::size_t off = (prob.mode == ProblemMode::multicast) ? 0 : plant_off[k];
        cl.a.set_block(off, comp_off[k], bk * compensators[k].c);
    }

    // observer gain rows: x_K+ = A_K x_K + B_K y_p
    if (nk > 0) {
        cl.a.set_block(m, m, obgain.a);
        cl.a.set_block(m, 0, obgain.b * c_py);
    }

    // u_ob = C_K x_K + D_K y_p
    // network rows: x_N+ = A_N x_N + B_N u_ob
    if (nn > 0) {
        cl.a.set_block(m + nk, m + nk, closed.a);
        cl.a.set_block(m + nk, 0, closed.b[0] * obgain.d * c_py);
        if (nk > 0) cl.a.set_block(m + nk, m, closed.b[0] * obgain.c);
    }

    // compensator rows: xhat_k+ = A_ck xhat_k + B_ck K'_k y_cnk,
    // y_cnk = C_Nk x_N + D_Nk u_ob
    for (std::size_t k = 0; k < compensators.size(); ++k) {
        const auto& cpn = compensators[k];
        if (cpn.order() == 0) continue;
        cl.a.set_block(comp_off[k], comp_off[k], cpn.a);
        Matrix<F> gain_in = cpn.b * precoders[k];
        if (nn > 0) cl.a.set_block(comp_off[k], m + nk, gain_in * closed.c[1 + k]);
        Matrix<F> dnk = closed.d[1 + k][0];
        cl.a.set_block(comp_off[k], 0, gain_in * dnk * obgain.d * c_py);
        if (nk > 0) cl.a.set_block(comp_off[k], m, gain_in * dnk * obgain.c);
    }
    return cl;
}

template <class F>
GainAssignment<F> sample_bounded_gains(const LtiNetwork<F>& net, Sampler& rng, long bound,
                                       const F& eps) {
    GainAssignment<F> g;
    F scale = eps / F(FieldOps<F>::from_int(bound));
    for (std::size_t r : net.relays()) {
        const auto& n = net.nodes[r];
        g.relay[n.id] =
            rng.template scaled_int_matrix<F>(n.ports_to_channel, n.ports_from_channel, bound,
                                              scale);
    }
    return g;
}

template <class F>
bool realized_network_stable(const LtiNetwork<F>& net, const GainAssignment<F>& gains) {
    try {
        auto a = closed_network_state_matrix(net, gains);
        return a.rows() == 0 || strictly_stable(char_poly_const(a));
    } catch (const LoopSingular&) {
        return false;
    }
}

}  // namespace detail

/// Point-to-point synthesis per the constructive proof: relay gains inside
/// the Gershgorin margin carrying m_lambda degrees of freedom at every
/// unstable frequency, a memoryless observer gain connecting the unstable
/// corner states to the network, and a deadbeat observer-based compensator on
/// the augmented realization.
template <class F>
SynthesisDesign<F> synthesize_ptop(const ControlProblem<F>& prob, const RankConfig& cfg,
                                   unsigned budget = 32) {
    auto report = stabilizability_ptop(prob);
    if (!report.stabilizable)
        throw NotStabilizable("the point-to-point stabilizability conditions fail");
    const auto& plant = prob.plants[0];
    if (!is_jordan_form(plant.a))
        throw NotJordanForm("synthesis expects the plant in Jordan form");

    auto unstables = unstable_eigenvalues(plant.a);
    const std::string obs = prob.observer_nodes[0];
    const std::string cn = prob.controller_nodes[0];
    const std::size_t obs_node = prob.net.node_index(obs);
    const std::size_t cn_node = prob.net.node_index(cn);
    const std::size_t q_ob = prob.net.nodes[obs_node].ports_to_channel;
    const std::size_t r_ob = plant.c.rows();

    SynthesisDesign<F> design;
    design.epsilon = gershgorin_epsilon(prob, cfg.seed);
    design.plant_dim = plant.a.rows();
    design.plant_dims = {plant.a.rows()};

    std::vector<PartitionedSystem<F>> parts;
    for (const auto& lambda : unstables)
        parts.push_back(partition_jordan(plant.a, lambda, {plant.b[0]}, {plant.c}));

    Sampler rng(cfg.seed);
    for (unsigned attempt = 0; attempt < budget; ++attempt) {
        // (2-a) relay design inside the gain margin
        auto gains =
            detail::sample_bounded_gains(prob.net, rng, cfg.sample_bound, design.epsilon);
        bool ranks_ok = true;
        try {
            for (std::size_t li = 0; li < unstables.size() && ranks_ok; ++li) {
                auto at_l = prob.net.at_lambda(unstables[li]);
                std::size_t ml = parts[li].indexing.m_lambda;
                ranks_ok = transfer_rank(at_l, gains, obs, cn) >= ml;
            }
        } catch (const LoopSingular&) {
            ranks_ok = false;
        }
        if (!ranks_ok || !detail::realized_network_stable(prob.net, gains)) continue;

        // (2-b) observer design
        RatMatrix<F> k_ob;
        bool ob_ok = false;
        for (unsigned ob_try = 0; ob_try < budget && !ob_ok; ++ob_try) {
            k_ob = rng.template int_matrix<F>(q_ob, r_ob, cfg.sample_bound);
            ob_ok = true;
            for (std::size_t li = 0; li < unstables.size() && ob_ok; ++li) {
                auto at_l = prob.net.at_lambda(unstables[li]);
                auto g = transfer_matrix(at_l, gains, obs, cn);
                auto c1 = to_ratfn_matrix(parts[li].c1[0]);
                ob_ok = mat_rank(RatMatrix<F>(g * k_ob * c1)) >= parts[li].indexing.m_lambda;
            }
        }
        if (!ob_ok) continue;

        // (2-c) controller design on the augmented realization
        auto grid = realize_node_grid(prob.net);
        std::vector<std::pair<std::size_t, Matrix<F>>> statics;
        for (std::size_t r : prob.net.relays())
            statics.emplace_back(r, to_const_matrix(gains.relay.at(prob.net.nodes[r].id)));
        auto closed = close_nodes(grid, statics, {obs_node, cn_node});
        Matrix<F> k_ob_const = to_const_matrix(k_ob);
        const std::size_t m = plant.a.rows(), nf = closed.order();
        Matrix<F> abar(m + nf, m + nf), bbar(m + nf, plant.b[0].cols());
        abar.set_block(0, 0, plant.a);
        abar.set_block(m, m, closed.a);
        abar.set_block(m, 0, closed.b[0] * k_ob_const * plant.c);
        bbar.set_block(0, 0, plant.b[0]);
        Matrix<F> cbar =
            Matrix<F>::hstack(Matrix<F>(closed.d[1][0] * k_ob_const * plant.c), closed.c[1]);

        Matrix<F> k_fb, l_gain;
        try {
            k_fb = deadbeat_feedback(abar, bbar, rng);
            l_gain = deadbeat_observer(abar, cbar, rng);
        } catch (const NotStabilizable&) {
            continue;
        }
        StateSpace<F> comp;
        comp.a = abar + bbar * k_fb - l_gain * cbar;
        comp.b = l_gain;
        comp.c = k_fb;
        comp.d = Matrix<F>(k_fb.rows(), cbar.rows());

        StateSpace<F> obgain_ss;  // constant observer gain
        obgain_ss.a = Matrix<F>(0, 0);
        obgain_ss.b = Matrix<F>(0, r_ob);
        obgain_ss.c = Matrix<F>(q_ob, 0);
        obgain_ss.d = k_ob_const;
        std::vector<Matrix<F>> precoders{
            Matrix<F>::identity(prob.net.nodes[cn_node].ports_from_channel)};
        auto cl = detail::assemble_closed_loop(prob, gains, obgain_ss, precoders, {comp});
        Poly<F> cert = char_poly_const(cl.a);
        if (!strictly_stable(cert)) continue;

        design.relay_gains = gains;
        design.k_ob = k_ob;
        design.precoders = precoders;
        design.compensators = {comp};
        design.closed_loop = cl;
        design.certificate = cert;
        design.stable = true;
        return design;
    }
    throw SynthesisBudgetExceeded("point-to-point synthesis ran out of attempts");
}

/// Cross-disturbance transfer check: the symbolic transfer from w_j to the
/// other plant's states must vanish identically.
template <class F>
bool cross_transfers_zero(const SynthesisDesign<F>& design) {
    if (design.plant_dims.size() != 2) return true;
    const std::size_t m1 = design.plant_dims[0], m2 = design.plant_dims[1];
    const auto& cl = design.closed_loop;
    const std::size_t n = cl.order();
    RatMatrix<F> zia(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            zia(i, j) = RatFn<F>(Poly<F>(-cl.a(i, j)));
            if (i == j) zia(i, j) += RatFn<F>::z();
        }
    auto t = mat_inverse(zia) * to_ratfn_matrix(cl.b);
    for (std::size_t i = 0; i < m1; ++i)
        for (std::size_t j = m1; j < m1 + m2; ++j)
            if (!t(i, j).is_zero()) return false;
    for (std::size_t i = m1; i < m1 + m2; ++i)
        for (std::size_t j = 0; j < m1; ++j)
            if (!t(i, j).is_zero()) return false;
    return true;
}

/// Broadcast synthesis per the constructive proof: relay gains meet the three
/// rank targets, sampled precoders square the stacked transfer, the adjugate
/// trick z^{-d} det(G') G'^{-1} orthogonalizes the two observation paths, and
/// each controller runs a deadbeat compensator on its own decoupled path.
template <class F>
SynthesisDesign<F> synthesize_broadcast(const ControlProblem<F>& prob, const RankConfig& cfg,
                                        unsigned budget = 32) {
    auto rep = stabilizability_broadcast(prob);
    if (!rep.sufficient)
        throw NotIndependentlyStabilizable("the broadcast sufficiency conditions fail");
    const auto& p1 = prob.plants[0];
    const auto& p2 = prob.plants[1];
    if (!is_jordan_form(p1.a) || !is_jordan_form(p2.a))
        throw NotJordanForm("synthesis expects the plants in Jordan form");

    auto ev1 = unstable_eigenvalues(p1.a);
    auto ev2 = unstable_eigenvalues(p2.a);
    std::vector<F> all = ev1;
    for (const auto& l : ev2) {
        bool seen = false;
        for (const auto& o : all) seen = seen || o == l;
        if (!seen) all.push_back(l);
    }
    const std::size_t m1max = rep.m1_max, m2max = rep.m2_max;
    const std::string obs = prob.observer_nodes[0];
    const std::string cn1 = prob.controller_nodes[0];
    const std::string cn2 = prob.controller_nodes[1];
    const std::size_t obs_node = prob.net.node_index(obs);
    const std::size_t q_ob = prob.net.nodes[obs_node].ports_to_channel;
    const std::size_t r_cn1 =
        prob.net.nodes[prob.net.node_index(cn1)].ports_from_channel;
    const std::size_t r_cn2 =
        prob.net.nodes[prob.net.node_index(cn2)].ports_from_channel;

    SynthesisDesign<F> design;
    design.epsilon = gershgorin_epsilon(prob, cfg.seed);
    design.plant_dim = p1.a.rows() + p2.a.rows();
    design.plant_dims = {p1.a.rows(), p2.a.rows()};

    Sampler rng(cfg.seed);
    for (unsigned attempt = 0; attempt < budget; ++attempt) {
        // (2-a) relay gains meeting the three rank targets
        auto gains =
            detail::sample_bounded_gains(prob.net, rng, cfg.sample_bound, design.epsilon);
        bool ok = detail::realized_network_stable(prob.net, gains);
        try {
            for (std::size_t li = 0; li < all.size() && ok; ++li) {
                auto at_l = prob.net.at_lambda(all[li]);
                auto g1 = transfer_matrix(at_l, gains, obs, cn1);
                auto g2 = transfer_matrix(at_l, gains, obs, cn2);
                ok = mat_rank(g1) >= m1max && mat_rank(g2) >= m2max &&
                     mat_rank(RatMatrix<F>::vstack(g1, g2)) >= m1max + m2max;
            }
        } catch (const LoopSingular&) {
            ok = false;
        }
        if (!ok) continue;

        // symbolic stacked transfer with these gains
        auto g1z = transfer_matrix(prob.net, gains, obs, cn1);
        auto g2z = transfer_matrix(prob.net, gains, obs, cn2);
        auto g12 = RatMatrix<F>::vstack(g1z, g2z);

        // (2-b) precoders squaring the stacked transfer
        Matrix<F> kc1, kc2, kob1;
        RatMatrix<F> gp;
        bool square_ok = false;
        for (unsigned t = 0; t < budget && !square_ok; ++t) {
            kc1 = to_const_matrix(rng.template int_matrix<F>(m1max, r_cn1, cfg.sample_bound));
            kc2 = to_const_matrix(rng.template int_matrix<F>(m2max, r_cn2, cfg.sample_bound));
            kob1 = to_const_matrix(
                rng.template int_matrix<F>(q_ob, m1max + m2max, cfg.sample_bound));
            RatMatrix<F> pre(m1max + m2max, r_cn1 + r_cn2);
            pre.set_block(0, 0, to_ratfn_matrix(kc1));
            pre.set_block(m1max, r_cn1, to_ratfn_matrix(kc2));
            gp = pre * g12 * to_ratfn_matrix(kob1);
            square_ok = true;
            for (const auto& l : all) {
                try {
                    square_ok = square_ok &&
                                mat_rank_const(eval_matrix(gp, l)) == m1max + m2max;
                } catch (const PoleAtPoint&) {
                    square_ok = false;
                }
            }
        }
        if (!square_ok) continue;

        // orthogonalization: K_ob'' = z^{-d} det(G') G'^{-1}
        RatFn<F> det = mat_det(gp);
        if (det.is_zero()) continue;
        auto adj = RatMatrix<F>(mat_inverse(gp) * det);
        int d_needed = 0;
        for (std::size_t i = 0; i < adj.rows(); ++i)
            for (std::size_t j = 0; j < adj.cols(); ++j)
                if (!adj(i, j).is_zero())
                    d_needed = std::max(d_needed,
                                        adj(i, j).num().deg() - adj(i, j).den().deg());
        design.delay = static_cast<std::size_t>(d_needed);
        RatFn<F> zd(Poly<F>{FieldOps<F>::from_int(1)},
                    Poly<F>::monomial(design.delay));  // z^{-d}
        RatMatrix<F> kob2 = adj * zd;

        // (2-c) corner observation gains
        Matrix<F> kob3, kob4;
        bool corners_ok = false;
        for (unsigned t = 0; t < budget && !corners_ok; ++t) {
            kob3 = to_const_matrix(
                rng.template int_matrix<F>(m1max, p1.c.rows(), cfg.sample_bound));
            kob4 = to_const_matrix(
                rng.template int_matrix<F>(m2max, p2.c.rows(), cfg.sample_bound));
            corners_ok = true;
            for (const auto& l : ev1) {
                auto part = partition_jordan(p1.a, l, {p1.b[0]}, {p1.c});
                corners_ok = corners_ok &&
                             mat_rank_const(Matrix<F>(kob3 * part.c1[0])) >=
                                 part.indexing.m_lambda;
            }
            for (const auto& l : ev2) {
                auto part = partition_jordan(p2.a, l, {p2.b[0]}, {p2.c});
                corners_ok = corners_ok &&
                             mat_rank_const(Matrix<F>(kob4 * part.c1[0])) >=
                                 part.indexing.m_lambda;
            }
        }
        if (!corners_ok) continue;

        // full observer gain K_ob(z) = K_ob' K_ob'' diag(K_ob''', K_ob'''')
        RatMatrix<F> corner(m1max + m2max, p1.c.rows() + p2.c.rows());
        corner.set_block(0, 0, to_ratfn_matrix(kob3));
        corner.set_block(m1max, p1.c.rows(), to_ratfn_matrix(kob4));
        RatMatrix<F> k_ob_full = to_ratfn_matrix(kob1) * kob2 * corner;
        bool causal_stable = true;
        for (std::size_t i = 0; i < k_ob_full.rows() && causal_stable; ++i)
            for (std::size_t j = 0; j < k_ob_full.cols() && causal_stable; ++j) {
                const auto& e = k_ob_full(i, j);
                causal_stable = e.is_causal() && (e.is_zero() || strictly_stable(e.den()));
            }
        if (!causal_stable) continue;

        // per-controller decoupled observation filter Psi_k = z^{-d} det K_ob'''
        RatFn<F> scalar_path = det * zd;
        std::vector<StateSpace<F>> comps;
        bool comp_ok = true;
        std::vector<const Plant<F>*> plants{&p1, &p2};
        std::vector<Matrix<F>*> corner_gains{&kob3, &kob4};
        for (std::size_t k = 0; k < 2 && comp_ok; ++k) {
            const auto& pk = *plants[k];
            RatMatrix<F> psi = to_ratfn_matrix(*corner_gains[k]) * scalar_path;
            StateSpace<F> fk;
            try {
                fk = realize_channel(psi);
            } catch (const NonCausalEntry&) {
                comp_ok = false;
                break;
            }
            const std::size_t mk = pk.a.rows(), nf = fk.order();
            Matrix<F> abar(mk + nf, mk + nf), bbar(mk + nf, pk.b[0].cols());
            abar.set_block(0, 0, pk.a);
            abar.set_block(mk, mk, fk.a);
            abar.set_block(mk, 0, fk.b * pk.c);
            bbar.set_block(0, 0, pk.b[0]);
            Matrix<F> cbar = Matrix<F>::hstack(Matrix<F>(fk.d * pk.c), fk.c);
            try {
                Matrix<F> k_fb = deadbeat_feedback(abar, bbar, rng);
                Matrix<F> l_gain = deadbeat_observer(abar, cbar, rng);
                StateSpace<F> comp;
                comp.a = abar + bbar * k_fb - l_gain * cbar;
                comp.b = l_gain;
                comp.c = k_fb;
                comp.d = Matrix<F>(k_fb.rows(), cbar.rows());
                comps.push_back(std::move(comp));
            } catch (const NotStabilizable&) {
                comp_ok = false;
            }
        }
        if (!comp_ok) continue;

        auto obgain_ss = realize_channel(k_ob_full);
        std::vector<Matrix<F>> precoders{kc1, kc2};
        auto cl = detail::assemble_closed_loop(prob, gains, obgain_ss, precoders, comps);
        Poly<F> cert = char_poly_const(cl.a);
        if (!strictly_stable(cert)) continue;

        design.relay_gains = gains;
        design.k_ob = k_ob_full;
        design.precoders = precoders;
        design.compensators = comps;
        design.closed_loop = cl;
        design.certificate = cert;
        design.stable = true;
        if (!cross_transfers_zero(design)) continue;
        return design;
    }
    throw SynthesisBudgetExceeded("broadcast synthesis ran out of attempts");
}

}  // namespace ltiflow
