#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ltiflow/decsys.hpp"
#include "ltiflow/linearize.hpp"
#include "ltiflow/realize.hpp"

namespace ltiflow {

/// Plant x[n+1] = A x + B u + w, y = C x; multicast and broadcast problems
/// carry one input matrix per controller.
template <class F>
struct Plant {
    Matrix<F> a;
    std::vector<Matrix<F>> b;
    Matrix<F> c;
};

enum class ProblemMode { ptop, multicast, broadcast, unicast };

inline const char* to_string(ProblemMode m) {
    switch (m) {
        case ProblemMode::ptop: return "ptop";
        case ProblemMode::multicast: return "multicast";
        case ProblemMode::broadcast: return "broadcast";
        case ProblemMode::unicast: return "unicast";
    }
    return "?";
}

/// Control over an LTI network: the observers are the network transmitters,
/// the controllers its receivers. Channel entries must be stable and causal.
template <class F>
struct ControlProblem {
    ProblemMode mode = ProblemMode::ptop;
    std::vector<Plant<F>> plants;
    LtiNetwork<F> net;
    std::vector<std::string> observer_nodes;
    std::vector<std::string> controller_nodes;
};

template <class F>
void validate_problem(const ControlProblem<F>& prob) {
    validate(prob.net);
    for (const auto& id : prob.observer_nodes)
        if (prob.net.nodes[prob.net.node_index(id)].kind != NodeKind::transmitter)
            throw PortKindViolation("observer node " + id + " must be a network transmitter");
    for (const auto& id : prob.controller_nodes)
        if (prob.net.nodes[prob.net.node_index(id)].kind != NodeKind::receiver)
            throw PortKindViolation("controller node " + id + " must be a network receiver");
    for (const auto& [key, m] : prob.net.channels)
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (!m(i, j).is_causal())
                    throw NonCausalEntry("channel " + prob.net.nodes[key.first].id + "->" +
                                         prob.net.nodes[key.second].id + " is not causal");
                if (!m(i, j).is_zero() && !strictly_stable(m(i, j).den()))
                    throw NoMarginFound("channel " + prob.net.nodes[key.first].id + "->" +
                                        prob.net.nodes[key.second].id + " has unstable poles");
            }
    switch (prob.mode) {
        case ProblemMode::ptop:
            if (prob.plants.size() != 1 || prob.plants[0].b.size() != 1 ||
                prob.observer_nodes.size() != 1 || prob.controller_nodes.size() != 1)
                throw DimensionMismatch("point-to-point problems take one plant, one input "
                                        "matrix, one observer and one controller");
            break;
        case ProblemMode::multicast:
            if (prob.plants.size() != 1 || prob.plants[0].b.size() != 2 ||
                prob.observer_nodes.size() != 1 || prob.controller_nodes.size() != 2)
                throw DimensionMismatch(
                    "multicast problems take one plant with two input matrices");
            break;
        case ProblemMode::broadcast:
            if (prob.plants.size() != 2 || prob.observer_nodes.size() != 1 ||
                prob.controller_nodes.size() != 2)
                throw DimensionMismatch("broadcast problems take two plants and two controllers");
            break;
        case ProblemMode::unicast:
            if (prob.plants.size() != 2 || prob.observer_nodes.size() != 2 ||
                prob.controller_nodes.size() != 2)
                throw DimensionMismatch("unicast problems take two plants, two observers and "
                                        "two controllers");
            break;
    }
}

struct ConditionRow {
    std::string lambda;
    bool observable = false;
    bool controllable = false;
    std::size_t m_lambda = 0;
    std::vector<std::size_t> mincuts;  // one per relevant network
    bool mincut_ok = false;
};

struct StabilizabilityReport {
    bool stabilizable = false;
    std::vector<ConditionRow> rows;
};

namespace detail {

template <class F>
bool observable_at(const Matrix<F>& a, const Matrix<F>& c, const F& lambda) {
    Matrix<F> lia = -a;
    for (std::size_t i = 0; i < a.rows(); ++i) lia(i, i) += lambda;
    return mat_rank_const(Matrix<F>(Matrix<F>::vstack(lia, c))) == a.rows();
}

template <class F>
bool controllable_at(const Matrix<F>& a, const Matrix<F>& b, const F& lambda) {
    Matrix<F> lia = -a;
    for (std::size_t i = 0; i < a.rows(); ++i) lia(i, i) += lambda;
    return mat_rank_const(Matrix<F>(Matrix<F>::hstack(lia, b))) == a.rows();
}

}  // namespace detail

/// Point-to-point stabilizability: for every unstable eigenvalue, lambda must
/// be observable, controllable, and the network mincut at lambda must carry
/// m_lambda degrees of freedom.
template <class F>
StabilizabilityReport stabilizability_ptop(const ControlProblem<F>& prob) {
    validate_problem(prob);
    if (prob.mode != ProblemMode::ptop) throw DimensionMismatch("not a point-to-point problem");
    const auto& plant = prob.plants[0];
    StabilizabilityReport rep;
    rep.stabilizable = true;
    for (const auto& lambda : unstable_eigenvalues(plant.a)) {
        ConditionRow row;
        row.lambda = to_string(lambda);
        row.observable = detail::observable_at(plant.a, plant.c, lambda);
        row.controllable = detail::controllable_at(plant.a, plant.b[0], lambda);
        row.m_lambda = m_lambda_of(plant.a, lambda);
        std::size_t mc =
            mincut_rank(prob.net, std::optional<F>(lambda), prob.controller_nodes[0]).rank;
        row.mincuts.push_back(mc);
        row.mincut_ok = row.m_lambda <= mc;
        rep.stabilizable =
            rep.stabilizable && row.observable && row.controllable && row.mincut_ok;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

/// Alternative stabilizability over the network: per-controller
/// controllability and a per-receiver mincut condition.
template <class F>
StabilizabilityReport stabilizability_multicast(const ControlProblem<F>& prob) {
    validate_problem(prob);
    if (prob.mode != ProblemMode::multicast) throw DimensionMismatch("not a multicast problem");
    const auto& plant = prob.plants[0];
    StabilizabilityReport rep;
    rep.stabilizable = true;
    for (const auto& lambda : unstable_eigenvalues(plant.a)) {
        ConditionRow row;
        row.lambda = to_string(lambda);
        row.observable = detail::observable_at(plant.a, plant.c, lambda);
        row.controllable = detail::controllable_at(plant.a, plant.b[0], lambda) &&
                           detail::controllable_at(plant.a, plant.b[1], lambda);
        row.m_lambda = m_lambda_of(plant.a, lambda);
        row.mincut_ok = true;
        for (const auto& cn : prob.controller_nodes) {
            std::size_t mc = mincut_rank(prob.net, std::optional<F>(lambda), cn).rank;
            row.mincuts.push_back(mc);
            row.mincut_ok = row.mincut_ok && row.m_lambda <= mc;
        }
        rep.stabilizable =
            rep.stabilizable && row.observable && row.controllable && row.mincut_ok;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

struct BroadcastReport {
    bool sufficient = false;
    bool necessary = false;
    std::vector<ConditionRow> rows;  // mincuts: {br1, br2, br12} per lambda
    std::size_t m1_max = 0, m2_max = 0;
};

/// Independent stabilizability: the sufficient condition compares against the
/// worst-case Jordan counts m_{k,max}, the necessary one against the per-
/// eigenvalue counts; the two may disagree.
template <class F>
BroadcastReport stabilizability_broadcast(const ControlProblem<F>& prob) {
    validate_problem(prob);
    if (prob.mode != ProblemMode::broadcast) throw DimensionMismatch("not a broadcast problem");
    const auto& p1 = prob.plants[0];
    const auto& p2 = prob.plants[1];
    auto ev1 = unstable_eigenvalues(p1.a);
    auto ev2 = unstable_eigenvalues(p2.a);
    std::vector<F> all = ev1;
    for (const auto& l : ev2) {
        bool seen = false;
        for (const auto& o : all) seen = seen || o == l;
        if (!seen) all.push_back(l);
    }
    BroadcastReport rep;
    for (const auto& l : ev1) rep.m1_max = std::max(rep.m1_max, m_lambda_of(p1.a, l));
    for (const auto& l : ev2) rep.m2_max = std::max(rep.m2_max, m_lambda_of(p2.a, l));

    bool suff = true, nec = true;
    for (const auto& lambda : all) {
        ConditionRow row;
        row.lambda = to_string(lambda);
        row.observable = detail::observable_at(p1.a, p1.c, lambda) &&
                         detail::observable_at(p2.a, p2.c, lambda);
        row.controllable = detail::controllable_at(p1.a, p1.b[0], lambda) &&
                           detail::controllable_at(p2.a, p2.b[0], lambda);
        std::size_t m1l = m_lambda_of(p1.a, lambda);
        std::size_t m2l = m_lambda_of(p2.a, lambda);
        row.m_lambda = m1l + m2l;
        std::size_t mc1 =
            mincut_rank(prob.net, std::optional<F>(lambda), prob.controller_nodes[0]).rank;
        std::size_t mc2 =
            mincut_rank(prob.net, std::optional<F>(lambda), prob.controller_nodes[1]).rank;
        std::size_t mc12 =
            mincut_rank_multi(prob.net, std::optional<F>(lambda), prob.controller_nodes).rank;
        row.mincuts = {mc1, mc2, mc12};
        bool base = row.observable && row.controllable;
        suff = suff && base && rep.m1_max <= mc1 && rep.m2_max <= mc2 &&
               rep.m1_max + rep.m2_max <= mc12;
        nec = nec && base && m1l <= mc1 && m2l <= mc2 && m1l + m2l <= mc12;
        row.mincut_ok = m1l <= mc1 && m2l <= mc2 && m1l + m2l <= mc12;
        rep.rows.push_back(std::move(row));
    }
    rep.sufficient = suff;
    rep.necessary = nec;
    return rep;
}

/// Multiple-unicast check (condition template only; the tight multi-unicast
/// characterization is open): per-pair observability/controllability plus a
/// per-pair mincut from each observer alone to its controller.
template <class F>
StabilizabilityReport stabilizability_unicast_check(const ControlProblem<F>& prob) {
    validate_problem(prob);
    if (prob.mode != ProblemMode::unicast) throw DimensionMismatch("not a unicast problem");
    StabilizabilityReport rep;
    rep.stabilizable = true;
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& plant = prob.plants[k];
        for (const auto& lambda : unstable_eigenvalues(plant.a)) {
            ConditionRow row;
            row.lambda = to_string(lambda);
            row.observable = detail::observable_at(plant.a, plant.c, lambda);
            row.controllable = detail::controllable_at(plant.a, plant.b[0], lambda);
            row.m_lambda = m_lambda_of(plant.a, lambda);
            std::size_t mc =
                mincut_rank_multi(prob.net, std::optional<F>(lambda),
                                  {prob.controller_nodes[k]}, {prob.observer_nodes[k]})
                    .rank;
            row.mincuts.push_back(mc);
            row.mincut_ok = row.m_lambda <= mc;
            rep.stabilizable =
                rep.stabilizable && row.observable && row.controllable && row.mincut_ok;
            rep.rows.push_back(std::move(row));
        }
    }
    return rep;
}

/// Strong connectivity of a decentralized system: every proper nonempty
/// controller subset V has a nonzero symbolic transfer C_V (zI-A)^{-1} B_{V^c}.
template <class F>
bool strong_connectivity(const DecSystem<F>& sys) {
    validate(sys);
    const std::size_t v = sys.controller_count();
    if (v > kControllerEnumerationCap)
        throw TooManyControllers("subset enumeration capped");
    if (v <= 1) return true;
    const std::size_t m = sys.dim();
    RatMatrix<F> zia(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            zia(i, j) = RatFn<F>(Poly<F>(-sys.a(i, j)));
            if (i == j) zia(i, j) += RatFn<F>::z();
        }
    auto inv = mat_inverse(zia);
    for (std::size_t mask = 1; mask + 1 < (std::size_t(1) << v); ++mask) {
        RatMatrix<F> cv(0, m), bvc(m, 0);
        for (std::size_t i = 0; i < v; ++i) {
            if (mask & (std::size_t(1) << i))
                cv = RatMatrix<F>::vstack(cv, to_ratfn_matrix(sys.c[i]));
            else
                bvc = RatMatrix<F>::hstack(bvc, to_ratfn_matrix(sys.b[i]));
        }
        if (RatMatrix<F>(cv * inv * bvc).is_zero()) return false;
    }
    return true;
}

/// A set of strongly connected decentralized systems is alternatively
/// stabilizable iff none has an unstable fixed mode.
template <class F>
bool alt_stabilizability_decentralized(const std::vector<DecSystem<F>>& systems) {
    if (systems.empty()) return true;
    for (std::size_t s = 1; s < systems.size(); ++s) {
        if (systems[s].controller_count() != systems[0].controller_count())
            throw DimensionMismatch("systems must share the controller count");
        for (std::size_t i = 1; i < systems[s].controller_count(); ++i) {
            if (systems[s].b[i].cols() != systems[0].b[i].cols() ||
                systems[s].c[i].rows() != systems[0].c[i].rows())
                throw DimensionMismatch("common controllers must share dimensions");
        }
    }
    for (const auto& sys : systems)
        if (!strong_connectivity(sys))
            throw StrongConnectivityRequired("every system must be strongly connected");
    for (const auto& sys : systems)
        for (const auto& lambda : unstable_eigenvalues(sys.a))
            if (fixed_mode_algebraic(sys, lambda).fixed) return false;
    return true;
}

namespace detail {

template <class F>
bool relay_graph_acyclic(const LtiNetwork<F>& net) {
    auto relays = net.relays();
    const std::size_t n = relays.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            auto it = net.channels.find({relays[a], relays[b]});
            if (it != net.channels.end() && !it->second.is_zero()) adj[a].push_back(b);
        }
    std::vector<int> state(n, 0);
    std::function<bool(std::size_t)> dfs = [&](std::size_t u) {
        state[u] = 1;
        for (std::size_t w : adj[u]) {
            if (state[w] == 1) return false;
            if (state[w] == 0 && !dfs(w)) return false;
        }
        state[u] = 2;
        return true;
    };
    for (std::size_t u = 0; u < n; ++u)
        if (state[u] == 0 && !dfs(u)) return false;
    return true;
}

/// All relay gain entries set to +-bound with the given sign pattern seed.
template <class F>
GainAssignment<F> extreme_gains(const LtiNetwork<F>& net, const F& bound, Sampler& rng) {
    GainAssignment<F> g;
    for (std::size_t r : net.relays()) {
        const auto& n = net.nodes[r];
        RatMatrix<F> k(n.ports_to_channel, n.ports_from_channel);
        for (std::size_t i = 0; i < k.rows(); ++i)
            for (std::size_t j = 0; j < k.cols(); ++j)
                k(i, j) = RatFn<F>(rng.coin() ? bound : -bound);
        g.relay[n.id] = k;
    }
    return g;
}

}  // namespace detail

inline const Rat kGershgorinCap = Rat(1);

/// Working gain margin: a bound such that memoryless relay gains of magnitude
/// at most epsilon keep the realized network's poles strictly inside the unit
/// circle. Found by geometric bisection over {2^-k} with exact Schur-Cohn
/// checks at sampled extreme sign patterns; acyclic relay graphs get the
/// configured cap outright. Certification of the final assignment is the
/// synthesizer's job.
template <class F>
F gershgorin_epsilon(const ControlProblem<F>& prob, std::uint64_t seed = 0,
                     unsigned patterns = 8) {
    validate_problem(prob);
    if (prob.net.relays().empty() || detail::relay_graph_acyclic(prob.net))
        return F(kGershgorinCap);
    Rat eps = kGershgorinCap;
    for (int halving = 0; halving < 64; ++halving, eps /= 2) {
        Sampler rng(seed + static_cast<std::uint64_t>(halving));
        bool all_stable = true;
        for (unsigned p = 0; p < patterns && all_stable; ++p) {
            auto g = detail::extreme_gains(prob.net, F(eps), rng);
            try {
                auto a = closed_network_state_matrix(prob.net, g);
                all_stable = a.rows() == 0 || strictly_stable(char_poly_const(a));
            } catch (const LoopSingular&) {
                all_stable = false;
            }
        }
        if (all_stable) return F(eps);
    }
    throw NoMarginFound("no stable gain margin found; check the channel poles");
}

// ---------------------------------------------------------------------------
// deadbeat pole placement

namespace detail {

/// Basis of the controllable subspace (pivot columns of the Krylov matrix).
template <class F>
Matrix<F> controllable_subspace(const Matrix<F>& a, const Matrix<F>& b) {
    const std::size_t n = a.rows();
    Matrix<F> krylov = b, power = b;
    for (std::size_t k = 1; k < n; ++k) {
        power = a * power;
        krylov = Matrix<F>::hstack(krylov, power);
    }
    // column-pivot collection via elimination over the field
    RatMatrix<F> work = to_ratfn_matrix(krylov);
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < work.cols() && row < work.rows(); ++col) {
        std::size_t p = row;
        while (p < work.rows() && work(p, col).is_zero()) ++p;
        if (p == work.rows()) continue;
        if (p != row)
            for (std::size_t j = 0; j < work.cols(); ++j) std::swap(work(p, j), work(row, j));
        for (std::size_t i = row + 1; i < work.rows(); ++i) {
            if (work(i, col).is_zero()) continue;
            RatFn<F> f = work(i, col) / work(row, col);
            for (std::size_t j = col; j < work.cols(); ++j) work(i, j) -= f * work(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    Matrix<F> basis(n, pivots.size());
    for (std::size_t k = 0; k < pivots.size(); ++k)
        for (std::size_t i = 0; i < n; ++i) basis(i, k) = krylov(i, pivots[k]);
    return basis;
}

template <class F>
Matrix<F> complete_basis(const Matrix<F>& v) {
    const std::size_t n = v.rows();
    Matrix<F> t = v;
    for (std::size_t e = 0; e < n && t.cols() < n; ++e) {
        Matrix<F> unit(n, 1);
        unit(e, 0) = FieldOps<F>::from_int(1);
        Matrix<F> cand = Matrix<F>::hstack(t, unit);
        if (mat_rank_const(cand) == cand.cols()) t = cand;
    }
    if (t.cols() != n) throw Error("basis completion failed");
    return t;
}

}  // namespace detail

/// Deadbeat state feedback: returns K such that A + B K has all assignable
/// poles at the origin; the uncontrollable part must already be strictly
/// stable (NotStabilizable otherwise). Heymann randomization reduces the
/// multi-input case to a single input before Ackermann assignment.
template <class F>
Matrix<F> deadbeat_feedback(const Matrix<F>& a, const Matrix<F>& b, Sampler& rng,
                            unsigned budget = 32) {
    const std::size_t n = a.rows();
    const std::size_t q = b.cols();
    if (n == 0) return Matrix<F>(q, 0);
    Matrix<F> v = detail::controllable_subspace(a, b);
    const std::size_t r = v.cols();
    Matrix<F> t = detail::complete_basis(v);
    auto t_inv = to_const_matrix(mat_inverse(to_ratfn_matrix(t)));
    Matrix<F> a_t = t_inv * a * t;
    Matrix<F> b_t = t_inv * b;
    Matrix<F> a11 = a_t.block(0, 0, r, r);
    Matrix<F> b1 = b_t.block(0, 0, r, q);
    if (r < n) {
        Matrix<F> a22 = a_t.block(r, r, n - r, n - r);
        if (!strictly_stable(char_poly_const(a22)))
            throw NotStabilizable("uncontrollable part has unstable poles");
    }
    if (r == 0) return Matrix<F>(q, n);

    for (unsigned attempt = 0; attempt < budget; ++attempt) {
        Matrix<F> f0(q, r), g(q, 1);
        if (q == 1) {
            // single input: no reduction needed
        } else {
            for (std::size_t i = 0; i < q; ++i) {
                g(i, 0) = rng.template scalar<F>(16);
                for (std::size_t j = 0; j < r; ++j) f0(i, j) = rng.template scalar<F>(16);
            }
        }
        Matrix<F> a_c = (q == 1) ? a11 : Matrix<F>(a11 + b1 * f0);
        Matrix<F> b_c = (q == 1) ? b1 : Matrix<F>(b1 * g);
        // single-input controllability matrix
        Matrix<F> ctrb = b_c, power = b_c;
        for (std::size_t k = 1; k < r; ++k) {
            power = a_c * power;
            ctrb = Matrix<F>::hstack(ctrb, power);
        }
        if (mat_rank_const(ctrb) < r) continue;
        auto ctrb_inv = to_const_matrix(mat_inverse(to_ratfn_matrix(ctrb)));
        Matrix<F> apow = Matrix<F>::identity(r);
        for (std::size_t k = 0; k < r; ++k) apow = a_c * apow;
        Matrix<F> last_row(1, r);
        for (std::size_t j = 0; j < r; ++j) last_row(0, j) = ctrb_inv(r - 1, j);
        Matrix<F> k1 = last_row * apow;  // Ackermann with target z^r
        Matrix<F> k_red = (q == 1) ? Matrix<F>(-k1) : Matrix<F>(f0 - g * k1);
        // lift to original coordinates through the controllable projection
        Matrix<F> proj(r, n);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < n; ++j) proj(i, j) = t_inv(i, j);
        return k_red * proj;
    }
    throw SynthesisBudgetExceeded("single-input reduction failed repeatedly");
}

/// Deadbeat observer gain: A - L C has every assignable pole at the origin.
template <class F>
Matrix<F> deadbeat_observer(const Matrix<F>& a, const Matrix<F>& c, Sampler& rng,
                            unsigned budget = 32) {
    Matrix<F> k = deadbeat_feedback(Matrix<F>(a.transpose()), Matrix<F>(c.transpose()), rng,
                                    budget);
    return Matrix<F>(-k.transpose());
}

}  // namespace ltiflow
