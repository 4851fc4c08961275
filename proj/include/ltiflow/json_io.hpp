#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "ltiflow/control.hpp"
#include "ltiflow/decsys.hpp"
#include "ltiflow/linearize.hpp"

namespace ltiflow {

using json = nlohmann::ordered_json;

// scalars: "p/q" over Q, "a/b+c/di" over Q(i) with zero parts omitted;
// polynomials: ascending coefficient arrays;
// rational functions: {"num": [...], "den": [...]}

template <class F>
json scalar_to_json(const F& x) {
    return json(to_string(x));
}

template <class F>
F scalar_from_json(const json& j) {
    if (j.is_number_integer()) return FieldOps<F>::from_int(j.get<long>());
    if (!j.is_string()) throw ParseError("scalar must be a string or integer");
    return scalar_from_string<F>(j.get<std::string>());
}

template <class F>
json poly_to_json(const Poly<F>& p) {
    json arr = json::array();
    for (const auto& c : p.coeffs()) arr.push_back(scalar_to_json(c));
    return arr;
}

template <class F>
Poly<F> poly_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("polynomial must be a coefficient array");
    std::vector<F> c;
    for (const auto& e : j) c.push_back(scalar_from_json<F>(e));
    return Poly<F>(std::move(c));
}

template <class F>
json ratfn_to_json(const RatFn<F>& f) {
    json j;
    j["num"] = poly_to_json(f.num());
    j["den"] = poly_to_json(f.den());
    return j;
}

template <class F>
RatFn<F> ratfn_from_json(const json& j) {
    if (j.is_string() || j.is_number_integer()) return RatFn<F>(scalar_from_json<F>(j));
    if (j.is_array()) return RatFn<F>(poly_from_json<F>(j));
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw ParseError("rational function needs num and den");
    return RatFn<F>(poly_from_json<F>(j["num"]), poly_from_json<F>(j["den"]));
}

template <class F>
json matrix_to_json(const RatMatrix<F>& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(ratfn_to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

template <class F>
RatMatrix<F> matrix_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("matrix must be an array of rows");
    std::size_t rows = j.size(), cols = rows ? j[0].size() : 0;
    RatMatrix<F> m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) throw ParseError("ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = ratfn_from_json<F>(j[i][c]);
    }
    return m;
}

template <class F>
json const_matrix_to_json(const Matrix<F>& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

template <class F>
Matrix<F> const_matrix_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("matrix must be an array of rows");
    std::size_t rows = j.size(), cols = rows ? j[0].size() : 0;
    Matrix<F> m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) throw ParseError("ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = scalar_from_json<F>(j[i][c]);
    }
    return m;
}

inline std::string field_tag(const json& j) {
    return j.value("field", std::string("Q"));
}

// ---------------------------------------------------------------------------
// network schema

template <class F>
json network_to_json(const LtiNetwork<F>& net) {
    json j;
    j["field"] = FieldOps<F>::name();
    j["nodes"] = json::array();
    for (const auto& n : net.nodes)
        j["nodes"].push_back({{"id", n.id},
                              {"kind", to_string(n.kind)},
                              {"ports_to_channel", n.ports_to_channel},
                              {"ports_from_channel", n.ports_from_channel}});
    j["channels"] = json::array();
    for (const auto& [key, m] : net.channels)
        j["channels"].push_back({{"from", net.nodes[key.first].id},
                                 {"to", net.nodes[key.second].id},
                                 {"matrix", matrix_to_json(m)}});
    return j;
}

template <class F>
LtiNetwork<F> network_from_json(const json& j) {
    LtiNetwork<F> net;
    if (!j.contains("nodes")) throw ParseError("network needs a nodes list");
    for (const auto& n : j["nodes"]) {
        NodeSpec spec;
        spec.id = n.at("id").get<std::string>();
        std::string kind = n.at("kind").get<std::string>();
        if (kind == "transmitter")
            spec.kind = NodeKind::transmitter;
        else if (kind == "relay")
            spec.kind = NodeKind::relay;
        else if (kind == "receiver")
            spec.kind = NodeKind::receiver;
        else
            throw ParseError("unknown node kind: " + kind);
        spec.ports_to_channel = n.value("ports_to_channel", 0u);
        spec.ports_from_channel = n.value("ports_from_channel", 0u);
        net.nodes.push_back(std::move(spec));
    }
    for (const auto& c : j.value("channels", json::array()))
        net.set_channel(c.at("from").get<std::string>(), c.at("to").get<std::string>(),
                        matrix_from_json<F>(c.at("matrix")));
    validate(net);
    return net;
}

// ---------------------------------------------------------------------------
// system schema

template <class F>
json system_to_json(const DecSystem<F>& sys) {
    json j;
    j["field"] = FieldOps<F>::name();
    j["A"] = const_matrix_to_json(sys.a);
    j["controllers"] = json::array();
    for (std::size_t i = 0; i < sys.controller_count(); ++i)
        j["controllers"].push_back(
            {{"B", const_matrix_to_json(sys.b[i])}, {"C", const_matrix_to_json(sys.c[i])}});
    if (sys.d) {
        json grid = json::array();
        for (const auto& row : *sys.d) {
            json r = json::array();
            for (const auto& dij : row) r.push_back(const_matrix_to_json(dij));
            grid.push_back(r);
        }
        j["D"] = grid;
    }
    return j;
}

template <class F>
DecSystem<F> system_from_json(const json& j) {
    DecSystem<F> sys;
    sys.a = const_matrix_from_json<F>(j.at("A"));
    for (const auto& c : j.at("controllers")) {
        sys.b.push_back(const_matrix_from_json<F>(c.at("B")));
        sys.c.push_back(const_matrix_from_json<F>(c.at("C")));
    }
    if (j.contains("D")) {
        std::vector<std::vector<Matrix<F>>> grid;
        for (const auto& row : j["D"]) {
            std::vector<Matrix<F>> r;
            for (const auto& dij : row) r.push_back(const_matrix_from_json<F>(dij));
            grid.push_back(std::move(r));
        }
        sys.d = std::move(grid);
    }
    validate(sys);
    return sys;
}

// ---------------------------------------------------------------------------
// problem schema

template <class F>
json problem_to_json(const ControlProblem<F>& prob) {
    json j;
    j["field"] = FieldOps<F>::name();
    j["mode"] = to_string(prob.mode);
    j["plants"] = json::array();
    for (const auto& p : prob.plants) {
        json pj;
        pj["A"] = const_matrix_to_json(p.a);
        pj["B"] = json::array();
        for (const auto& b : p.b) pj["B"].push_back(const_matrix_to_json(b));
        pj["C"] = const_matrix_to_json(p.c);
        j["plants"].push_back(pj);
    }
    j["network"] = network_to_json(prob.net);
    j["observer_node"] =
        prob.observer_nodes.size() == 1 ? json(prob.observer_nodes[0]) : json(prob.observer_nodes);
    j["controller_nodes"] = prob.controller_nodes;
    return j;
}

template <class F>
ControlProblem<F> problem_from_json(const json& j) {
    ControlProblem<F> prob;
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "ptop")
        prob.mode = ProblemMode::ptop;
    else if (mode == "multicast")
        prob.mode = ProblemMode::multicast;
    else if (mode == "broadcast")
        prob.mode = ProblemMode::broadcast;
    else if (mode == "unicast")
        prob.mode = ProblemMode::unicast;
    else
        throw ParseError("unknown problem mode: " + mode);
    for (const auto& pj : j.at("plants")) {
        Plant<F> p;
        p.a = const_matrix_from_json<F>(pj.at("A"));
        if (pj.at("B").is_array() && pj.at("B").size() > 0 && pj.at("B")[0].is_array() &&
            pj.at("B")[0].size() > 0 && pj.at("B")[0][0].is_array()) {
            for (const auto& b : pj.at("B")) p.b.push_back(const_matrix_from_json<F>(b));
        } else {
            p.b.push_back(const_matrix_from_json<F>(pj.at("B")));
        }
        p.c = const_matrix_from_json<F>(pj.at("C"));
        prob.plants.push_back(std::move(p));
    }
    prob.net = network_from_json<F>(j.at("network"));
    if (j.contains("observer_node")) {
        if (j["observer_node"].is_array())
            for (const auto& o : j["observer_node"])
                prob.observer_nodes.push_back(o.get<std::string>());
        else
            prob.observer_nodes.push_back(j["observer_node"].get<std::string>());
    } else {
        for (std::size_t t : prob.net.transmitters())
            prob.observer_nodes.push_back(prob.net.nodes[t].id);
    }
    if (j.contains("controller_nodes"))
        for (const auto& c : j["controller_nodes"])
            prob.controller_nodes.push_back(c.get<std::string>());
    else
        for (std::size_t r : prob.net.receivers())
            prob.controller_nodes.push_back(prob.net.nodes[r].id);
    validate_problem(prob);
    return prob;
}

// ---------------------------------------------------------------------------
// linearization annex

template <class F>
json linearization_annex(const MultiLinearized<F>& lin) {
    json j;
    j["offset_d"] = lin.d;
    j["d_ax"] = lin.d_ax;
    j["thresholds"] = json::array();
    for (const auto& th : lin.thresholds)
        j["thresholds"].push_back(
            {{"receiver", th.receiver},
             {"relation", th.relation == Relation::at_least ? ">=" : "<="},
             {"value", th.value}});
    return j;
}

template <class F>
json linearization_annex(const LinearizedNetwork<F>& lin) {
    json j;
    j["offset_d"] = lin.d;
    j["d_ax"] = json::array({lin.d_ax});
    j["thresholds"] = json::array();
    j["thresholds"].push_back({{"receiver", lin.rxp_id}, {"relation", ">="}, {"value", lin.d}});
    if (lin.aux_receiver)
        j["thresholds"].push_back(
            {{"receiver", lin.rxq_id}, {"relation", ">="}, {"value", lin.d_ax + lin.d}});
    return j;
}

template <class F>
json gains_to_json(const GainAssignment<F>& g) {
    json j;
    json relays = json::object();
    for (const auto& [id, m] : g.relay) relays[id] = matrix_to_json(m);
    j["relays"] = relays;
    if (g.k_tx) j["k_tx"] = matrix_to_json(*g.k_tx);
    if (g.k_rx) j["k_rx"] = matrix_to_json(*g.k_rx);
    return j;
}

}  // namespace ltiflow
