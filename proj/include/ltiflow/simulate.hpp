#pragma once

#include <vector>

#include "ltiflow/synthesis.hpp"

namespace ltiflow {

enum class DisturbanceKind { zero, constant, alternating, seeded_random_signs };
enum class DisturbanceTarget { plant1, plant2, both };

inline const char* to_string(DisturbanceKind k) {
    switch (k) {
        case DisturbanceKind::zero: return "zero";
        case DisturbanceKind::constant: return "constant";
        case DisturbanceKind::alternating: return "alternating";
        case DisturbanceKind::seeded_random_signs: return "seeded-random-signs";
    }
    return "?";
}

/// Bounded disturbance profile |w[n]| <= amplitude on the selected plant.
template <class F>
struct DisturbanceSpec {
    DisturbanceKind kind = DisturbanceKind::alternating;
    F amplitude = FieldOps<F>::from_int(1);
    DisturbanceTarget target = DisturbanceTarget::both;
    std::uint64_t seed = 0;
};

/// Exact closed-loop trace x'[n+1] = A_cl x'[n] + B_cl w[n] from x'[0] = 0.
template <class F>
struct SimTrace {
    std::vector<std::vector<F>> states;  // length horizon + 1
    std::vector<Rat> norms;              // exact max-norm per step
    Rat peak = 0;
};

namespace detail {

inline Rat entry_norm(const Rat& x) { return x < 0 ? Rat(-x) : x; }
inline Rat entry_norm(const GaussRat& x) {
    Rat re = x.re < 0 ? Rat(-x.re) : x.re;
    Rat im = x.im < 0 ? Rat(-x.im) : x.im;
    return re > im ? re : im;
}

}  // namespace detail

template <class F>
SimTrace<F> simulate(const SynthesisDesign<F>& design, const DisturbanceSpec<F>& dist,
                     std::size_t horizon) {
    const auto& cl = design.closed_loop;
    const std::size_t n = cl.order();
    const std::size_t wdim = cl.b.cols();
    std::size_t w_lo = 0, w_hi = wdim;
    if (design.plant_dims.size() == 2) {
        if (dist.target == DisturbanceTarget::plant1) w_hi = design.plant_dims[0];
        if (dist.target == DisturbanceTarget::plant2) w_lo = design.plant_dims[0];
    }
    Sampler rng(dist.seed);

    SimTrace<F> trace;
    std::vector<F> x(n, FieldOps<F>::from_int(0));
    auto record = [&](const std::vector<F>& state) {
        Rat nrm = 0;
        for (const auto& e : state) {
            Rat a = detail::entry_norm(e);
            if (a > nrm) nrm = a;
        }
        trace.states.push_back(state);
        trace.norms.push_back(nrm);
        if (nrm > trace.peak) trace.peak = nrm;
    };
    record(x);
    for (std::size_t step = 0; step < horizon; ++step) {
        F w = dist.amplitude;
        switch (dist.kind) {
            case DisturbanceKind::zero: w = FieldOps<F>::from_int(0); break;
            case DisturbanceKind::constant: break;
            case DisturbanceKind::alternating:
                if (step % 2 == 1) w = -w;
                break;
            case DisturbanceKind::seeded_random_signs:
                if (rng.coin()) w = -w;
                break;
        }
        std::vector<F> next(n, FieldOps<F>::from_int(0));
        for (std::size_t i = 0; i < n; ++i) {
            F acc = FieldOps<F>::from_int(0);
            for (std::size_t j = 0; j < n; ++j) {
                if (FieldOps<F>::is_zero(cl.a(i, j))) continue;
                acc += cl.a(i, j) * x[j];
            }
            for (std::size_t j = w_lo; j < w_hi; ++j) {
                if (FieldOps<F>::is_zero(cl.b(i, j))) continue;
                acc += cl.b(i, j) * w;
            }
            next[i] = acc;
        }
        x = std::move(next);
        record(x);
    }
    return trace;
}

/// The authoritative verdict is the exact Schur-Cohn certificate; the trace
/// corroborates it: the peak norm over the second half of the horizon must
/// not exceed `growth_factor` times the peak over the first half.
template <class F>
bool boundedness_verdict(const SimTrace<F>& trace, const SynthesisDesign<F>& design,
                         const Rat& growth_factor = Rat(1)) {
    if (!design.stable) return false;
    const std::size_t n = trace.norms.size();
    if (n < 2) return true;
    Rat first = 0, second = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i <= n / 2) {
            if (trace.norms[i] > first) first = trace.norms[i];
        }
        if (i >= n / 2) {
            if (trace.norms[i] > second) second = trace.norms[i];
        }
    }
    return second <= growth_factor * first;
}

}  // namespace ltiflow
