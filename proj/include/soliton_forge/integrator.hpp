#pragma once
/**
 * @file integrator.hpp
 * @brief Adaptive Dormand-Prince 5(4) driver with terminal events.
 *
 * Steps are taken by the Boost.Odeint dense-output stepper. Each accepted
 * step is recorded as a Hermite node carrying y, y' and y'' (the latter
 * from the system's analytic derivative), so that downstream consumers get
 * a C2 quintic interpolant that is independent of the stepper's own
 * continuous extension.
 */

#include <boost/numeric/odeint.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "soliton_forge/hermite.hpp"

namespace soliton_forge {

struct IntegratorOptions {
    double rel_tol = 1e-11;
    double abs_tol = 1e-13;
    double max_step = 0.05;
    double initial_step = 1e-6;
    double min_step = 1e-14;
    std::size_t max_steps = 20'000'000;
};

/// A terminal event fires when `g` changes sign from negative to
/// non-negative between two accepted steps; its location is refined on
/// the stepper's dense output.
template <std::size_t N>
struct TerminalEvent {
    std::function<double(double, const Vec<N>&)> g;
    int id;
};

enum class StopReason { span_end, event, step_failure };

template <std::size_t N>
struct IntegrationResult {
    std::vector<HermiteNode<N>> nodes;  // in integration order
    StopReason reason = StopReason::span_end;
    int event_id = -1;
    std::string message;
};

/// `System` provides
///   Vec<N> rhs(double x, const Vec<N>& y) const;
///   Vec<N> rhs_prime(double x, const Vec<N>& y, const Vec<N>& f) const;  // d/dx of rhs along solutions
template <std::size_t N, class System>
IntegrationResult<N> integrate_adaptive(const System& system, double x0, const Vec<N>& y0,
                                        double x_end, const IntegratorOptions& options,
                                        const std::vector<TerminalEvent<N>>& events = {}) {
    namespace odeint = boost::numeric::odeint;
    using State = Vec<N>;

    IntegrationResult<N> result;
    auto record = [&](double x, const State& y) {
        const State f = system.rhs(x, y);
        result.nodes.push_back({x, y, f, system.rhs_prime(x, y, f)});
    };
    record(x0, y0);
    if (x_end == x0) return result;

    // The stepper always runs forward in tau = direction * x: odeint's
    // max_dt limiter drops the sign of negative steps.
    const double direction = x_end > x0 ? 1.0 : -1.0;
    auto to_x = [direction](double tau) { return direction * tau; };
    const double tau_end = direction * x_end;
    auto ode = [&system, direction](const State& y, State& dydt, double tau) {
        dydt = system.rhs(direction * tau, y);
        for (auto& v : dydt) v *= direction;
    };
    auto stepper = odeint::make_dense_output(options.abs_tol, options.rel_tol, options.max_step,
                                             odeint::runge_kutta_dopri5<State>());
    stepper.initialize(y0, direction * x0, options.initial_step);

    auto finite = [](const State& y) {
        for (double v : y)
            if (!std::isfinite(v)) return false;
        return true;
    };

    std::vector<double> g_prev(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].g(x0, y0);

    for (std::size_t step = 0; step < options.max_steps; ++step) {
        const double remaining = tau_end - stepper.current_time();
        if (remaining <= 0.0) return result;
        if (stepper.current_time() + stepper.current_time_step() > tau_end)
            stepper.initialize(stepper.current_state(), stepper.current_time(), remaining);

        try {
            stepper.do_step(ode);
        } catch (const std::exception& ex) {
            result.reason = StopReason::step_failure;
            result.message = ex.what();
            return result;
        }
        const double tau1 = stepper.current_time();
        const double x1 = to_x(tau1);
        const State y1 = stepper.current_state();
        if (!finite(y1)) {
            result.reason = StopReason::step_failure;
            result.message = "non-finite state";
            return result;
        }
        if (std::abs(stepper.current_time_step()) < options.min_step &&
            tau_end - tau1 > options.min_step) {
            result.reason = StopReason::step_failure;
            result.message = "step size underflow";
            return result;
        }

        // earliest event crossing inside the step
        int fired = -1;
        double tau_fire = tau1;
        const double tau_prev = stepper.previous_time();
        for (std::size_t e = 0; e < events.size(); ++e) {
            const double g1 = events[e].g(x1, y1);
            if (g_prev[e] < 0.0 && g1 >= 0.0) {
                auto gt = [&](double tau) {
                    State y;
                    stepper.calc_state(tau, y);
                    return events[e].g(to_x(tau), y);
                };
                std::uintmax_t iters = 200;
                auto tol = [](double u, double v) {
                    return std::abs(u - v) <= 1e-14 * std::max(1.0, std::abs(u));
                };
                auto root = boost::math::tools::toms748_solve(gt, tau_prev, tau1, g_prev[e], g1, tol, iters);
                const double tr = 0.5 * (root.first + root.second);
                if (fired < 0 || tr < tau_fire) {
                    fired = static_cast<int>(e);
                    tau_fire = tr;
                }
            }
            g_prev[e] = g1;
        }
        if (fired >= 0) {
            State yr;
            stepper.calc_state(tau_fire, yr);
            if (tau_fire > direction * result.nodes.back().x) record(to_x(tau_fire), yr);
            result.reason = StopReason::event;
            result.event_id = events[fired].id;
            return result;
        }
        record(x1, y1);
    }
    result.reason = StopReason::step_failure;
    result.message = "maximum step count exceeded";
    return result;
}

}  // namespace soliton_forge
