#pragma once

// Thin wrappers around GSL adaptive quadrature (QAGS / QAGI family) taking
// arbitrary callables. GSL's global error handler is disabled; failures are
// reported as exceptions carrying the GSL status.

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

namespace dwall {

namespace detail {

inline double gsl_trampoline(double x, void* params) {
    auto* f = static_cast<std::function<double(double)>*>(params);
    return (*f)(x);
}

struct GslWorkspace {
    gsl_integration_workspace* w;
    explicit GslWorkspace(std::size_t limit) : w(gsl_integration_workspace_alloc(limit)) {}
    ~GslWorkspace() { gsl_integration_workspace_free(w); }
    GslWorkspace(const GslWorkspace&) = delete;
    GslWorkspace& operator=(const GslWorkspace&) = delete;
};

inline void check_quad_status(int status, const char* who) {
    if (status != 0 && status != GSL_EROUND)
        throw std::runtime_error(std::string(who) + ": quadrature failed: " + gsl_strerror(status));
}

}  // namespace detail

/// Adaptive integral over a finite interval to absolute tolerance abs_tol.
inline double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol) {
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    detail::GslWorkspace ws(4096);
    auto fn = f;
    gsl_function F{&detail::gsl_trampoline, &fn};
    double result = 0.0, err = 0.0;
    int status = gsl_integration_qags(&F, a, b, abs_tol, 0.0, 4096, ws.w, &result, &err);
    gsl_set_error_handler(old);
    detail::check_quad_status(status, "integrate");
    return result;
}

/// Adaptive integral over (-inf, inf).
inline double integrate_line(const std::function<double(double)>& f, double abs_tol) {
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    detail::GslWorkspace ws(4096);
    auto fn = f;
    gsl_function F{&detail::gsl_trampoline, &fn};
    double result = 0.0, err = 0.0;
    int status = gsl_integration_qagi(&F, abs_tol, 0.0, 4096, ws.w, &result, &err);
    gsl_set_error_handler(old);
    detail::check_quad_status(status, "integrate_line");
    return result;
}

/// Adaptive integral over (-inf, b].
inline double integrate_lower(const std::function<double(double)>& f, double b, double abs_tol) {
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    detail::GslWorkspace ws(4096);
    auto fn = f;
    gsl_function F{&detail::gsl_trampoline, &fn};
    double result = 0.0, err = 0.0;
    int status = gsl_integration_qagil(&F, b, abs_tol, 0.0, 4096, ws.w, &result, &err);
    gsl_set_error_handler(old);
    detail::check_quad_status(status, "integrate_lower");
    return result;
}

/// Adaptive integral over [a, inf).
inline double integrate_upper(const std::function<double(double)>& f, double a, double abs_tol) {
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    detail::GslWorkspace ws(4096);
    auto fn = f;
    gsl_function F{&detail::gsl_trampoline, &fn};
    double result = 0.0, err = 0.0;
    int status = gsl_integration_qagiu(&F, a, abs_tol, 0.0, 4096, ws.w, &result, &err);
    gsl_set_error_handler(old);
    detail::check_quad_status(status, "integrate_upper");
    return result;
}

}  // namespace dwall
