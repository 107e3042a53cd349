#include "nfqed/fiber_modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "nfqed/error.hpp"

namespace nfqed {

namespace {

// Shrinks the open guided window away from its endpoints, where kappa_out or
// kappa_in vanish.
constexpr double kWindowShrink = 1e-9;
constexpr int kSolveScanPoints = 512;
constexpr int kSingleModeScanPoints = 10000;

double bessel_j(int n, double x) { return std::cyl_bessel_j(static_cast<double>(n), x); }

// K_n(x) / K_1(y) for x >= y > 0, safe when both arguments are large.
double bessel_k_ratio(int n, double x, double y)
{
    constexpr double kDirectLimit = 600.0;
    if (x < kDirectLimit && y < kDirectLimit) {
        return std::cyl_bessel_k(static_cast<double>(n), x) / std::cyl_bessel_k(1.0, y);
    }
    if (x - y > 745.0) {
        return 0.0;
    }
    // Hankel asymptotic series, four terms.
    auto series = [](int order, double z) {
        const double mu = 4.0 * order * order;
        const double t1 = (mu - 1.0) / (8.0 * z);
        const double t2 = t1 * (mu - 9.0) / (2.0 * 8.0 * z);
        const double t3 = t2 * (mu - 25.0) / (3.0 * 8.0 * z);
        return 1.0 + t1 + t2 + t3;
    };
    return std::sqrt(y / x) * std::exp(y - x) * series(n, x) / series(1, y);
}

// -y K0(y)/K1(y) - 1, i.e. y d/dy ln K1(y).
double log_derivative_k1(double y)
{
    return -y * bessel_k_ratio(0, y, y) - 1.0;
}

struct WindowGeometry {
    double k0;
    double h;  // kappa_in
    double q;  // |kappa_out|
};

WindowGeometry window_geometry(const FiberSpec& fiber, double omega, double k)
{
    const double k0 = omega;  // c = 1
    return {k0, std::sqrt(fiber.permittivity * k0 * k0 - k * k), std::sqrt(k * k - k0 * k0)};
}

double compute_u(const FiberSpec& fiber, const WindowGeometry& g)
{
    const double a = fiber.radius;
    const double x = g.h * a;
    const double y = g.q * a;
    const double j1 = bessel_j(1, x);
    if (std::abs(j1) < 1e-14) {
        throw Error(ErrorCode::BesselDomain, "kappa_in * a is at a zero of J1");
    }
    // (1/x) d/dx ln J1 and (1/y) d/dy ln K1 via recurrences.
    const double log_dj = (bessel_j(0, x) - j1 / x) / (x * j1);
    const double log_dk = log_derivative_k1(y) / (y * y);
    return (1.0 / (x * x) + 1.0 / (y * y)) / (log_dj + log_dk);
}

double refine_root(const FiberSpec& fiber, double omega, double lo, double hi, double flo, double fhi)
{
    auto f = [&](double k) { return characteristic_function(fiber, omega, k); };
    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
    std::uintmax_t max_iter = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
    return 0.5 * (r.first + r.second);
}

}  // namespace

void FiberSpec::validate() const
{
    if (!(radius > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "fiber radius must be positive");
    }
    if (!(permittivity > 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "fiber permittivity must exceed 1");
    }
}

double characteristic_function(const FiberSpec& fiber, double omega, double k)
{
    const auto g = window_geometry(fiber, omega, k);
    const double a = fiber.radius;
    const double eps = fiber.permittivity;
    const double x = g.h * a;
    const double y = g.q * a;
    const double j = bessel_j(1, x);
    const double jp = x * bessel_j(0, x) - j;  // x J1'(x)
    const double kt = log_derivative_k1(y);
    const double h2 = g.h * g.h;
    const double q2 = g.q * g.q;
    // J1^2 h^4 times [ (eps q^2/h^2) xJ1'/J1 + yK1'/K1 ][ (q^2/h^2) xJ1'/J1 + yK1'/K1 ]
    //   - (eps-1)^2 k0^2 k^2 / h^4, divided back by h^4.
    const double lhs = (eps * q2 * jp + kt * j * h2) * (q2 * jp + kt * j * h2);
    const double rhs = (eps - 1.0) * (eps - 1.0) * g.k0 * g.k0 * k * k * j * j;
    return (lhs - rhs) / (h2 * h2);
}

std::vector<double> scan_dispersion_roots(const FiberSpec& fiber, double omega, int points)
{
    std::vector<double> roots;
    if (!(fiber.permittivity > 1.0) || !(fiber.radius > 0.0) || points < 2) {
        return roots;
    }
    const double lo = omega * (1.0 + kWindowShrink);
    const double hi = fiber.index() * omega * (1.0 - kWindowShrink);
    if (!(hi > lo)) {
        return roots;
    }
    const double step = (hi - lo) / (points - 1);
    double k_prev = lo;
    double f_prev = characteristic_function(fiber, omega, k_prev);
    for (int i = 1; i < points; ++i) {
        const double k = (i == points - 1) ? hi : lo + i * step;
        const double f = characteristic_function(fiber, omega, k);
        if (f == 0.0) {
            roots.push_back(k);
        } else if ((f_prev < 0.0) != (f < 0.0) && f_prev != 0.0) {
            roots.push_back(refine_root(fiber, omega, k_prev, k, f_prev, f));
        }
        k_prev = k;
        f_prev = f;
    }
    return roots;
}

double solve_dispersion(const FiberSpec& fiber, double omega)
{
    fiber.validate();
    const auto roots = scan_dispersion_roots(fiber, omega, kSolveScanPoints);
    if (roots.empty()) {
        throw Error(ErrorCode::NoRoot, "no sign change of the characteristic function in the guided window");
    }
    if (roots.size() > 1) {
        throw Error(ErrorCode::MultipleRoots,
                    "fiber is not single-mode: " + std::to_string(roots.size()) + " roots in the guided window");
    }
    return roots.front();
}

bool check_single_mode(const FiberSpec& fiber, double omega)
{
    if (!(fiber.radius > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "fiber radius must be positive");
    }
    return scan_dispersion_roots(fiber, omega, kSingleModeScanPoints).size() == 1;
}

double group_velocity(const FiberSpec& fiber, double omega, double rel_step)
{
    const double d = rel_step * omega;
    const double kp = solve_dispersion(fiber, omega + d);
    const double km = solve_dispersion(fiber, omega - d);
    return 2.0 * d / (kp - km);
}

GuidedMode GuidedMode::solve(const FiberSpec& fiber, double omega)
{
    GuidedMode m;
    m.fiber_ = fiber;
    m.omega_ = omega;
    m.k_ = solve_dispersion(fiber, omega);
    m.group_velocity_ = nfqed::group_velocity(fiber, omega);
    const auto g = window_geometry(fiber, omega, m.k_);
    m.kappa_in_ = g.h;
    m.kappa_out_ = g.q;
    m.u_ = compute_u(fiber, g);
    const double y = g.q * fiber.radius;
    const double outer = (1.0 - m.u_) * bessel_k_ratio(0, y, y) + (1.0 + m.u_) * bessel_k_ratio(2, y, y);
    m.phase_sign_ = outer >= 0.0 ? 1.0 : -1.0;
    return m;
}

double GuidedMode::norm_const() const
{
    if (!norm_const_) {
        throw Error(ErrorCode::NotNormalized, "guided mode has no normalization constant");
    }
    return *norm_const_;
}

GuidedMode GuidedMode::with_norm_const(double c) const
{
    GuidedMode m = *this;
    m.norm_const_ = c;
    return m;
}

double eval_u_param(const GuidedMode& mode)
{
    return compute_u(mode.fiber(), window_geometry(mode.fiber(), mode.frequency(), mode.wavenumber()));
}

RadialProfile profile_shape(const GuidedMode& mode, double rho)
{
    if (rho < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "negative radius");
    }
    const double a = mode.fiber().radius;
    const double k = mode.wavenumber();
    const double u = mode.u_param();
    const double s = mode.phase_sign();
    if (rho < a) {
        const double h = mode.kappa_in();
        const double j1a = bessel_j(1, h * a);
        const double j0 = bessel_j(0, h * rho);
        const double j2 = bessel_j(2, h * rho);
        const double pre = k / (2.0 * h * j1a);
        return {s * kI * pre * ((1.0 - u) * j0 - (1.0 + u) * j2),
                cdouble(-s * pre * ((1.0 - u) * j0 + (1.0 + u) * j2)),
                cdouble(s * bessel_j(1, h * rho) / j1a)};
    }
    const double q = mode.kappa_out_abs();
    const double x = q * rho;
    const double y = q * a;
    const double k0r = bessel_k_ratio(0, x, y);
    const double k2r = bessel_k_ratio(2, x, y);
    const double pre = k / (2.0 * q);
    return {s * kI * pre * ((1.0 - u) * k0r + (1.0 + u) * k2r),
            cdouble(-s * pre * ((1.0 - u) * k0r - (1.0 + u) * k2r)),
            cdouble(s * bessel_k_ratio(1, x, y))};
}

RadialProfile eval_radial_profile(const GuidedMode& mode, double rho)
{
    const double c = mode.norm_const();
    auto p = profile_shape(mode, rho);
    return {c * p.e_rho, c * p.e_phi, c * p.e_z};
}

double exterior_cutoff_radius(const GuidedMode& mode)
{
    const double a = mode.fiber().radius;
    const double y = mode.kappa_out_abs() * a;
    auto below = [&](double x) { return bessel_k_ratio(1, x, y) < 1e-16; };
    double hi = 2.0 * y + 1.0;
    while (!below(hi)) {
        hi *= 2.0;
    }
    double lo = y;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (below(mid) ? hi : lo) = mid;
    }
    return hi / mode.kappa_out_abs();
}

double normalization_integral(const GuidedMode& mode)
{
    const double c = mode.normalized() ? mode.norm_const() : 1.0;
    const double a = mode.fiber().radius;
    const double eps = mode.fiber().permittivity;
    auto integrand = [&](double rho) {
        const double medium = rho < a ? eps : 1.0;
        return rho * medium * profile_shape(mode, rho).intensity();
    };

    using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;
    constexpr double kTol = 1e-12;
    constexpr unsigned kDepth = 20;
    double total = 0.0;
    double err_total = 0.0;
    auto accumulate = [&](double lo, double hi) {
        double err = 0.0;
        total += Quad::integrate(integrand, lo, hi, kDepth, kTol, &err);
        err_total += err;
    };

    accumulate(0.0, a);
    // Exterior split on a geometric grid so slow evanescent tails are resolved.
    const double cutoff = exterior_cutoff_radius(mode);
    double lo = a;
    double width = a;
    while (lo < cutoff) {
        const double hi = std::min(lo + width, cutoff);
        accumulate(lo, hi);
        lo = hi;
        width *= 2.0;
    }
    if (!std::isfinite(total) || !(total > 0.0) || err_total > 1e-10 * total) {
        throw Error(ErrorCode::QuadratureFailure, "normalization integral did not converge");
    }
    return c * c * total;
}

GuidedMode normalize_mode(const GuidedMode& mode)
{
    const double raw = normalization_integral(mode.with_norm_const(1.0));
    return mode.with_norm_const(std::sqrt(kNormalizationTarget / raw));
}

GuidedMode solve_normalized_mode(const FiberSpec& fiber, double omega)
{
    return normalize_mode(GuidedMode::solve(fiber, omega));
}

CVec3 mode_field_transverse_frame(const GuidedMode& mode, int sigma, Direction direction,
                                  double rho, double phi)
{
    const auto p = eval_radial_profile(mode, rho);
    const double sig = static_cast<double>(sigma);
    const cdouble azimuth = std::exp(kI * (sig * phi)) / std::sqrt(2.0 * kPi);
    const cdouble e_rho = p.e_rho * azimuth;
    const cdouble e_phi = sig * p.e_phi * azimuth;
    const cdouble e_z = static_cast<double>(sign(direction)) * p.e_z * azimuth;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return {e_rho * c - e_phi * s, e_rho * s + e_phi * c, e_z};
}

CVec3 mode_field_cartesian(const GuidedMode& mode, int sigma, Direction direction, const CylPoint& p)
{
    const cdouble phase = std::exp(kI * (static_cast<double>(sign(direction)) * mode.wavenumber() * p.z));
    return mode_field_transverse_frame(mode, sigma, direction, p.rho, p.phi) * phase;
}

CVec3 project_transverse(const CVec3& field, int sigma)
{
    const CVec3 e = circular_vector(sigma);
    return e * e.dot(field);  // dot() conjugates its left operand
}

}  // namespace nfqed
