#include "crn/smooth.hpp"

#include "crn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crn {

namespace {

using Params = Eigen::Matrix<double, 5, 1>;

bool denominator_has_root_on(const Params& p, double t_lo, double t_hi) {
    // Roots of t^2 + p4 t + p5.
    const double disc = p(3) * p(3) - 4.0 * p(4);
    if (disc < 0.0) return false;
    const double s = std::sqrt(disc);
    const double r1 = 0.5 * (-p(3) - s);
    const double r2 = 0.5 * (-p(3) + s);
    return (r1 >= t_lo && r1 <= t_hi) || (r2 >= t_lo && r2 <= t_hi);
}

double sse_of(const Params& p, const Eigen::VectorXd& t, const Eigen::VectorXd& v) {
    double sse = 0.0;
    for (long n = 0; n < t.size(); ++n) {
        const double r = v(n) - eval_rational(p, t(n));
        sse += r * r;
    }
    return sse;
}

// Gentle signals need fewer than five parameters, so the least-squares optimum
// is a ridge of equivalent fits sharing a numerator/denominator factor, most
// of which put the cancelled root inside the span. Divide the near-common root
// out and park the spare denominator root outside the span; the curve is
// unchanged up to the cancellation residual.
bool try_deflate(Params& p, double t_lo, double t_hi) {
    const double disc = p(3) * p(3) - 4.0 * p(4);
    if (disc < 0.0) return false;
    const double sq = std::sqrt(disc);
    for (const double r : {0.5 * (-p(3) - sq), 0.5 * (-p(3) + sq)}) {
        if (r < t_lo || r > t_hi) continue;
        const double num_r = p(0) * r * r + p(1) * r + p(2);
        const double num_scale = std::abs(p(0)) * std::max(1.0, r * r) +
                                 std::abs(p(1)) * std::max(1.0, std::abs(r)) + std::abs(p(2));
        if (std::abs(num_r) > 1e-4 * std::max(num_scale, 1e-30)) continue;  // a genuine pole
        const double c = p(1) + p(0) * r;   // num ~= (t - r)(p1 t + c)
        const double r2 = -p(3) - r;        // the other denominator root
        const double s = t_lo - (t_hi - t_lo) - 1.0;
        Params q;
        q(0) = p(0);
        q(1) = c - s * p(0);
        q(2) = -s * c;
        q(3) = -(s + r2);
        q(4) = s * r2;
        p = q;
        return true;
    }
    return false;
}

struct LmResult {
    Params p;
    double sse = std::numeric_limits<double>::infinity();
    bool converged = false;
};

// Damped Gauss-Newton with the analytic Jacobian of the rational model.
// Terminates when the accepted step norm drops below 1e-10, when the damping
// cannot find a descent step any more, or after 500 iterations.
LmResult levenberg_marquardt(const Eigen::VectorXd& t, const Eigen::VectorXd& v, Params p) {
    constexpr int kMaxIter = 500;
    constexpr double kStepTol = 1e-10;

    const long n = t.size();
    Eigen::MatrixXd jac(n, 5);
    Eigen::VectorXd residual(n);

    double sse = sse_of(p, t, v);
    if (!std::isfinite(sse)) return {p, sse, false};
    double lambda = 1e-3;

    for (int iter = 0; iter < kMaxIter; ++iter) {
        for (long i = 0; i < n; ++i) {
            const double ti = t(i);
            const double den = ti * ti + p(3) * ti + p(4);
            const double num = p(0) * ti * ti + p(1) * ti + p(2);
            residual(i) = v(i) - num / den;
            jac(i, 0) = ti * ti / den;
            jac(i, 1) = ti / den;
            jac(i, 2) = 1.0 / den;
            jac(i, 3) = -num * ti / (den * den);
            jac(i, 4) = -num / (den * den);
        }
        if (!residual.allFinite() || !jac.allFinite()) return {p, sse, false};

        const Eigen::Matrix<double, 5, 5> jtj = jac.transpose() * jac;
        const Params g = jac.transpose() * residual;

        bool stepped = false;
        while (lambda < 1e14) {
            Eigen::Matrix<double, 5, 5> damped = jtj;
            for (int d = 0; d < 5; ++d) damped(d, d) += lambda * std::max(jtj(d, d), 1e-12);
            const Params delta = damped.ldlt().solve(g);
            const Params trial = p + delta;
            const double trial_sse = sse_of(trial, t, v);
            if (std::isfinite(trial_sse) && trial_sse <= sse) {
                p = trial;
                sse = trial_sse;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                if (delta.norm() < kStepTol) return {p, sse, true};
                break;
            }
            lambda *= 2.0;
        }
        if (!stepped) return {p, sse, true};  // no descent direction left; treat as converged
    }
    return {p, sse, true};
}

}  // namespace

double eval_rational(const Params& p, double t) {
    return (p(0) * t * t + p(1) * t + p(2)) / (t * t + p(3) * t + p(4));
}

double eval_derivative(const RationalPolyFit& fit, double t) {
    const Params& p = fit.p;
    const double den = t * t + p(3) * t + p(4);
    if (std::abs(den) < 1e-12) throw std::domain_error("rational fit denominator vanishes");
    const double num = p(0) * t * t + p(1) * t + p(2);
    return ((2.0 * p(0) * t + p(1)) * den - num * (2.0 * t + p(3))) / (den * den);
}

RationalPolyFit fit_rational_poly(const Eigen::VectorXd& times, const Eigen::VectorXd& values,
                                  int restarts, std::uint64_t seed) {
    if (times.size() != values.size()) throw std::invalid_argument("times/values size mismatch");
    if (times.size() < 6) throw std::invalid_argument("need at least 6 samples for a 5-parameter fit");
    for (long i = 1; i < times.size(); ++i)
        if (!(times(i) > times(i - 1))) throw std::invalid_argument("times must increase");
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");

    const double t_lo = times(0);
    const double t_hi = times(times.size() - 1);
    const double t_mid = 0.5 * (t_lo + t_hi);

    // Deterministic first start: matches the curve at both endpoints for
    // monotone signals and keeps the denominator positive over the span.
    Params start0;
    start0(4) = t_mid * t_mid + 1.0;
    start0(3) = 0.0;
    start0(0) = values(values.size() - 1);
    start0(1) = 0.0;
    start0(2) = values(0) * start0(4);

    auto rng = make_rng(seed, 0x736d6f6f7468ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);

    RationalPolyFit best;
    best.fit_sse = std::numeric_limits<double>::infinity();
    bool found = false;

    // Deflation can expose a second cancelled root or a re-polish can slide
    // back into the span; keep the deflated point itself when that happens.
    auto resolve = [&](LmResult fit) -> std::optional<LmResult> {
        for (int pass = 0; pass < 3; ++pass) {
            if (!fit.converged || !std::isfinite(fit.sse)) return std::nullopt;
            if (!denominator_has_root_on(fit.p, t_lo, t_hi)) return fit;
            Params deflated = fit.p;
            if (!try_deflate(deflated, t_lo, t_hi)) return std::nullopt;  // genuine pole
            const double deflated_sse = sse_of(deflated, times, values);
            const LmResult polished = levenberg_marquardt(times, values, deflated);
            if (polished.converged && std::isfinite(polished.sse) && polished.sse <= deflated_sse &&
                !denominator_has_root_on(polished.p, t_lo, t_hi)) {
                fit = polished;
            } else {
                fit = LmResult{deflated, deflated_sse, std::isfinite(deflated_sse)};
            }
        }
        if (!fit.converged || !std::isfinite(fit.sse) ||
            denominator_has_root_on(fit.p, t_lo, t_hi))
            return std::nullopt;
        return fit;
    };

    for (int r = 0; r < restarts; ++r) {
        Params p = start0;
        if (r > 0)
            for (int d = 0; d < 5; ++d) p(d) *= std::exp(0.5 * gauss(rng));
        const auto fit = resolve(levenberg_marquardt(times, values, p));
        if (!fit) continue;
        if (!found || fit->sse < best.fit_sse) {
            best.p = fit->p;
            best.fit_sse = fit->sse;
            best.pole_free = true;
            found = true;
        }
    }
    if (!found) throw SmoothingFailure(-1, "no pole-free rational fit found");
    return best;
}

SmoothedExperiment smooth_experiment(const ExperimentSeries& series, const SmoothOptions& options) {
    const int n = series.sample_count();
    const int s_count = series.species_count();
    const int trim = options.trim;
    if (trim < 0) throw std::invalid_argument("trim must be >= 0");
    if (n < 2 * trim + 6) throw std::invalid_argument("too few samples for trim and a 5-parameter fit");

    const int kept = n - 2 * trim;
    SmoothedExperiment out;
    out.times = series.times.segment(trim, kept);
    out.concentrations = series.measured.block(trim, 0, kept, s_count);
    out.derivatives.resize(kept, s_count);
    out.fits.reserve(static_cast<size_t>(s_count));

    for (int s = 0; s < s_count; ++s) {
        RationalPolyFit fit;
        try {
            fit = fit_rational_poly(series.times, series.measured.col(s), options.restarts,
                                    derive_seed(options.seed, 0x666974ULL, static_cast<std::uint64_t>(s)));
        } catch (const SmoothingFailure&) {
            throw SmoothingFailure(s + 1, "no pole-free rational fit for species x" +
                                              std::to_string(s + 1));
        }
        for (int i = 0; i < kept; ++i) out.derivatives(i, s) = eval_derivative(fit, out.times(i));
        out.fits.push_back(fit);
    }
    return out;
}

std::vector<SmoothedExperiment> smooth_dataset(const std::vector<ExperimentSeries>& series,
                                               const SmoothOptions& options) {
    std::vector<SmoothedExperiment> out;
    out.reserve(series.size());
    for (size_t m = 0; m < series.size(); ++m) {
        SmoothOptions per = options;
        per.seed = derive_seed(options.seed, 0x65787074ULL, m);
        out.push_back(smooth_experiment(series[m], per));
    }
    return out;
}

}  // namespace crn
