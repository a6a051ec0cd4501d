#include "crn/integrate.hpp"

#include <algorithm>
#include <map>
#include <cmath>
#include <limits>

namespace crn {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Coefficients of the fourth-order continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0, const Eigen::VectorXd& y1,
                  double atol, double rtol) {
    double sum = 0.0;
    for (long i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        const double e = err(i) / sc;
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(err.size()));
}

double initial_step(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0,
                    const Eigen::VectorXd& f0, double span, double atol, double rtol) {
    auto scaled_rms = [&](const Eigen::VectorXd& v) {
        double sum = 0.0;
        for (long i = 0; i < v.size(); ++i) {
            const double sc = atol + rtol * std::abs(y0(i));
            sum += (v(i) / sc) * (v(i) / sc);
        }
        return std::sqrt(sum / static_cast<double>(v.size()));
    };
    const double d0 = scaled_rms(y0);
    const double dd1 = scaled_rms(f0);
    double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
    h0 = std::min(h0, span);
    Eigen::VectorXd y1 = y0 + h0 * f0;
    Eigen::VectorXd f1(y0.size());
    rhs(t0 + h0, y1, f1);
    if (!f1.allFinite()) return std::min(1e-6, span);
    const double d2 = scaled_rms(f1 - f0) / h0;
    const double dmax = std::max(dd1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    return std::min({100.0 * h0, h1, span});
}

struct CompiledReaction {
    double k = 0.0;
    int r1 = -1, r2 = -1;                      // reactant indices (0-based), r2 < 0 if unimolecular
    std::vector<std::pair<int, int>> changes;  // (species index, net coefficient)
};

std::vector<CompiledReaction> compile_network(const ReactionNetwork& network) {
    std::vector<CompiledReaction> out;
    out.reserve(static_cast<size_t>(network.reaction_count()));
    for (const auto& r : network.reactions()) {
        CompiledReaction c;
        c.k = r.rate_coefficient().value();
        std::vector<int> ridx;
        for (const auto& t : r.reactants())
            for (int m = 0; m < t.multiplicity; ++m) ridx.push_back(t.species - 1);
        c.r1 = ridx[0];
        if (ridx.size() > 1) c.r2 = ridx[1];
        std::map<int, int> net;
        for (const auto& t : r.reactants()) net[t.species - 1] -= t.multiplicity;
        for (const auto& t : r.products()) net[t.species - 1] += t.multiplicity;
        for (const auto& [sp, n] : net)
            if (n != 0) c.changes.emplace_back(sp, n);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

int ExperimentSpec::sample_count() const {
    if (!(t_end > t_start) || !(sample_interval > 0))
        throw std::invalid_argument("experiment spec requires t_end > t_start and interval > 0");
    return static_cast<int>(std::lround((t_end - t_start) / sample_interval)) + 1;
}

Eigen::VectorXd ExperimentSpec::sample_times() const {
    const int n = sample_count();
    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) t(i) = t_start + i * sample_interval;
    t(n - 1) = std::min(t(n - 1), t_end);
    return t;
}

IntegrationFailure::IntegrationFailure(OdeStatus status, double last_valid_time)
    : std::runtime_error("ODE integration failed at t = " + std::to_string(last_valid_time)),
      status_(status),
      last_valid_time_(last_valid_time) {}

OdeResult integrate_ode(const OdeRhs& rhs, const Eigen::VectorXd& x0, const Eigen::VectorXd& times,
                        const IntegratorOptions& options) {
    const long n = x0.size();
    const long nt = times.size();
    if (nt < 1) throw std::invalid_argument("need at least one sample time");
    for (long i = 1; i < nt; ++i)
        if (!(times(i) > times(i - 1))) throw std::invalid_argument("sample times must increase");

    OdeResult result;
    result.samples = Eigen::MatrixXd::Zero(nt, n);
    result.samples.row(0) = x0.transpose();
    result.last_valid_time = times(0);
    if (!x0.allFinite()) {
        result.status = OdeStatus::nonfinite;
        return result;
    }
    if (nt == 1) return result;

    const double t_end = times(nt - 1);
    double t = times(0);
    Eigen::VectorXd y = x0;
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y1(n), err(n);
    rhs(t, y, k1);
    if (!k1.allFinite()) {
        result.status = OdeStatus::nonfinite;
        return result;
    }

    double h = initial_step(rhs, t, y, k1, t_end - t, options.abs_tol, options.rel_tol);
    long next_sample = 1;
    bool last_rejected = false;

    for (long step = 0; step < options.max_steps; ++step) {
        if (h > t_end - t) h = t_end - t;
        const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0);
        if (h < h_min) {
            result.status = OdeStatus::step_underflow;
            result.last_valid_time = t;
            return result;
        }

        ytmp = y + h * (a21 * k1);
        rhs(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, y1, k7);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double err_norm_value =
            y1.allFinite() && err.allFinite()
                ? error_norm(err, y, y1, options.abs_tol, options.rel_tol)
                : std::numeric_limits<double>::infinity();

        if (err_norm_value <= 1.0) {
            // Accepted; fill samples covered by [t, t+h] with the dense formula.
            const Eigen::VectorXd ydiff = y1 - y;
            const Eigen::VectorXd bspl = h * k1 - ydiff;
            const Eigen::VectorXd rcont4 = ydiff - h * k7 - bspl;
            const Eigen::VectorXd rcont5 =
                h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            const double t_new = t + h;
            const double sample_eps = 1e-12 * std::max(1.0, std::abs(t_new));
            while (next_sample < nt && times(next_sample) <= t_new + sample_eps) {
                const double theta = std::clamp((times(next_sample) - t) / h, 0.0, 1.0);
                result.samples.row(next_sample) =
                    (y + theta * (ydiff + (1.0 - theta) * (bspl + theta * (rcont4 + (1.0 - theta) * rcont5))))
                        .transpose();
                ++next_sample;
            }
            t = t_new;
            y.swap(y1);
            k1.swap(k7);
            result.last_valid_time = t;
            if (y.cwiseAbs().maxCoeff() > options.max_state) {
                result.status = OdeStatus::diverged;
                return result;
            }
            if (next_sample >= nt || t >= t_end - 1e-14 * std::max(1.0, std::abs(t_end))) {
                result.status = OdeStatus::ok;
                return result;
            }
            double fac = 0.9 * std::pow(err_norm_value, -0.2);
            if (!std::isfinite(fac)) fac = 10.0;  // err == 0
            fac = std::clamp(fac, 0.2, 10.0);
            if (last_rejected) fac = std::min(fac, 1.0);
            h *= fac;
            last_rejected = false;
        } else {
            double fac = std::isfinite(err_norm_value) ? 0.9 * std::pow(err_norm_value, -0.2) : 0.2;
            h *= std::clamp(fac, 0.2, 0.9);
            last_rejected = true;
        }
    }
    result.status = OdeStatus::step_underflow;
    result.last_valid_time = t;
    return result;
}

TryIntegrateResult try_integrate(const ReactionNetwork& network, const Eigen::VectorXd& x0,
                                 const Eigen::VectorXd& times, const IntegratorOptions& options) {
    if (x0.size() != network.species_count())
        throw std::invalid_argument("initial state length must equal species_count");
    if (!network.all_rates_set()) throw std::logic_error("integrate: unset rate coefficient");

    const auto compiled = compile_network(network);
    OdeRhs rhs = [&compiled](double, const Eigen::VectorXd& x, Eigen::VectorXd& dxdt) {
        dxdt.setZero();
        for (const auto& r : compiled) {
            double rate = r.k * x(r.r1);
            if (r.r2 >= 0) rate *= x(r.r2);
            for (const auto& [sp, n] : r.changes) dxdt(sp) += n * rate;
        }
    };
    OdeResult r = integrate_ode(rhs, x0, times, options);
    return TryIntegrateResult{r.status, r.last_valid_time, std::move(r.samples)};
}

ExperimentSeries integrate(const ReactionNetwork& network, const ExperimentSpec& spec,
                           const IntegratorOptions& options) {
    for (long i = 0; i < spec.initial_concentrations.size(); ++i)
        if (spec.initial_concentrations(i) < 0.0)
            throw std::invalid_argument("initial concentrations must be >= 0");
    const Eigen::VectorXd times = spec.sample_times();
    TryIntegrateResult r = try_integrate(network, spec.initial_concentrations, times, options);
    if (r.status != OdeStatus::ok) throw IntegrationFailure(r.status, r.last_valid_time);
    ExperimentSeries series;
    series.times = times;
    series.measured = r.samples;
    series.truth = r.samples;
    return series;
}

}  // namespace crn
