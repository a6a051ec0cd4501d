#include "crn/regression.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

namespace crn {

long stacked_sample_count(const std::vector<SmoothedExperiment>& smoothed) {
    long n = 0;
    for (const auto& e : smoothed) n += static_cast<long>(e.kept_count()) * e.species_count();
    return n;
}

DesignSystem build_design(const ReactionNetwork& network,
                          const std::vector<SmoothedExperiment>& smoothed) {
    if (network.empty()) throw std::invalid_argument("build_design requires a nonempty network");
    if (smoothed.empty()) throw std::invalid_argument("build_design requires experiments");
    const int s_count = network.species_count();
    for (const auto& e : smoothed)
        if (e.species_count() != s_count)
            throw std::invalid_argument("experiment species count mismatch");

    const int q = network.reaction_count();
    const Eigen::MatrixXi n_mat = stoichiometric_matrix(network);
    const long rows = stacked_sample_count(smoothed);

    DesignSystem sys;
    sys.X.resize(rows, q);
    sys.y.resize(rows);

    long row0 = 0;
    Eigen::VectorXd x(s_count);
    for (const auto& e : smoothed) {
        const int kept = e.kept_count();
        // Unscaled kinetic terms of every reaction at every kept time.
        Eigen::MatrixXd terms(kept, q);
        for (int n = 0; n < kept; ++n) {
            x = e.concentrations.row(n).transpose();
            for (int j = 0; j < q; ++j) terms(n, j) = network.reaction(j).unscaled_rate_term(x);
        }
        for (int i = 0; i < s_count; ++i) {
            for (int j = 0; j < q; ++j)
                sys.X.block(row0 + static_cast<long>(i) * kept, j, kept, 1) =
                    static_cast<double>(n_mat(i, j)) * terms.col(j);
            sys.y.segment(row0 + static_cast<long>(i) * kept, kept) = e.derivatives.col(i);
        }
        row0 += static_cast<long>(s_count) * kept;
    }
    return sys;
}

Eigen::VectorXd solve_rates(const DesignSystem& system) {
    if (system.X.cols() < 1) throw std::invalid_argument("solve_rates requires q >= 1");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(system.X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    return svd.solve(system.y);
}

RateFit prune_and_fit(const ReactionNetwork& network,
                      const std::vector<SmoothedExperiment>& smoothed,
                      const RegressionOptions& options) {
    RateFit fit{ReactionNetwork(network.species_count()), Eigen::VectorXd(0),
                std::numeric_limits<double>::infinity(), 0};

    std::vector<int> survivors(static_cast<size_t>(network.reaction_count()));
    std::iota(survivors.begin(), survivors.end(), 0);

    Eigen::VectorXd k;
    while (!survivors.empty()) {
        const ReactionNetwork current = network.subset(survivors);
        const DesignSystem sys = build_design(current, smoothed);
        k = solve_rates(sys);

        std::vector<int> next;
        next.reserve(survivors.size());
        std::vector<int> kept_positions;
        for (int j = 0; j < static_cast<int>(survivors.size()); ++j) {
            if (k(j) > options.prune_threshold) {
                next.push_back(survivors[static_cast<size_t>(j)]);
                kept_positions.push_back(j);
            }
        }
        fit.pruned_count += static_cast<int>(survivors.size() - next.size());

        if (next.size() == survivors.size()) {
            // All coefficients positive: this is the rectified network.
            fit.network = current.with_rates(k);
            fit.k = k;
            fit.sse_d = (sys.y - sys.X * k).squaredNorm();
            return fit;
        }
        if (next.empty()) break;

        if (options.single_pass) {
            // Keep the first-solve coefficients for the survivors and score
            // the rectified network with them, without re-fitting.
            Eigen::VectorXd k_kept(static_cast<long>(kept_positions.size()));
            Eigen::MatrixXd x_kept(sys.X.rows(), static_cast<long>(kept_positions.size()));
            for (size_t c = 0; c < kept_positions.size(); ++c) {
                k_kept(static_cast<long>(c)) = k(kept_positions[c]);
                x_kept.col(static_cast<long>(c)) = sys.X.col(kept_positions[c]);
            }
            fit.network = network.subset(next).with_rates(k_kept);
            fit.k = k_kept;
            fit.sse_d = (sys.y - x_kept * k_kept).squaredNorm();
            return fit;
        }
        survivors = std::move(next);
    }
    return fit;  // nothing survived: empty network, infinite SSE_D
}

}  // namespace crn
