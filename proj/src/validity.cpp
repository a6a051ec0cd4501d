#include "crn/validity.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace crn {

namespace {

constexpr double kRankCutoff = 1e-10;  // relative singular-value cutoff
constexpr double kZeroRowTol = 1e-9;   // absolute, on an orthonormal basis

bool is_integer_matrix(const Eigen::MatrixXd& a) {
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            if (a(i, j) != std::nearbyint(a(i, j)) || std::abs(a(i, j)) > 1e15) return false;
    return true;
}

}  // namespace

std::string to_string(ValidityReason reason) {
    switch (reason) {
        case ValidityReason::valid: return "valid";
        case ValidityReason::conservation_violated: return "conservation_violated";
        case ValidityReason::no_nullspace: return "no_nullspace";
        case ValidityReason::zero_row_in_nullspace: return "zero_row_in_nullspace";
    }
    return "unknown";
}

bool conservation_valid(const Eigen::MatrixXi& n_matrix, const ConservationMatrix& a) {
    if (a.species_count() != n_matrix.rows())
        throw std::invalid_argument("conservation matrix column count must equal species count");
    if (n_matrix.cols() == 0) return true;

    const Eigen::MatrixXd& av = a.values();
    if (is_integer_matrix(av)) {
        for (long c = 0; c < av.rows(); ++c)
            for (long j = 0; j < n_matrix.cols(); ++j) {
                std::int64_t dot = 0;
                for (long i = 0; i < n_matrix.rows(); ++i)
                    dot += static_cast<std::int64_t>(std::llround(av(c, i))) * n_matrix(i, j);
                if (dot != 0) return false;
            }
        return true;
    }
    const double tol = 1e-9 * av.cwiseAbs().maxCoeff();
    return (av * n_matrix.cast<double>()).cwiseAbs().maxCoeff() < tol;
}

Eigen::MatrixXd transpose_nullspace_basis(const Eigen::MatrixXi& n_matrix) {
    const long s = n_matrix.rows();
    const long q = n_matrix.cols();
    if (q == 0) return Eigen::MatrixXd::Identity(s, s);

    const Eigen::MatrixXd nt = n_matrix.transpose().cast<double>();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(nt, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = kRankCutoff * sv(0);
    long rank = 0;
    for (long i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    return svd.matrixV().rightCols(s - rank);
}

bool nullspace_valid(const Eigen::MatrixXi& n_matrix) {
    const Eigen::MatrixXd basis = transpose_nullspace_basis(n_matrix);
    if (basis.cols() == 0) return false;
    for (long i = 0; i < basis.rows(); ++i)
        if (basis.row(i).cwiseAbs().maxCoeff() < kZeroRowTol) return false;
    return true;
}

ValidityVerdict assess(const ReactionNetwork& network,
                       const std::optional<ConservationMatrix>& conservation, int q_max) {
    const Eigen::MatrixXi n_matrix = stoichiometric_matrix(network);
    ValidityVerdict verdict;
    if (conservation) {
        verdict.valid = conservation_valid(n_matrix, *conservation);
        verdict.reason = verdict.valid ? ValidityReason::valid : ValidityReason::conservation_violated;
    } else {
        const Eigen::MatrixXd basis = transpose_nullspace_basis(n_matrix);
        if (basis.cols() == 0) {
            verdict.valid = false;
            verdict.reason = ValidityReason::no_nullspace;
        } else {
            verdict.valid = true;
            verdict.reason = ValidityReason::valid;
            for (long i = 0; i < basis.rows(); ++i)
                if (basis.row(i).cwiseAbs().maxCoeff() < kZeroRowTol) {
                    verdict.valid = false;
                    verdict.reason = ValidityReason::zero_row_in_nullspace;
                    break;
                }
        }
    }
    verdict.alpha = verdict.valid ? 0 : q_max;
    return verdict;
}

}  // namespace crn
