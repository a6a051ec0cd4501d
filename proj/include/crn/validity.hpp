#pragma once

#include "crn/network.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace crn {

enum class ValidityReason { valid, conservation_violated, no_nullspace, zero_row_in_nullspace };

std::string to_string(ValidityReason reason);

/// Physical-realisability verdict for a rectified network; alpha is the
/// complexity penalty exponent (0 when valid, q_max otherwise).
struct ValidityVerdict {
    bool valid = false;
    int alpha = 0;
    ValidityReason reason = ValidityReason::valid;
};

/// True iff A N == 0. Exact integer arithmetic when every entry of A is an
/// integer, otherwise entries below 1e-9 times the largest |A| entry count as
/// zero. Throws on a dimension mismatch.
bool conservation_valid(const Eigen::MatrixXi& n_matrix, const ConservationMatrix& a);

/// True iff the nullspace of N^T is nonempty and its orthonormal basis has no
/// all-zero row (a species all of whose possible conserved properties vanish).
bool nullspace_valid(const Eigen::MatrixXi& n_matrix);

/// Orthonormal nullspace basis of N^T (S x d). Exposed for diagnostics/tests.
Eigen::MatrixXd transpose_nullspace_basis(const Eigen::MatrixXi& n_matrix);

/// Conservation check when A is available, nullspace check otherwise.
ValidityVerdict assess(const ReactionNetwork& network,
                       const std::optional<ConservationMatrix>& conservation, int q_max);

}  // namespace crn
