#pragma once

#include "crn/network.hpp"

#include <Eigen/Dense>

#include <vector>

namespace crn {

inline constexpr int kSlotsPerReaction = 5;  // two reactant slots, three product slots
inline constexpr double kBoundsDelta = 1e-6;

/// Per-element search bounds for genome values. All 5*q_max slots share the
/// same interval; the small delta keeps exact .5 values unreachable so that
/// rounding maps equal lengths of the real line onto each integer 0..S.
struct GenomeBounds {
    double lo = 0.0;
    double hi = 0.0;
};

GenomeBounds genome_bounds(int species_count, int q_max);

/// The DE's search variable: a real vector of length 5*q_max whose rounded
/// form encodes a trial network topology over `species_count` species.
struct Genome {
    Eigen::VectorXd values;
    int species_count = 0;
    int q_max = 0;

    int length() const { return static_cast<int>(values.size()); }
};

Genome make_genome(Eigen::VectorXd values, int species_count, int q_max);

/// Element-wise round-to-nearest (halves away from zero). Throws if any
/// element is outside the genome bounds.
std::vector<int> round_genome(const Genome& genome);

struct DecodedNetwork {
    ReactionNetwork network;
    int raw_reaction_count = 0;  // encoded 5-tuples with at least one nonzero slot
    int excluded_count = 0;      // candidates dropped by the no-reaction rule
    int duplicate_count = 0;     // structural duplicates removed
};

/// Reads consecutive 5-tuples (r1, r2, p1, p2, p3); zeros switch a slot off.
/// Candidates with no reactants, no products, or a stoichiometric column
/// lacking a positive or negative entry are excluded; survivors are
/// canonicalized and structural duplicates removed (first occurrence kept).
DecodedNetwork decode(const std::vector<int>& ints, int species_count, int q_max);

DecodedNetwork decode(const Genome& genome);

/// Canonical slot arrangement for a network: reactions in canonical order,
/// each side packed ascending, unused slots zero. Inverse of decode up to
/// canonical form. Throws if the network has more than q_max reactions.
std::vector<int> encode_slots(const ReactionNetwork& network, int q_max);

}  // namespace crn
