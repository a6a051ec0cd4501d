#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace crn {

/// One species term of a reaction side. Species are indexed 1..S; index 0 is
/// reserved for the "empty" slot of the integer encoding and never appears here.
struct SpeciesTerm {
    int species = 0;
    int multiplicity = 1;

    friend auto operator<=>(const SpeciesTerm&, const SpeciesTerm&) = default;
};

/// An elementary reaction: at most two reactant molecules and three product
/// molecules in total. Terms are kept in canonical form (ascending species
/// index, multiplicities merged), so structurally identical reactions compare
/// equal regardless of the order they were written in.
class Reaction {
public:
    Reaction(std::vector<SpeciesTerm> reactants, std::vector<SpeciesTerm> products,
             std::optional<double> rate_coefficient = std::nullopt);

    const std::vector<SpeciesTerm>& reactants() const { return reactants_; }
    const std::vector<SpeciesTerm>& products() const { return products_; }
    std::optional<double> rate_coefficient() const { return rate_; }

    Reaction with_rate(double k) const;

    int reactant_order() const;  // total reactant multiplicity, 1 or 2
    int product_order() const;   // total product multiplicity, 1..3

    /// Net stoichiometric change of `species` in this reaction.
    int net_coefficient(int species) const;

    /// Largest species index referenced.
    int max_species() const;

    /// k * prod [x_i]^multiplicity. Requires the rate coefficient to be set.
    double mass_action_rate(const Eigen::VectorXd& concentrations) const;

    /// prod [x_i]^multiplicity without the rate coefficientfactor. Used for the
    /// regression design matrix, where concentrations may be noisy (negative
    /// values are accepted).
    double unscaled_rate_term(const Eigen::VectorXd& concentrations) const;

    /// Structural equality; the rate coefficient is ignored.
    friend bool operator==(const Reaction& a, const Reaction& b) {
        return a.reactants_ == b.reactants_ && a.products_ == b.products_;
    }

    /// Lexicographic order on the canonical form; used for network-level
    /// canonical keys. Ignores the rate coefficient.
    friend bool operator<(const Reaction& a, const Reaction& b);

private:
    std::vector<SpeciesTerm> reactants_;
    std::vector<SpeciesTerm> products_;
    std::optional<double> rate_;
};

/// Builds a reaction if the term lists describe an admissible one: at least one
/// reactant and one product within the order limits, and a net stoichiometric
/// column with at least one negative and one positive entry. Returns nullopt
/// otherwise (used by the genome decoder, which excludes such candidates).
std::optional<Reaction> try_make_reaction(std::vector<SpeciesTerm> reactants,
                                          std::vector<SpeciesTerm> products,
                                          std::optional<double> rate = std::nullopt);

/// `k: x1 + x2 -> 2*x3` style notation; multiplicities printed only when > 1.
std::string to_string(const Reaction& r);

/// An ordered list of elementary reactions over species 1..S.
class ReactionNetwork {
public:
    explicit ReactionNetwork(int species_count, std::vector<Reaction> reactions = {});

    int species_count() const { return species_count_; }
    int reaction_count() const { return static_cast<int>(reactions_.size()); }
    bool empty() const { return reactions_.empty(); }
    const std::vector<Reaction>& reactions() const { return reactions_; }
    const Reaction& reaction(int j) const { return reactions_.at(static_cast<size_t>(j)); }

    /// Copy with the rate coefficients replaced by `k` (one per reaction).
    ReactionNetwork with_rates(const Eigen::VectorXd& k) const;

    /// Copy containing only the reactions at `indices`, order preserved.
    ReactionNetwork subset(const std::vector<int>& indices) const;

    /// Ordered extraction of the rate coefficients. Throws if any is unset.
    Eigen::VectorXd rate_vector() const;

    bool all_rates_set() const;

    /// Reactions sorted canonically; reaction order and rates are ignored, so
    /// two networks with equal keys are structurally identical.
    std::string canonical_key() const;

private:
    int species_count_ = 0;
    std::vector<Reaction> reactions_;
};

/// S x q matrix of net stoichiometric coefficients n_ij, column j for reaction j.
Eigen::MatrixXi stoichiometric_matrix(const ReactionNetwork& network);

/// N * r evaluated at `concentrations`: the time derivative of every species
/// under mass-action kinetics. All rate coefficients must be set.
Eigen::VectorXd flux(const ReactionNetwork& network, const Eigen::VectorXd& concentrations);

std::string to_string(const ReactionNetwork& network);

/// C x S matrix of reaction-invariant properties (for example molecular-weight
/// ratios). Every species must have at least one nonzero conserved property.
class ConservationMatrix {
public:
    explicit ConservationMatrix(Eigen::MatrixXd values);

    const Eigen::MatrixXd& values() const { return values_; }
    int property_count() const { return static_cast<int>(values_.rows()); }
    int species_count() const { return static_cast<int>(values_.cols()); }

private:
    Eigen::MatrixXd values_;
};

}  // namespace crn
