#include "crn/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace crn {

namespace {

// Sort by species index and merge repeated entries into multiplicities.
std::vector<SpeciesTerm> canonicalize(std::vector<SpeciesTerm> terms) {
    std::map<int, int> merged;
    for (const auto& t : terms) {
        if (t.species < 1) throw std::invalid_argument("species index must be >= 1");
        if (t.multiplicity < 1) throw std::invalid_argument("multiplicity must be >= 1");
        merged[t.species] += t.multiplicity;
    }
    std::vector<SpeciesTerm> out;
    out.reserve(merged.size());
    for (const auto& [species, mult] : merged) out.push_back({species, mult});
    return out;
}

int total_multiplicity(const std::vector<SpeciesTerm>& terms) {
    int total = 0;
    for (const auto& t : terms) total += t.multiplicity;
    return total;
}

// Column-sign rule: the net stoichiometric column must contain at least one
// strictly negative and one strictly positive entry, otherwise the candidate
// is not an admissible reaction (it is read as "no reaction occurring").
bool column_has_both_signs(const std::vector<SpeciesTerm>& reactants,
                           const std::vector<SpeciesTerm>& products) {
    std::map<int, int> net;
    for (const auto& t : reactants) net[t.species] -= t.multiplicity;
    for (const auto& t : products) net[t.species] += t.multiplicity;
    bool has_neg = false, has_pos = false;
    for (const auto& [species, n] : net) {
        if (n < 0) has_neg = true;
        if (n > 0) has_pos = true;
    }
    return has_neg && has_pos;
}

std::string term_to_string(const SpeciesTerm& t) {
    std::string s;
    if (t.multiplicity > 1) s += std::to_string(t.multiplicity) + "*";
    s += "x" + std::to_string(t.species);
    return s;
}

std::string side_to_string(const std::vector<SpeciesTerm>& terms) {
    std::string s;
    for (size_t i = 0; i < terms.size(); ++i) {
        if (i > 0) s += " + ";
        s += term_to_string(terms[i]);
    }
    return s;
}

std::string format_coefficient(double k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", k);
    return buf;
}

}  // namespace

Reaction::Reaction(std::vector<SpeciesTerm> reactants, std::vector<SpeciesTerm> products,
                   std::optional<double> rate_coefficient)
    : reactants_(canonicalize(std::move(reactants))),
      products_(canonicalize(std::move(products))),
      rate_(rate_coefficient) {
    const int r = total_multiplicity(reactants_);
    const int p = total_multiplicity(products_);
    if (r < 1 || r > 2) throw std::invalid_argument("total reactant multiplicity must be 1 or 2");
    if (p < 1 || p > 3) throw std::invalid_argument("total product multiplicity must be 1..3");
    if (!column_has_both_signs(reactants_, products_))
        throw std::invalid_argument("stoichiometric column must have a negative and a positive entry");
    if (rate_ && (!(*rate_ >= 0.0) || !std::isfinite(*rate_)))
        throw std::invalid_argument("rate coefficient must be finite and >= 0");
}

Reaction Reaction::with_rate(double k) const {
    Reaction r = *this;
    if (!(k >= 0.0) || !std::isfinite(k))
        throw std::invalid_argument("rate coefficient must be finite and >= 0");
    r.rate_ = k;
    return r;
}

int Reaction::reactant_order() const { return total_multiplicity(reactants_); }
int Reaction::product_order() const { return total_multiplicity(products_); }

int Reaction::net_coefficient(int species) const {
    int n = 0;
    for (const auto& t : products_)
        if (t.species == species) n += t.multiplicity;
    for (const auto& t : reactants_)
        if (t.species == species) n -= t.multiplicity;
    return n;
}

int Reaction::max_species() const {
    int m = 0;
    for (const auto& t : reactants_) m = std::max(m, t.species);
    for (const auto& t : products_) m = std::max(m, t.species);
    return m;
}

double Reaction::unscaled_rate_term(const Eigen::VectorXd& concentrations) const {
    double term = 1.0;
    for (const auto& t : reactants_)
        for (int m = 0; m < t.multiplicity; ++m)
            term *= concentrations(t.species - 1);
    return term;
}

double Reaction::mass_action_rate(const Eigen::VectorXd& concentrations) const {
    if (!rate_) throw std::logic_error("mass_action_rate: rate coefficient is unset");
    return *rate_ * unscaled_rate_term(concentrations);
}

bool operator<(const Reaction& a, const Reaction& b) {
    auto as_tuple = [](const Reaction& r) {
        std::vector<std::pair<int, int>> v;
        for (const auto& t : r.reactants_) v.emplace_back(t.species, t.multiplicity);
        v.emplace_back(-1, -1);  // side separator
        for (const auto& t : r.products_) v.emplace_back(t.species, t.multiplicity);
        return v;
    };
    return as_tuple(a) < as_tuple(b);
}

std::optional<Reaction> try_make_reaction(std::vector<SpeciesTerm> reactants,
                                          std::vector<SpeciesTerm> products,
                                          std::optional<double> rate) {
    if (reactants.empty() || products.empty()) return std::nullopt;
    auto r = canonicalize(std::move(reactants));
    auto p = canonicalize(std::move(products));
    const int ro = total_multiplicity(r);
    const int po = total_multiplicity(p);
    if (ro < 1 || ro > 2 || po < 1 || po > 3) return std::nullopt;
    if (!column_has_both_signs(r, p)) return std::nullopt;
    return Reaction(std::move(r), std::move(p), rate);
}

std::string to_string(const Reaction& r) {
    std::string s = r.rate_coefficient() ? format_coefficient(*r.rate_coefficient()) : "?";
    s += ": " + side_to_string(r.reactants()) + " -> " + side_to_string(r.products());
    return s;
}

ReactionNetwork::ReactionNetwork(int species_count, std::vector<Reaction> reactions)
    : species_count_(species_count), reactions_(std::move(reactions)) {
    if (species_count_ < 1) throw std::invalid_argument("species_count must be >= 1");
    std::set<std::pair<std::vector<SpeciesTerm>, std::vector<SpeciesTerm>>> seen;
    auto key = [](const Reaction& r) { return std::make_pair(r.reactants(), r.products()); };
    for (const auto& r : reactions_) {
        if (r.max_species() > species_count_)
            throw std::invalid_argument("reaction references species beyond species_count");
        if (!seen.insert(key(r)).second)
            throw std::invalid_argument("structurally duplicate reactions are not allowed");
    }
}

ReactionNetwork ReactionNetwork::with_rates(const Eigen::VectorXd& k) const {
    if (k.size() != reaction_count())
        throw std::invalid_argument("rate vector length must equal reaction count");
    std::vector<Reaction> rs;
    rs.reserve(reactions_.size());
    for (int j = 0; j < reaction_count(); ++j) rs.push_back(reactions_[static_cast<size_t>(j)].with_rate(k(j)));
    return ReactionNetwork(species_count_, std::move(rs));
}

ReactionNetwork ReactionNetwork::subset(const std::vector<int>& indices) const {
    std::vector<Reaction> rs;
    rs.reserve(indices.size());
    for (int j : indices) rs.push_back(reactions_.at(static_cast<size_t>(j)));
    return ReactionNetwork(species_count_, std::move(rs));
}

Eigen::VectorXd ReactionNetwork::rate_vector() const {
    Eigen::VectorXd k(reaction_count());
    for (int j = 0; j < reaction_count(); ++j) {
        const auto& r = reactions_[static_cast<size_t>(j)].rate_coefficient();
        if (!r) throw std::logic_error("rate_vector: unset rate coefficient");
        k(j) = *r;
    }
    return k;
}

bool ReactionNetwork::all_rates_set() const {
    return std::all_of(reactions_.begin(), reactions_.end(),
                       [](const Reaction& r) { return r.rate_coefficient().has_value(); });
}

std::string ReactionNetwork::canonical_key() const {
    std::vector<Reaction> sorted = reactions_;
    std::sort(sorted.begin(), sorted.end());
    std::string key;
    for (const auto& r : sorted) {
        for (const auto& t : r.reactants())
            for (int m = 0; m < t.multiplicity; ++m) key += static_cast<char>(t.species);
        key += '\0';
        for (const auto& t : r.products())
            for (int m = 0; m < t.multiplicity; ++m) key += static_cast<char>(t.species);
        key += '\1';
    }
    return key;
}

Eigen::MatrixXi stoichiometric_matrix(const ReactionNetwork& network) {
    Eigen::MatrixXi n = Eigen::MatrixXi::Zero(network.species_count(), network.reaction_count());
    for (int j = 0; j < network.reaction_count(); ++j) {
        const Reaction& r = network.reaction(j);
        for (const auto& t : r.reactants()) n(t.species - 1, j) -= t.multiplicity;
        for (const auto& t : r.products()) n(t.species - 1, j) += t.multiplicity;
    }
    return n;
}

Eigen::VectorXd flux(const ReactionNetwork& network, const Eigen::VectorXd& concentrations) {
    if (concentrations.size() != network.species_count())
        throw std::invalid_argument("concentration vector length must equal species_count");
    Eigen::VectorXd f = Eigen::VectorXd::Zero(network.species_count());
    for (int j = 0; j < network.reaction_count(); ++j) {
        const Reaction& r = network.reaction(j);
        const double rate = r.mass_action_rate(concentrations);
        for (const auto& t : r.reactants()) f(t.species - 1) -= t.multiplicity * rate;
        for (const auto& t : r.products()) f(t.species - 1) += t.multiplicity * rate;
    }
    return f;
}

std::string to_string(const ReactionNetwork& network) {
    std::ostringstream os;
    os << network.species_count() << " species, " << network.reaction_count() << " reactions\n";
    for (const auto& r : network.reactions()) os << "  " << to_string(r) << "\n";
    return os.str();
}

ConservationMatrix::ConservationMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1)
        throw std::invalid_argument("conservation matrix must be at least 1 x 1");
    for (int i = 0; i < values_.cols(); ++i)
        if (values_.col(i).isZero(0.0))
            throw std::invalid_argument("conservation matrix has an all-zero species column");
}

}  // namespace crn
