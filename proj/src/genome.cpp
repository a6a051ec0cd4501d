#include "crn/genome.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace crn {

GenomeBounds genome_bounds(int species_count, int q_max) {
    if (species_count < 1) throw std::invalid_argument("species_count must be >= 1");
    if (q_max < 1) throw std::invalid_argument("q_max must be >= 1");
    return {-0.5 + kBoundsDelta, species_count + 0.5 - kBoundsDelta};
}

Genome make_genome(Eigen::VectorXd values, int species_count, int q_max) {
    if (values.size() != kSlotsPerReaction * static_cast<long>(q_max))
        throw std::invalid_argument("genome length must be 5 * q_max");
    const auto [lo, hi] = genome_bounds(species_count, q_max);
    for (long j = 0; j < values.size(); ++j)
        if (!(values(j) >= lo && values(j) <= hi))
            throw std::invalid_argument("genome element out of bounds");
    return Genome{std::move(values), species_count, q_max};
}

std::vector<int> round_genome(const Genome& genome) {
    const auto [lo, hi] = genome_bounds(genome.species_count, genome.q_max);
    std::vector<int> ints(static_cast<size_t>(genome.length()));
    for (int j = 0; j < genome.length(); ++j) {
        const double z = genome.values(j);
        if (!(z >= lo && z <= hi)) throw std::invalid_argument("genome element out of bounds");
        ints[static_cast<size_t>(j)] = static_cast<int>(std::lround(z));
    }
    return ints;
}

DecodedNetwork decode(const std::vector<int>& ints, int species_count, int q_max) {
    if (static_cast<int>(ints.size()) != kSlotsPerReaction * q_max)
        throw std::invalid_argument("integer vector length must be 5 * q_max");
    for (int v : ints)
        if (v < 0 || v > species_count) throw std::invalid_argument("encoded value out of range 0..S");

    std::vector<Reaction> reactions;
    std::set<std::pair<std::vector<SpeciesTerm>, std::vector<SpeciesTerm>>> seen;
    int raw = 0, excluded = 0, duplicates = 0;
    for (int slot = 0; slot < q_max; ++slot) {
        const int* t = ints.data() + kSlotsPerReaction * slot;
        if (std::all_of(t, t + kSlotsPerReaction, [](int v) { return v == 0; })) continue;
        ++raw;
        std::vector<SpeciesTerm> reactants, products;
        for (int i = 0; i < 2; ++i)
            if (t[i] != 0) reactants.push_back({t[i], 1});
        for (int i = 2; i < 5; ++i)
            if (t[i] != 0) products.push_back({t[i], 1});
        auto candidate = try_make_reaction(std::move(reactants), std::move(products));
        if (!candidate) {
            ++excluded;
            continue;
        }
        if (!seen.insert({candidate->reactants(), candidate->products()}).second) {
            ++duplicates;
            continue;
        }
        reactions.push_back(std::move(*candidate));
    }
    return DecodedNetwork{ReactionNetwork(species_count, std::move(reactions)), raw, excluded,
                          duplicates};
}

DecodedNetwork decode(const Genome& genome) {
    return decode(round_genome(genome), genome.species_count, genome.q_max);
}

std::vector<int> encode_slots(const ReactionNetwork& network, int q_max) {
    if (network.reaction_count() > q_max)
        throw std::invalid_argument("network has more reactions than q_max");
    std::vector<Reaction> sorted = network.reactions();
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> ints(static_cast<size_t>(kSlotsPerReaction * q_max), 0);
    for (size_t j = 0; j < sorted.size(); ++j) {
        int* t = ints.data() + kSlotsPerReaction * j;
        int i = 0;
        for (const auto& term : sorted[j].reactants())
            for (int m = 0; m < term.multiplicity; ++m) t[i++] = term.species;
        i = 2;
        for (const auto& term : sorted[j].products())
            for (int m = 0; m < term.multiplicity; ++m) t[i++] = term.species;
    }
    return ints;
}

}  // namespace crn
