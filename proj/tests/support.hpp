#pragma once

// Shared fixtures: the shipped scenario and its synthesized gains, built once
// per test binary.

#include "etc/io.hpp"
#include "etc/simulation.hpp"
#include "etc/synthesis.hpp"

namespace etc::testing {

inline const Scenario& default_scenario() {
    static const Scenario s = scenario_from_json(default_scenario_json());
    return s;
}

inline const SynthesisOutcome& default_synthesis() {
    static const SynthesisOutcome out = [] {
        const auto& s = default_scenario();
        return synthesize_gains(s.plant.A, s.plant.B, s.plant.C,
                                structural_constants(s.topology, s.chain, s.attack), s.scalars, s.synthesis);
    }();
    return out;
}

inline const GainSet& default_gains() { return default_synthesis().gains; }

}  // namespace etc::testing
