#pragma once
// Umbrella header: the full toolkit for the entangled prisoner's dilemma
// and its infinite repetition.

#include "equilibria.hpp"  // IWYU pragma: export
#include "figures.hpp"     // IWYU pragma: export
#include "folk.hpp"        // IWYU pragma: export
#include "linalg.hpp"      // IWYU pragma: export
#include "payoff.hpp"      // IWYU pragma: export
#include "quantum.hpp"     // IWYU pragma: export
#include "repeated.hpp"    // IWYU pragma: export
#include "rng.hpp"         // IWYU pragma: export
