#pragma once

// Umbrella header for the whole library.

#include "qwalk/circuit.hpp"
#include "qwalk/common.hpp"
#include "qwalk/config_io.hpp"
#include "qwalk/experiment.hpp"
#include "qwalk/fixed_point.hpp"
#include "qwalk/flux_map.hpp"
#include "qwalk/geometry.hpp"
#include "qwalk/monte_carlo.hpp"
#include "qwalk/qasm.hpp"
#include "qwalk/qft.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/simulator.hpp"
#include "qwalk/state_vector.hpp"
#include "qwalk/strategies.hpp"
#include "qwalk/walk_circuits.hpp"
