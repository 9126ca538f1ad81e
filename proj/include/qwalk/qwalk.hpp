#pragma once

// Umbrella header: discrete-time quantum walks on a line or circle with
// static, time-dependent, position-phase and control coins, their
// single-component decoupled recurrence, observables, the long-wavelength
// continuum approximation, and the experiment/preset layer.

#include "airy.hpp"
#include "coin.hpp"
#include "continuum.hpp"
#include "decoupled.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "lattice.hpp"
#include "observables.hpp"
#include "phase.hpp"
#include "state.hpp"
