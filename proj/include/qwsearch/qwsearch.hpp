#pragma once

// Umbrella header: discrete-time quantum-walk search on periodic lattices.

#include "qwsearch/effective.hpp"
#include "qwsearch/integrals.hpp"
#include "qwsearch/kahan.hpp"
#include "qwsearch/lattice.hpp"
#include "qwsearch/localized.hpp"
#include "qwsearch/modes.hpp"
#include "qwsearch/quadrature.hpp"
#include "qwsearch/scan.hpp"
#include "qwsearch/state.hpp"
#include "qwsearch/walk.hpp"
