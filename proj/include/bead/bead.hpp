#pragma once

// Umbrella header: the full simulator stack.

#include "bead/auth.hpp"
#include "bead/bytes.hpp"
#include "bead/forwarder.hpp"
#include "bead/hash.hpp"
#include "bead/histories.hpp"
#include "bead/marking.hpp"
#include "bead/messages.hpp"
#include "bead/metrics.hpp"
#include "bead/name.hpp"
#include "bead/rng.hpp"
#include "bead/scenario.hpp"
#include "bead/simulator.hpp"
#include "bead/tables.hpp"
#include "bead/topology.hpp"
#include "bead/version.hpp"
