// Umbrella header: pulls in the whole library.
#pragma once

#include "probgkat/rat.hpp"
#include "probgkat/syntax.hpp"
#include "probgkat/dist.hpp"
#include "probgkat/semantics.hpp"
#include "probgkat/equivalence.hpp"
#include "probgkat/systems.hpp"
#include "probgkat/axioms.hpp"
#include "probgkat/proof.hpp"
#include "probgkat/parser.hpp"
#include "probgkat/sim.hpp"
#include "probgkat/json_io.hpp"
#include "probgkat/dot.hpp"
