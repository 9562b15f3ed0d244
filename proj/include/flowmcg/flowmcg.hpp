#pragma once

// Umbrella header.

#include "flowmcg/action.hpp"
#include "flowmcg/algebraic.hpp"
#include "flowmcg/asymptotics.hpp"
#include "flowmcg/automorphisms.hpp"
#include "flowmcg/coinvariants.hpp"
#include "flowmcg/errors.hpp"
#include "flowmcg/factor.hpp"
#include "flowmcg/flow.hpp"
#include "flowmcg/json_io.hpp"
#include "flowmcg/linalg.hpp"
#include "flowmcg/mcg.hpp"
#include "flowmcg/numeric.hpp"
#include "flowmcg/polynomial.hpp"
#include "flowmcg/returns.hpp"
#include "flowmcg/substitution.hpp"
#include "flowmcg/symbolic.hpp"
