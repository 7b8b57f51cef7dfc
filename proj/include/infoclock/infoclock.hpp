#pragma once

// Umbrella header for the informative-clock library: filtering of an unknown
// drift from prices plus purchasable extra information, closed-form value
// functions, certainty-equivalent pricing of information, and the variational
// solver for the optimal acquisition schedule.

#include "infoclock/acquisition.hpp"
#include "infoclock/clock.hpp"
#include "infoclock/closed_form.hpp"
#include "infoclock/config_io.hpp"
#include "infoclock/errors.hpp"
#include "infoclock/filtering.hpp"
#include "infoclock/info_econ.hpp"
#include "infoclock/market.hpp"
#include "infoclock/montecarlo.hpp"
#include "infoclock/numerics.hpp"
#include "infoclock/rng.hpp"
