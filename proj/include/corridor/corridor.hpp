#pragma once

#include "corridor/cascade.hpp"
#include "corridor/cohort_io.hpp"
#include "corridor/divided_difference.hpp"
#include "corridor/errors.hpp"
#include "corridor/hybrid_sim.hpp"
#include "corridor/kernels.hpp"
#include "corridor/one_cycle.hpp"
#include "corridor/pkpd.hpp"
#include "corridor/roots.hpp"
