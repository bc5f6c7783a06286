#pragma once

#include "oirrt/bench.hpp"
#include "oirrt/clock.hpp"
#include "oirrt/composition.hpp"
#include "oirrt/convergence.hpp"
#include "oirrt/error.hpp"
#include "oirrt/geometry.hpp"
#include "oirrt/gradient.hpp"
#include "oirrt/optimizers.hpp"
#include "oirrt/planners.hpp"
#include "oirrt/report.hpp"
#include "oirrt/rng.hpp"
#include "oirrt/sampling.hpp"
#include "oirrt/scenario.hpp"
#include "oirrt/tree.hpp"
