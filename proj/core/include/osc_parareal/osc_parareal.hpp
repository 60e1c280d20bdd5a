#pragma once

#include "osc_parareal/alignment.hpp"
#include "osc_parareal/flow.hpp"
#include "osc_parareal/integrators.hpp"
#include "osc_parareal/kernels.hpp"
#include "osc_parareal/metrics.hpp"
#include "osc_parareal/parallel.hpp"
#include "osc_parareal/parareal.hpp"
#include "osc_parareal/poincare.hpp"
#include "osc_parareal/problem.hpp"
#include "osc_parareal/problems.hpp"
#include "osc_parareal/state.hpp"
#include "osc_parareal/table1.hpp"
