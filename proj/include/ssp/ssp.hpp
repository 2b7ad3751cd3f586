#pragma once

#include "ssp/averaging.hpp"
#include "ssp/io.hpp"
#include "ssp/linalg.hpp"
#include "ssp/linear_feasibility.hpp"
#include "ssp/model_builders.hpp"
#include "ssp/problem.hpp"
#include "ssp/prox.hpp"
#include "ssp/random.hpp"
#include "ssp/simple_set.hpp"
#include "ssp/ssp_ls.hpp"
#include "ssp/ssp_solver.hpp"
#include "ssp/stepsize.hpp"
#include "ssp/trace.hpp"
