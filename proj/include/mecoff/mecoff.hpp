#pragma once

#include "mecoff/cg_solver.hpp"
#include "mecoff/error.hpp"
#include "mecoff/gev.hpp"
#include "mecoff/gev_fit.hpp"
#include "mecoff/graph.hpp"
#include "mecoff/graph_io.hpp"
#include "mecoff/io.hpp"
#include "mecoff/model.hpp"
#include "mecoff/oracle.hpp"
#include "mecoff/params.hpp"
#include "mecoff/policies.hpp"
#include "mecoff/random.hpp"
#include "mecoff/schedule.hpp"
#include "mecoff/simplex.hpp"
#include "mecoff/simulator.hpp"
#include "mecoff/traces.hpp"
