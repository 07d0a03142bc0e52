#pragma once

#include <sgsn/baseline.hpp>
#include <sgsn/conjugate.hpp>
#include <sgsn/data.hpp>
#include <sgsn/dual_problem.hpp>
#include <sgsn/linops.hpp>
#include <sgsn/prox.hpp>
#include <sgsn/rng.hpp>
#include <sgsn/solver.hpp>
#include <sgsn/stationarity.hpp>
#include <sgsn/tasks.hpp>
