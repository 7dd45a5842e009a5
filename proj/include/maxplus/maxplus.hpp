#pragma once

#include "maxplus/convergence.hpp"
#include "maxplus/duality.hpp"
#include "maxplus/errors.hpp"
#include "maxplus/fundamental.hpp"
#include "maxplus/grid.hpp"
#include "maxplus/grid_oracle.hpp"
#include "maxplus/linalg.hpp"
#include "maxplus/problem.hpp"
#include "maxplus/riccati.hpp"
#include "maxplus/value.hpp"
