#pragma once

#include "lactile/error.hpp"
#include "lactile/fft.hpp"
#include "lactile/grid.hpp"
#include "lactile/norms.hpp"
#include "lactile/dyadic.hpp"
#include "lactile/tiles.hpp"
#include "lactile/level_sets.hpp"
#include "lactile/decomposition.hpp"
#include "lactile/kernel.hpp"
#include "lactile/operators.hpp"
#include "lactile/covering.hpp"
#include "lactile/inequalities.hpp"
