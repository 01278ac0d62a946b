#pragma once

#include "levyspde/coefficients.hpp"
#include "levyspde/estimates.hpp"
#include "levyspde/io.hpp"
#include "levyspde/models.hpp"
#include "levyspde/noise.hpp"
#include "levyspde/parallel.hpp"
#include "levyspde/rng.hpp"
#include "levyspde/solver.hpp"
#include "levyspde/spaces.hpp"
#include "levyspde/types.hpp"
#include "levyspde/wellposedness.hpp"
