#pragma once

// Umbrella header for the spectral fractional-diffusion solver library.

#include "fdespec/analysis.hpp"
#include "fdespec/cli.hpp"
#include "fdespec/errors.hpp"
#include "fdespec/problems.hpp"
#include "fdespec/quadrature.hpp"
#include "fdespec/solver.hpp"
#include "fdespec/spectral_params.hpp"
#include "fdespec/specfun.hpp"
