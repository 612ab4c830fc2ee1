#pragma once

// Analytic statistical-leverage approximation for kernel ridge regression
// with stationary kernels, plus the dense exact oracle, Nystrom
// sub-sampled KRR, and synthetic benchmark generators.

#include "slev/density.hpp"
#include "slev/design_set.hpp"
#include "slev/errors.hpp"
#include "slev/exact.hpp"
#include "slev/io.hpp"
#include "slev/kernels.hpp"
#include "slev/leverage.hpp"
#include "slev/quadrature.hpp"
#include "slev/rng.hpp"
#include "slev/synth.hpp"
