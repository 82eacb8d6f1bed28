#pragma once

#include "fspde/error.hpp"
#include "fspde/fft.hpp"
#include "fspde/frac_calculus.hpp"
#include "fspde/green_kernel.hpp"
#include "fspde/harness/commands.hpp"
#include "fspde/harness/config.hpp"
#include "fspde/harness/convergence.hpp"
#include "fspde/harness/csv.hpp"
#include "fspde/harness/model.hpp"
#include "fspde/harness/monte_carlo.hpp"
#include "fspde/mild_solver.hpp"
#include "fspde/model_config.hpp"
#include "fspde/noise.hpp"
#include "fspde/numerics.hpp"
#include "fspde/spectral_solver.hpp"
#include "fspde/weak_verifier.hpp"
