#pragma once
// Convenience umbrella header pulling in the whole library.

#include "drsm/chi2.hpp"
#include "drsm/harness.hpp"
#include "drsm/io.hpp"
#include "drsm/rng.hpp"
#include "drsm/rounding.hpp"
#include "drsm/solvers.hpp"
#include "drsm/submodular.hpp"
