#pragma once

// Umbrella header: exact least trimmed squares via the candidate
// boundary-point scan, the brute-force reference enumerator, assumption
// diagnostics, and the one-regressor landscape analysis.

#include "lts/bsa.hpp"
#include "lts/combinatorics.hpp"
#include "lts/csv.hpp"
#include "lts/diagnostics.hpp"
#include "lts/errors.hpp"
#include "lts/generate.hpp"
#include "lts/model.hpp"
#include "lts/numerics.hpp"
#include "lts/oracle.hpp"
#include "lts/parallel.hpp"
#include "lts/relation.hpp"
