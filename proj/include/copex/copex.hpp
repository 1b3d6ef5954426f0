// Umbrella header.

#pragma once

#include "copex/bivariate_normal.hpp"
#include "copex/compare.hpp"
#include "copex/copula.hpp"
#include "copex/errors.hpp"
#include "copex/estimation.hpp"
#include "copex/gibbs.hpp"
#include "copex/normal.hpp"
#include "copex/pricing.hpp"
#include "copex/quadrature.hpp"
#include "copex/rng.hpp"
#include "copex/timeseries.hpp"
