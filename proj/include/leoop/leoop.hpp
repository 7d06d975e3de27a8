#pragma once

#include "leoop/errors.hpp"
#include "leoop/numerics/quadrature.hpp"
#include "leoop/numerics/special.hpp"
#include "leoop/numerics/laplace.hpp"
#include "leoop/geometry.hpp"
#include "leoop/channel.hpp"
#include "leoop/system.hpp"
#include "leoop/montecarlo.hpp"
#include "leoop/analytic.hpp"
#include "leoop/experiment.hpp"
