#ifndef DGBO_DGBO_HPP
#define DGBO_DGBO_HPP

#include "dgbo/errors.hpp"
#include "dgbo/spectral.hpp"
#include "dgbo/damping.hpp"
#include "dgbo/model.hpp"
#include "dgbo/fit.hpp"
#include "dgbo/integrator.hpp"
#include "dgbo/semigroup.hpp"
#include "dgbo/solver.hpp"
#include "dgbo/analysis/zb.hpp"
#include "dgbo/analysis/ratios.hpp"
#include "dgbo/analysis/bands.hpp"
#include "dgbo/analysis/claims.hpp"

#endif
