#pragma once

#include "ruinlab/errors.hpp"
#include "ruinlab/utility.hpp"
#include "ruinlab/rng.hpp"
#include "ruinlab/model.hpp"
#include "ruinlab/dynamics.hpp"
#include "ruinlab/parallel.hpp"
#include "ruinlab/solver.hpp"
#include "ruinlab/scenarios.hpp"
#include "ruinlab/lookahead.hpp"
#include "ruinlab/cohort.hpp"
#include "ruinlab/presets.hpp"
#include "ruinlab/config.hpp"
#include "ruinlab/emit.hpp"
#include "ruinlab/verify.hpp"
