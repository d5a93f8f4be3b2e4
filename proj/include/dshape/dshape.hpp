#pragma once

#include "dshape/errors.hpp"
#include "dshape/rng.hpp"
#include "dshape/model.hpp"
#include "dshape/traffic.hpp"
#include "dshape/scenario.hpp"
#include "dshape/scenario_json.hpp"
#include "dshape/subproblems.hpp"
#include "dshape/metrics.hpp"
#include "dshape/blocks.hpp"
#include "dshape/offline.hpp"
#include "dshape/online.hpp"
#include "dshape/csv.hpp"
#include "dshape/experiment.hpp"
