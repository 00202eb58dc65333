#pragma once

#include "pfoco/bandit.hpp"
#include "pfoco/config.hpp"
#include "pfoco/core.hpp"
#include "pfoco/experiment.hpp"
#include "pfoco/frank_wolfe.hpp"
#include "pfoco/geometry.hpp"
#include "pfoco/learners.hpp"
#include "pfoco/losses.hpp"
#include "pfoco/lp.hpp"
#include "pfoco/projection.hpp"
#include "pfoco/regret.hpp"
#include "pfoco/sampling.hpp"
#include "pfoco/schedule.hpp"
#include "pfoco/sets.hpp"
#include "pfoco/trace_io.hpp"
