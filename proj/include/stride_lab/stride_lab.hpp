#pragma once

#include "stride_lab/errors.hpp"
#include "stride_lab/lip_flow.hpp"
#include "stride_lab/lip_sim.hpp"
#include "stride_lab/metrics.hpp"
#include "stride_lab/model.hpp"
#include "stride_lab/planners.hpp"
#include "stride_lab/terrain.hpp"
#include "stride_lab/vec2.hpp"
