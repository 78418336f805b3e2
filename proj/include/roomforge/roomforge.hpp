#pragma once

// Everything except the HTTP pieces (remote.hpp, server.hpp), which pull
// in cpp-httplib.

#include "roomforge/backend.hpp"
#include "roomforge/census.hpp"
#include "roomforge/config.hpp"
#include "roomforge/constraints.hpp"
#include "roomforge/dataset.hpp"
#include "roomforge/doors.hpp"
#include "roomforge/grid.hpp"
#include "roomforge/metrics.hpp"
#include "roomforge/pipeline.hpp"
#include "roomforge/prompting.hpp"
#include "roomforge/random.hpp"
#include "roomforge/synthetic.hpp"
#include "roomforge/tiles.hpp"
#include "roomforge/transforms.hpp"
