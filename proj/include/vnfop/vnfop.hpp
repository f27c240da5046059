#pragma once

#include "vnfop/augmented.hpp"
#include "vnfop/cost.hpp"
#include "vnfop/documents.hpp"
#include "vnfop/error.hpp"
#include "vnfop/exact.hpp"
#include "vnfop/feasibility.hpp"
#include "vnfop/heuristic.hpp"
#include "vnfop/ledger.hpp"
#include "vnfop/model.hpp"
#include "vnfop/model_io.hpp"
#include "vnfop/paths.hpp"
#include "vnfop/simulator.hpp"
#include "vnfop/state.hpp"
