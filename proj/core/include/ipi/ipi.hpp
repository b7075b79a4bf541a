#pragma once

#include "ipi/cost.hpp"
#include "ipi/diagnostics.hpp"
#include "ipi/error.hpp"
#include "ipi/iteration_bound.hpp"
#include "ipi/offline.hpp"
#include "ipi/online.hpp"
#include "ipi/policy.hpp"
#include "ipi/rls.hpp"
#include "ipi/sysmodels.hpp"
#include "ipi/trajectory.hpp"
#include "ipi/types.hpp"
#include "ipi/valuefn.hpp"
