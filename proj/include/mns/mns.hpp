#pragma once

#include "mns/common.hpp"
#include "mns/config.hpp"
#include "mns/diagnostics.hpp"
#include "mns/field.hpp"
#include "mns/grid.hpp"
#include "mns/initial_conditions.hpp"
#include "mns/integrator.hpp"
#include "mns/models.hpp"
#include "mns/multipliers.hpp"
#include "mns/run.hpp"
#include "mns/snapshot.hpp"
#include "mns/spectral_ops.hpp"
#include "mns/verify.hpp"
#include "mns/version.hpp"
