#pragma once

#include "ddexec/engine.hpp"
#include "ddexec/error.hpp"
#include "ddexec/models.hpp"
#include "ddexec/normal.hpp"
#include "ddexec/report.hpp"
#include "ddexec/risk.hpp"
#include "ddexec/sae_solver.hpp"
#include "ddexec/scenario.hpp"
#include "ddexec/strategy.hpp"
#include "ddexec/trajectory.hpp"
