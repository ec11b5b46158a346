#pragma once

#include "wgqed/error.hpp"
#include "wgqed/waveguide_modes.hpp"
#include "wgqed/trajectory.hpp"
#include "wgqed/history.hpp"
#include "wgqed/retarded_dynamics.hpp"
#include "wgqed/markovian_dynamics.hpp"
#include "wgqed/discrete_mode_oracle.hpp"
#include "wgqed/analysis.hpp"
#include "wgqed/system.hpp"
#include "wgqed/scenario.hpp"
