#pragma once

#include "scalar_kernel.hpp"
#include "cutoff.hpp"
#include "interp.hpp"
#include "params.hpp"
#include "state.hpp"
#include "entropy.hpp"
#include "banded.hpp"
#include "lagrangian_solver.hpp"
#include "initial_data.hpp"
#include "eulerian_bridge.hpp"
#include "weak_form.hpp"
#include "monitors.hpp"
#include "family_runner.hpp"
#include "cli_io.hpp"
