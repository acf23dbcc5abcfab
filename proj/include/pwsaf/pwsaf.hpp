#pragma once

// Everything except the command-line front end (pwsaf/cli.hpp), which pulls in
// CLI11 and nlohmann::json.

#include "pwsaf/error.hpp"
#include "pwsaf/newton.hpp"
#include "pwsaf/oscillator.hpp"
#include "pwsaf/coupling.hpp"
#include "pwsaf/extraction.hpp"
#include "pwsaf/sample_table.hpp"
#include "pwsaf/array_solver.hpp"
#include "pwsaf/stability.hpp"
#include "pwsaf/validation.hpp"
#include "pwsaf/csv.hpp"
