#pragma once

#include "hcwalk/closed_form.hpp"
#include "hcwalk/combinatorics.hpp"
#include "hcwalk/density_matrix.hpp"
#include "hcwalk/discrete_process.hpp"
#include "hcwalk/dynamics.hpp"
#include "hcwalk/errors.hpp"
#include "hcwalk/hypercube.hpp"
#include "hcwalk/qubit_network.hpp"
#include "hcwalk/spectrum.hpp"
