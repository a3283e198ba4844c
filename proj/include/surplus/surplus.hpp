#pragma once

// Umbrella header: one-period surplus sharing with coherent distortion
// utilities on finite probability spaces.

#include "surplus/prob.hpp"
#include "surplus/distortion.hpp"
#include "surplus/choquet.hpp"
#include "surplus/allocation.hpp"
#include "surplus/retention.hpp"
#include "surplus/models.hpp"
#include "surplus/oracle.hpp"
#include "surplus/io.hpp"
