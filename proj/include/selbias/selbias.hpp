#pragma once

#include "selbias/bounds.hpp"
#include "selbias/csv.hpp"
#include "selbias/dataset.hpp"
#include "selbias/errors.hpp"
#include "selbias/estimand.hpp"
#include "selbias/link.hpp"
#include "selbias/mstructure.hpp"
#include "selbias/oracle.hpp"
#include "selbias/random.hpp"
#include "selbias/serialize.hpp"
#include "selbias/sharpness.hpp"
