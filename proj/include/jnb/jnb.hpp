#pragma once

#include "jnb/errors.hpp"
#include "jnb/format.hpp"
#include "jnb/geometry.hpp"
#include "jnb/bellman.hpp"
#include "jnb/piecewise.hpp"
#include "jnb/optimizers.hpp"
#include "jnb/parallel.hpp"
#include "jnb/sampling.hpp"
#include "jnb/verify.hpp"
#include "jnb/json.hpp"
#include "jnb/table.hpp"
